//! Flat `key = value` run configuration.
//!
//! ```text
//! # two-map system, case 4
//! p = 3
//! precision = 12
//! maps.N = 2
//! maps.1.a = 3
//! maps.1.b = 0
//! maps.2.a = 3
//! maps.2.b = -2
//! family.M = 2
//! family.L = 2
//! family.entry.1.1 = parity:2
//! family.entry.1.2 = parity:1
//! family.entry.2.1 = parity:1
//! family.entry.2.2 = parity:1
//! enumerate.depth = 6
//! ```
//!
//! Coefficients are integers, fractions `n/d`, or little-endian digit strings
//! such as `0,1,2`. Optional keys: `seed`, `enumerate.budget`,
//! `verify.<suite>` (`true`/`false`), `verify.samples`, `verify.annulus_c`,
//! and `output.sample`, `output.monna`, `output.distmatrix`, `output.report`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::affine::{AffineMap, ContractionSystem};
use crate::error::{Error, Result};
use crate::family::{IndexEntry, IndexFamily};
use crate::limit::DEFAULT_BUDGET;
use crate::padic::{is_prime, PadicInt};

pub const DEFAULT_DEPTH: usize = 6;
pub const DEFAULT_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coefficient {
    Rational { num: i64, den: i64 },
    Digits(Vec<u32>),
}

impl Coefficient {
    /// Digit strings are finite sums `sum d_i p^i`, so they are zero-padded or
    /// reduced mod `p^K` as needed.
    pub fn to_padic(&self, prime: u32, precision: usize) -> Result<PadicInt> {
        match self {
            Coefficient::Rational { num, den } => {
                PadicInt::from_rational(prime, precision, *num, *den)
            }
            Coefficient::Digits(ds) => {
                let digits = (0..precision)
                    .map(|i| ds.get(i).copied().unwrap_or(0))
                    .collect();
                PadicInt::from_digits(prime, digits)
            }
        }
    }
}

impl FromStr for Coefficient {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.contains(',') {
            let digits = s
                .split(',')
                .map(|d| {
                    d.trim()
                        .parse::<u32>()
                        .map_err(|_| format!("bad digit {d:?}"))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            return Ok(Coefficient::Digits(digits));
        }
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let num = n
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator {n:?}"))?;
        let den = d
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator {d:?}"))?;
        Ok(Coefficient::Rational { num, den })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyToggles {
    pub certificate: bool,
    pub lipschitz: bool,
    pub cauchy: bool,
    pub teor5: bool,
    pub closure: bool,
    pub isolation: bool,
    pub annulus: bool,
    pub separation: bool,
    pub doubling: bool,
    pub quasi_symmetry: bool,
    pub gallery: bool,
}

impl Default for VerifyToggles {
    fn default() -> Self {
        VerifyToggles {
            certificate: true,
            lipschitz: true,
            cauchy: true,
            teor5: true,
            closure: true,
            isolation: true,
            annulus: true,
            separation: true,
            doubling: true,
            quasi_symmetry: true,
            gallery: true,
        }
    }
}

impl VerifyToggles {
    fn slot(&mut self, name: &str) -> Option<&mut bool> {
        Some(match name {
            "certificate" => &mut self.certificate,
            "lipschitz" => &mut self.lipschitz,
            "cauchy" => &mut self.cauchy,
            "teor5" => &mut self.teor5,
            "closure" => &mut self.closure,
            "isolation" => &mut self.isolation,
            "annulus" => &mut self.annulus,
            "separation" => &mut self.separation,
            "doubling" => &mut self.doubling,
            "quasi_symmetry" => &mut self.quasi_symmetry,
            "gallery" => &mut self.gallery,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outputs {
    pub sample: Option<PathBuf>,
    pub monna: Option<PathBuf>,
    pub distmatrix: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub precision: Option<usize>,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<u128>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub prime: u32,
    pub precision: usize,
    pub coefficients: Vec<(Coefficient, Coefficient)>,
    pub entries: Vec<Vec<IndexEntry>>,
    pub depth: usize,
    pub budget: u128,
    pub seed: u64,
    pub verify: VerifyToggles,
    pub samples: usize,
    pub annulus_c: usize,
    pub outputs: Outputs,
    pub system: ContractionSystem,
    pub family: IndexFamily,
}

struct Entry<'a> {
    line: usize,
    column: usize,
    value: &'a str,
}

struct Doc<'a> {
    entries: BTreeMap<&'a str, Entry<'a>>,
}

impl<'a> Doc<'a> {
    fn parse(text: &'a str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let Some(eq) = content.find('=') else {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(Error::parse(line, col, "expected key = value"));
            };
            let key = content[..eq].trim();
            if key.is_empty() {
                return Err(Error::parse(line, 1, "empty key"));
            }
            let rest = &content[eq + 1..];
            let value = rest.trim();
            let column = eq + 2 + (rest.len() - rest.trim_start().len());
            if entries.contains_key(key) {
                return Err(Error::parse(line, 1, format!("duplicate key {key}")));
            }
            entries.insert(
                key,
                Entry {
                    line,
                    column,
                    value,
                },
            );
        }
        Ok(Doc { entries })
    }

    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: ToString,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|err: T::Err| {
                Error::parse(e.line, e.column, format!("{key}: {}", err.to_string()))
            }),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: ToString,
    {
        self.take(key)?.ok_or_else(|| Error::Validation {
            invariant: "required key",
            detail: format!("missing {key}"),
        })
    }

    fn position(&self, key: &str) -> (usize, usize) {
        self.entries.get(key).map_or((0, 0), |e| (e.line, e.column))
    }
}

fn invalid(invariant: &'static str, detail: impl Into<String>) -> Error {
    Error::Validation {
        invariant,
        detail: detail.into(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig> {
    let mut doc = Doc::parse(text)?;
    let prime: u32 = doc.require("p")?;
    let file_precision: usize = match doc.take("precision")? {
        Some(k) => k,
        None => doc.require("K")?,
    };
    let n: u32 = doc.require("maps.N")?;
    let mut coefficients = Vec::new();
    for i in 1..=n {
        let a: Coefficient = doc.require(&format!("maps.{i}.a"))?;
        let b: Coefficient = doc.require(&format!("maps.{i}.b"))?;
        coefficients.push((a, b));
    }
    let rows: usize = doc.require("family.M")?;
    let cols: usize = doc.require("family.L")?;
    let mut entries = Vec::new();
    for i in 1..=rows {
        let mut row = Vec::new();
        for j in 1..=cols {
            let key = format!("family.entry.{i}.{j}");
            let (line, col) = doc.position(&key);
            let entry: IndexEntry = doc.require(&key)?;
            if let Err(e) = entry.resolve(n) {
                return Err(Error::parse(line, col, format!("{key}: {e}")));
            }
            row.push(entry);
        }
        entries.push(row);
    }
    let depth = doc.take("enumerate.depth")?.unwrap_or(DEFAULT_DEPTH);
    let budget = doc.take("enumerate.budget")?.unwrap_or(DEFAULT_BUDGET);
    let seed = doc.take("seed")?.unwrap_or(0);
    let samples = doc.take("verify.samples")?.unwrap_or(DEFAULT_SAMPLES);
    let annulus_c = doc.take("verify.annulus_c")?.unwrap_or(1);
    let outputs = Outputs {
        sample: doc.take("output.sample")?,
        monna: doc.take("output.monna")?,
        distmatrix: doc.take("output.distmatrix")?,
        report: doc.take("output.report")?,
    };
    let mut verify = VerifyToggles::default();
    let toggle_keys: Vec<&str> = doc
        .entries
        .keys()
        .copied()
        .filter(|k| k.starts_with("verify."))
        .collect();
    for key in toggle_keys {
        let (line, col) = doc.position(key);
        let on: bool = doc.require(key)?;
        match verify.slot(&key["verify.".len()..]) {
            Some(slot) => *slot = on,
            None => return Err(Error::parse(line, col, format!("unknown suite {key}"))),
        }
    }
    if let Some((key, e)) = doc.entries.iter().next() {
        return Err(Error::parse(e.line, 1, format!("unknown key {key}")));
    }

    let precision = overrides.precision.unwrap_or(file_precision);
    let (system, family) = build(prime, precision, &coefficients, &entries)?;
    Ok(RunConfig {
        prime,
        precision,
        coefficients,
        entries,
        depth: overrides.depth.unwrap_or(depth),
        budget: overrides.budget.unwrap_or(budget),
        seed: overrides.seed.unwrap_or(seed),
        verify,
        samples,
        annulus_c,
        outputs,
        system,
        family,
    })
}

fn build(
    prime: u32,
    precision: usize,
    coefficients: &[(Coefficient, Coefficient)],
    entries: &[Vec<IndexEntry>],
) -> Result<(ContractionSystem, IndexFamily)> {
    if !is_prime(prime) {
        return Err(invalid("prime", format!("{prime} is not prime")));
    }
    if precision == 0 {
        return Err(invalid("precision", "precision must be at least 1"));
    }
    if coefficients.is_empty() {
        return Err(invalid("maps", "maps.N must be at least 1"));
    }
    let maps = coefficients
        .iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let a = a
                .to_padic(prime, precision)
                .map_err(|e| invalid("coefficient", format!("maps.{}.a: {e}", i + 1)))?;
            let b = b
                .to_padic(prime, precision)
                .map_err(|e| invalid("coefficient", format!("maps.{}.b: {e}", i + 1)))?;
            AffineMap::new(a, b).map_err(|_| {
                invalid(
                    "contraction certificate",
                    format!("maps.{} has a unit multiplier", i + 1),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let system = ContractionSystem::new(maps)?;
    let family = IndexFamily::new(system.len() as u32, entries.to_vec()).map_err(|e| match e {
        Error::CoverageViolation { .. } => invalid("coverage", e.to_string()),
        other => invalid("family", other.to_string()),
    })?;
    Ok((system, family))
}

impl RunConfig {
    /// Rebuilds the system at a new precision.
    pub fn with_precision(&self, precision: usize) -> Result<RunConfig> {
        let (system, family) = build(self.prime, precision, &self.coefficients, &self.entries)?;
        Ok(RunConfig {
            precision,
            system,
            family,
            ..self.clone()
        })
    }
}
