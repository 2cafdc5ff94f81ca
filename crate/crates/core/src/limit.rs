//! Limit points `x_alpha` and finite samples of the unconventional limit set.
//!
//! For a word `alpha` and depth `n`, each component `F^{xi_ij}_{alpha,n}` has a
//! unique fixed point `x^{(n)}_{xi_ij,alpha}`; their sum of products is the
//! depth-`n` point `x^{(n)}_alpha`. Successive depths agree mod `p^m` for all
//! `n > m`, so the depth-`m` point pins down the limit `x_alpha` to `m` digits.
//!
//! The limit set is the closure of all such finite-depth points. It is
//! represented here by [`LimitSetSample`]: every word of one fixed depth `d`,
//! deduplicated mod `p^d`, which is `p^(-d)`-dense in the limit set.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::affine::ContractionSystem;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::family::{
    component_map, sum_of_products, IndexFamily, IndexMap, SymbolWord, UnconventionalMap,
};
use crate::padic::{parse_digits, PadicInt};

/// Default cap on `N^depth`: depth 12 over two symbols.
pub const DEFAULT_BUDGET: u128 = 1 << 12;

/// Fixed point of `F^{xi_ij}_{alpha,n}`.
pub fn component_fixed_point(
    system: &ContractionSystem,
    map: &IndexMap,
    alpha: &SymbolWord,
    n: usize,
) -> Result<PadicInt> {
    component_map(system, map, alpha, n)?.fixed_point()
}

fn check_family(system: &ContractionSystem, family: &IndexFamily) -> Result<()> {
    if family.alphabet() as usize != system.len() {
        return Err(Error::AlphabetMismatch {
            expected: system.len() as u32,
            found: family.alphabet(),
        });
    }
    Ok(())
}

/// `x^{(n)}_alpha = sum_i prod_j x^{(n)}_{xi_ij,alpha}`.
pub fn lambda0_point(
    system: &ContractionSystem,
    family: &IndexFamily,
    alpha: &SymbolWord,
    n: usize,
) -> Result<PadicInt> {
    check_family(system, family)?;
    let fixed = family
        .maps()
        .iter()
        .map(|row| {
            row.iter()
                .map(|m| component_fixed_point(system, m, alpha, n))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(sum_of_products(&fixed))
}

/// An approximation of `x_alpha` that agrees with it mod `p^guaranteed_exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitPoint {
    pub value: PadicInt,
    pub guaranteed_exponent: usize,
    pub word: SymbolWord,
}

pub fn limit_point(
    system: &ContractionSystem,
    family: &IndexFamily,
    alpha: &SymbolWord,
    depth: usize,
) -> Result<LimitPoint> {
    let value = lambda0_point(system, family, alpha, depth)?;
    Ok(LimitPoint {
        guaranteed_exponent: depth.min(value.precision()),
        value,
        word: alpha.clone(),
    })
}

/// The pre-limit value of `F~[x_beta]` at depth `m`:
/// `sum_i prod_j F^{xi_ij}_{alpha,n}(x^{(m)}_{xi_ij,beta})`.
///
/// It agrees with `x_{alpha^[n] ∨ beta}` mod `p^min(n+m, K)`.
pub fn f_tilde(
    system: &ContractionSystem,
    family: &IndexFamily,
    alpha: &SymbolWord,
    n: usize,
    beta: &SymbolWord,
    m: usize,
) -> Result<PadicInt> {
    check_family(system, family)?;
    let outer = UnconventionalMap::build(system, family, alpha, n)?;
    let values = outer
        .components()
        .iter()
        .zip(family.maps())
        .map(|(fs, maps)| {
            fs.iter()
                .zip(maps)
                .map(|(f, map)| f.apply(&component_fixed_point(system, map, beta, m)?))
                .collect()
        })
        .collect::<Result<Vec<Vec<_>>>>()?;
    Ok(sum_of_products(&values))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub budget: u128,
    pub execution: Execution,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            budget: DEFAULT_BUDGET,
            execution: Execution::default(),
        }
    }
}

/// Metadata written ahead of the points in a sample file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleHeader {
    pub prime: u32,
    pub precision: usize,
    pub depth: usize,
    pub alphabet: u32,
    pub rows: usize,
    pub cols: usize,
    pub family: String,
}

impl SampleHeader {
    pub fn for_family(system: &ContractionSystem, family: &IndexFamily, depth: usize) -> Self {
        SampleHeader {
            prime: system.prime(),
            precision: system.precision(),
            depth,
            alphabet: family.alphabet(),
            rows: family.rows(),
            cols: family.cols(),
            family: family.describe(),
        }
    }

    /// Points are deduplicated mod `p^modulus`.
    pub fn modulus(&self) -> usize {
        self.depth.min(self.precision)
    }
}

/// Points of the limit set at one depth, pairwise distinct mod `p^depth`,
/// sorted lexicographically by digit sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSetSample {
    header: SampleHeader,
    points: Vec<PadicInt>,
}

impl LimitSetSample {
    /// Deduplicates mod `p^modulus`, keeping the first occurrence of each residue.
    pub fn from_points(header: SampleHeader, points: impl IntoIterator<Item = PadicInt>) -> Self {
        let k = header.modulus();
        let mut by_residue: BTreeMap<Vec<u32>, PadicInt> = BTreeMap::new();
        for x in points {
            by_residue.entry(x.digits()[..k].to_vec()).or_insert(x);
        }
        let mut points: Vec<PadicInt> = by_residue.into_values().collect();
        points.sort();
        LimitSetSample { header, points }
    }

    pub fn header(&self) -> &SampleHeader {
        &self.header
    }

    pub fn depth(&self) -> usize {
        self.header.depth
    }

    pub fn prime(&self) -> u32 {
        self.header.prime
    }

    pub fn precision(&self) -> usize {
        self.header.precision
    }

    pub fn points(&self) -> &[PadicInt] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Residues of the points mod `p^k` (`k` capped at the precision), as digit prefixes.
    pub fn residues(&self, k: usize) -> std::collections::BTreeSet<Vec<u32>> {
        let k = k.min(self.header.precision);
        self.points
            .iter()
            .map(|x| x.digits()[..k].to_vec())
            .collect()
    }

    /// Whether some point agrees with `x` mod `p^modulus`.
    pub fn contains_residue(&self, x: &PadicInt) -> bool {
        let k = self.header.modulus();
        self.points
            .iter()
            .any(|y| y.digits()[..k] == x.digits()[..k])
    }

    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        writeln!(out, "# zp-limits sample").unwrap();
        writeln!(
            out,
            "p={} K={} depth={} N={} M={} L={}",
            h.prime, h.precision, h.depth, h.alphabet, h.rows, h.cols
        )
        .unwrap();
        writeln!(out, "family={}", h.family).unwrap();
        for x in &self.points {
            writeln!(out, "{x}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (mut line_no, mut line) = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "empty sample"))?;
        if line.starts_with('#') {
            (line_no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(1, 1, "missing header"))?;
        }
        let mut fields = BTreeMap::new();
        for field in line.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| {
                Error::parse(line_no + 1, 1, format!("malformed field {field:?}"))
            })?;
            let v: usize = v
                .parse()
                .map_err(|_| Error::parse(line_no + 1, 1, format!("bad value in {field:?}")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::parse(line_no + 1, 1, format!("header missing {k}")))
        };
        let (fam_no, fam_line) = lines
            .next()
            .ok_or_else(|| Error::parse(line_no + 2, 1, "missing family line"))?;
        let family = fam_line
            .strip_prefix("family=")
            .ok_or_else(|| Error::parse(fam_no + 1, 1, "expected family="))?;
        let header = SampleHeader {
            prime: get("p")? as u32,
            precision: get("K")?,
            depth: get("depth")?,
            alphabet: get("N")? as u32,
            rows: get("M")?,
            cols: get("L")?,
            family: family.to_string(),
        };
        let mut points = Vec::new();
        for (no, l) in lines {
            let x = parse_digits(header.prime, l).map_err(|e| match e {
                Error::Parse {
                    column, message, ..
                } => Error::parse(no + 1, column, message),
                other => other,
            })?;
            if x.precision() != header.precision {
                return Err(Error::parse(no + 1, 1, "digit count differs from K"));
            }
            points.push(x);
        }
        let n = points.len();
        let sample = Self::from_points(header, points);
        if sample.len() != n {
            return Err(Error::parse(1, 1, "points are not distinct mod p^depth"));
        }
        Ok(sample)
    }
}

/// Depth-`depth` points over all `N^depth` words, deduplicated mod `p^depth`.
pub fn enumerate_lambda0(
    system: &ContractionSystem,
    family: &IndexFamily,
    depth: usize,
) -> Result<LimitSetSample> {
    enumerate_lambda0_with(system, family, depth, &EnumerateOptions::default())
}

pub fn enumerate_lambda0_with(
    system: &ContractionSystem,
    family: &IndexFamily,
    depth: usize,
    options: &EnumerateOptions,
) -> Result<LimitSetSample> {
    check_family(system, family)?;
    if depth == 0 {
        return Err(Error::EmptyWord);
    }
    let alphabet = family.alphabet();
    let count = (alphabet as u128)
        .checked_pow(depth as u32)
        .unwrap_or(u128::MAX);
    if count > options.budget {
        return Err(Error::BudgetExceeded {
            count,
            budget: options.budget,
        });
    }
    let points = options
        .execution
        .map_range(count as usize, |i| {
            let word = SymbolWord::nth_of_length(alphabet, depth, i as u128);
            lambda0_point(system, family, &word, depth)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitSetSample::from_points(
        SampleHeader::for_family(system, family, depth),
        points,
    ))
}
