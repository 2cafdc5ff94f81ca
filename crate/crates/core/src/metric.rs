//! Ultrametric geometry of finite samples.
//!
//! All distances are powers of `p`, so every check below compares integer
//! valuations. A larger valuation means a smaller distance: `|x - y|_p = p^(-v)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::ContractionSystem;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::family::{IndexFamily, SymbolWord};
use crate::limit::{lambda0_point, LimitSetSample};
use crate::padic::{PadicInt, Valuation};

/// Closed ball `{x : v(x - a) >= k}` or open ball `{x : v(x - a) > k}`, radius `p^(-k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallSpec {
    pub center: PadicInt,
    pub radius_exponent: usize,
    pub closed: bool,
}

impl BallSpec {
    pub fn closed(center: PadicInt, radius_exponent: usize) -> Self {
        BallSpec {
            center,
            radius_exponent,
            closed: true,
        }
    }

    pub fn open(center: PadicInt, radius_exponent: usize) -> Self {
        BallSpec {
            center,
            radius_exponent,
            closed: false,
        }
    }

    pub fn contains(&self, x: &PadicInt) -> Result<bool> {
        let v = self.center.distance_valuation(x)?.exponent();
        Ok(if self.closed {
            v >= self.radius_exponent
        } else {
            v > self.radius_exponent
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

/// Outcome of one metric check. Failures carry witnesses; passes carry the
/// extremal constant that was observed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricReport {
    pub property: String,
    pub parameters: Vec<(String, String)>,
    pub verdict: Verdict,
    pub constants: Vec<(String, String)>,
    pub witnesses: Vec<String>,
}

impl MetricReport {
    pub fn new(property: impl Into<String>, verdict: Verdict) -> Self {
        MetricReport {
            property: property.into(),
            parameters: Vec::new(),
            verdict,
            constants: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn constant(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.constants.push((key.to_string(), value.to_string()));
        self
    }

    pub fn witness(mut self, w: impl fmt::Display) -> Self {
        self.witnesses.push(w.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn get_constant(&self, key: &str) -> Option<&str> {
        self.constants
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "property: {}", self.property)?;
        if !self.parameters.is_empty() {
            let ps: Vec<String> = self
                .parameters
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            writeln!(f, "parameters: {}", ps.join(" "))?;
        }
        writeln!(f, "verdict: {}", self.verdict)?;
        for (k, v) in &self.constants {
            writeln!(f, "constant {k}: {v}")?;
        }
        for w in &self.witnesses {
            writeln!(f, "witness: {w}")?;
        }
        Ok(())
    }
}

pub fn pdist(x: &PadicInt, y: &PadicInt) -> Result<Valuation> {
    x.distance_valuation(y)
}

/// Largest pairwise distance as a valuation.
///
/// In an ultrametric `v(x - y) >= min(v(x - x0), v(y - x0))`, so the minimum
/// over pairs is attained at a pair through any fixed point `x0`.
pub fn diameter(sample: &LimitSetSample) -> Result<Valuation> {
    let pts = sample.points();
    if pts.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    pts[1..]
        .iter()
        .map(|y| pdist(&pts[0], y))
        .collect::<Result<Vec<_>>>()
        .map(|vs| vs.into_iter().min().expect("at least one pair"))
}

fn locate<'a>(sample: &'a LimitSetSample, x: &PadicInt) -> Option<&'a PadicInt> {
    let k = sample.header().modulus();
    sample
        .points()
        .iter()
        .find(|y| x.check_compatible(y).is_ok() && y.agreement(x) >= k)
}

fn not_in_sample(property: &str, x: &PadicInt) -> MetricReport {
    MetricReport::new(property, Verdict::NotApplicable)
        .witness(format!("{x} is not a sample point"))
}

/// Looks for `y` with `r_exp <= v(y - x0) <= r_exp + c_exp`, i.e. a point in
/// the annulus `c r <= |y - x0|_p <= r` with `r = p^(-r_exp)`, `c = p^(-c_exp)`.
pub fn perfect_annulus(
    sample: &LimitSetSample,
    x0: &PadicInt,
    r_exp: usize,
    c_exp: usize,
) -> MetricReport {
    const NAME: &str = "perfect_annulus";
    let Some(x0) = locate(sample, x0) else {
        return not_in_sample(NAME, x0);
    };
    let base = MetricReport::new(NAME, Verdict::Pass)
        .param("x0", x0)
        .param("r_exp", r_exp)
        .param("c_exp", c_exp);
    let diam = match diameter(sample) {
        Ok(d) => d.exponent(),
        Err(_) => {
            return MetricReport {
                verdict: Verdict::NotApplicable,
                ..base
            }
            .witness("fewer than two points")
        }
    };
    if r_exp < diam {
        return MetricReport {
            verdict: Verdict::NotApplicable,
            ..base
        }
        .witness(format!("radius exponent below diameter exponent {diam}"));
    }
    let k = sample.header().modulus();
    let hit = sample
        .points()
        .iter()
        .map(|y| (y.agreement(x0), y))
        .filter(|&(v, _)| v < k && v >= r_exp && v <= r_exp + c_exp)
        .min_by_key(|&(v, _)| v);
    match hit {
        Some((v, y)) => base.constant("valuation", v).witness(y),
        None => MetricReport {
            verdict: Verdict::Fail,
            ..base
        }
        .witness("annulus empty"),
    }
}

/// Splits the sample into `A = B(a, p^(-r_exp))` and its complement and reports
/// `dist(A, sample - A)` as the largest cross valuation. Passes when every cross
/// pair is strictly farther apart than the ball radius.
pub fn disconnect_separation(sample: &LimitSetSample, a: &PadicInt, r_exp: usize) -> MetricReport {
    disconnect_separation_with(sample, a, r_exp, Execution::default())
}

pub fn disconnect_separation_with(
    sample: &LimitSetSample,
    a: &PadicInt,
    r_exp: usize,
    execution: Execution,
) -> MetricReport {
    const NAME: &str = "disconnect_separation";
    let Some(a) = locate(sample, a) else {
        return not_in_sample(NAME, a);
    };
    let base = MetricReport::new(NAME, Verdict::Pass)
        .param("a", a)
        .param("r_exp", r_exp);
    let (inside, outside): (Vec<&PadicInt>, Vec<&PadicInt>) = sample
        .points()
        .iter()
        .partition(|x| x.agreement(a) >= r_exp);
    if outside.is_empty() {
        return base
            .constant("separation_exponent", "inf")
            .constant("ball_size", inside.len())
            .witness("complement empty");
    }
    let (sep, x, y) = execution
        .map_slice(&inside, |x| {
            outside
                .iter()
                .map(|y| (x.agreement(y), *x, *y))
                .max_by_key(|t| t.0)
                .expect("complement is non-empty")
        })
        .into_iter()
        .max_by_key(|t| t.0)
        .expect("ball contains a");
    let report = base
        .constant("separation_exponent", sep)
        .constant("ball_size", inside.len());
    if sep < r_exp {
        report
    } else {
        MetricReport {
            verdict: Verdict::Fail,
            ..report
        }
        .witness(format!("{x} ~ {y}"))
    }
}

/// Covers `B(a, p^(-r_exp))` by the subballs of radius `p^(-r_exp-1)` that
/// meet the sample, one per digit at position `r_exp`.
pub fn doubling_cover(sample: &LimitSetSample, a: &PadicInt, r_exp: usize) -> MetricReport {
    const NAME: &str = "doubling_cover";
    let Some(a) = locate(sample, a) else {
        return not_in_sample(NAME, a);
    };
    let base = MetricReport::new(NAME, Verdict::Pass)
        .param("a", a)
        .param("r_exp", r_exp);
    let prime = sample.prime();
    let mut centers: BTreeMap<u32, PadicInt> = BTreeMap::new();
    for x in sample.points().iter().filter(|x| x.agreement(a) >= r_exp) {
        let digit = x.digits().get(r_exp).copied().unwrap_or(0);
        centers
            .entry(digit)
            .or_insert_with(|| x.truncated((r_exp + 1).min(x.precision())));
    }
    let mut report = base
        .constant("subballs", centers.len())
        .constant("bound", prime);
    for c in centers.values() {
        report = report.witness(c);
    }
    if centers.len() > prime as usize {
        report.verdict = Verdict::Fail;
    }
    report
}

/// `d_a(x, y) = a^L` for the symbolic Cantor metric; `agreement == None` means `L = inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolDistance {
    pub base_num: u64,
    pub base_den: u64,
    pub agreement: Option<usize>,
}

impl SymbolDistance {
    pub fn to_f64(&self) -> f64 {
        match self.agreement {
            None => 0.0,
            Some(l) => (self.base_num as f64 / self.base_den as f64).powi(l as i32),
        }
    }
}

impl fmt::Display for SymbolDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.agreement {
            None => f.write_str("0"),
            Some(l) => write!(f, "({}/{})^{}", self.base_num, self.base_den, l),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Length of the longest common prefix of two words, `None` if they never differ.
pub fn common_prefix(x: &SymbolWord, y: &SymbolWord) -> Result<Option<usize>> {
    if x.alphabet() != y.alphabet() {
        return Err(Error::AlphabetMismatch {
            expected: x.alphabet(),
            found: y.alphabet(),
        });
    }
    let horizon = match (x.len(), y.len()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => {
            let (tx, ty) = (x.tail().len(), y.tail().len());
            x.prefix().len().max(y.prefix().len()) + tx / gcd(tx, ty) * ty
        }
    };
    for i in 0..horizon {
        if x.symbol(i) != y.symbol(i) {
            return Ok(Some(i));
        }
    }
    match (x.len(), y.len()) {
        (Some(a), Some(b)) if a != b => Err(Error::IncomparableLength { left: a, right: b }),
        _ => Ok(None),
    }
}

/// `d_a(x, y)` with `a = base_num / base_den` in `(0, 1)`.
pub fn symbol_dist(
    x: &SymbolWord,
    y: &SymbolWord,
    base_num: u64,
    base_den: u64,
) -> Result<SymbolDistance> {
    if base_num == 0 || base_num >= base_den {
        return Err(Error::InvalidParameter(format!(
            "metric base {base_num}/{base_den} is not in (0, 1)"
        )));
    }
    Ok(SymbolDistance {
        base_num,
        base_den,
        agreement: common_prefix(x, y)?,
    })
}

/// Exponent `s` of a candidate modulus `eta(t) = t^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Eta {
    Rational {
        num: u64,
        den: u64,
    },
    /// `s = log q / log 2`
    Log2Of(u64),
}

impl Eta {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Eta::Rational { num, den } if num > 0 && den > 0 => Ok(()),
            Eta::Log2Of(q) if q >= 2 => Ok(()),
            _ => Err(Error::InvalidParameter(format!(
                "modulus exponent {self} is not positive"
            ))),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Eta::Rational { num, den } => num as f64 / den as f64,
            Eta::Log2Of(q) => (q as f64).log2(),
        }
    }

    /// Whether `p^(-a) <= (2^(-b))^s`, decided in integers.
    fn holds(&self, p: u32, a: i64, b: i64) -> bool {
        let (pe, qe, q) = match *self {
            Eta::Rational { num, den } => (a * den as i64, b * num as i64, 2u64),
            Eta::Log2Of(q) => (a, b, q),
        };
        // p^pe >= q^qe, with negative exponents moved across
        let lhs =
            BigUint::from(p).pow(pe.max(0) as u32) * BigUint::from(q).pow((-qe).max(0) as u32);
        let rhs =
            BigUint::from(q).pow(qe.max(0) as u32) * BigUint::from(p).pow((-pe).max(0) as u32);
        lhs >= rhs
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eta::Rational { num, den } => write!(f, "{num}/{den}"),
            Eta::Log2Of(q) => write!(f, "log2({q})"),
        }
    }
}

pub type WordTriple = (SymbolWord, SymbolWord, SymbolWord);

/// All ordered triples of words of length `depth`.
pub fn exhaustive_triples(alphabet: u32, depth: usize) -> Vec<WordTriple> {
    let n = (alphabet as u128).pow(depth as u32);
    let words: Vec<SymbolWord> = (0..n)
        .map(|i| SymbolWord::nth_of_length(alphabet, depth, i))
        .collect();
    let mut out = Vec::with_capacity(words.len().pow(3));
    for x in &words {
        for y in &words {
            for z in &words {
                out.push((x.clone(), y.clone(), z.clone()));
            }
        }
    }
    out
}

/// `count` random triples of finite words of length `depth`.
pub fn random_triples(alphabet: u32, depth: usize, count: usize, seed: u64) -> Vec<WordTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut word = || {
        let symbols = (0..depth).map(|_| rng.random_range(1..=alphabet)).collect();
        SymbolWord::finite(alphabet, symbols).expect("symbols drawn from the alphabet")
    };
    (0..count).map(|_| (word(), word(), word())).collect()
}

/// Audits `pi: alpha -> x_alpha` (evaluated at `depth`) against the modulus
/// `eta(t) = t^s` from the symbolic metric `d_{1/2}` to the p-adic metric.
///
/// For each triple it checks `d(pi x, pi y) / d(pi x, pi z) <= t^s` with
/// `t = d_{1/2}(x, y) / d_{1/2}(x, z)`. Words are compared on their first
/// `depth` symbols and p-adic distances are capped at the guaranteed exponent.
/// Triples with `x = z` are degenerate and only counted.
pub fn quasi_symmetry_audit(
    triples: &[WordTriple],
    system: &ContractionSystem,
    family: &IndexFamily,
    depth: usize,
    eta: Eta,
    execution: Execution,
) -> Result<MetricReport> {
    eta.validate()?;
    let mut index: BTreeMap<&SymbolWord, usize> = BTreeMap::new();
    for (x, y, z) in triples {
        for w in [x, y, z] {
            let next = index.len();
            index.entry(w).or_insert(next);
        }
    }
    let mut words: Vec<Option<&SymbolWord>> = vec![None; index.len()];
    for (w, &i) in &index {
        words[i] = Some(w);
    }
    let words: Vec<&SymbolWord> = words.into_iter().flatten().collect();
    let unfolded = words
        .iter()
        .map(|w| w.unfold(depth))
        .collect::<Result<Vec<_>>>()?;
    let values = execution
        .map_slice(&words, |w| lambda0_point(system, family, w, depth))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let cap = depth.min(system.precision());
    let prime = system.prime();
    let lcp = |i: usize, j: usize| {
        unfolded[i]
            .iter()
            .zip(&unfolded[j])
            .position(|(a, b)| a != b)
    };
    let val = |i: usize, j: usize| values[i].agreement(&values[j]).min(cap);

    #[derive(Clone, Copy)]
    enum Outcome {
        Degenerate,
        Trivial,
        Checked {
            ok: bool,
            a: i64,
            b: i64,
            margin: f64,
        },
    }
    let s = eta.to_f64();
    let lnp = (prime as f64).ln();
    let ids: Vec<[usize; 3]> = triples
        .iter()
        .map(|(x, y, z)| [index[x], index[y], index[z]])
        .collect();
    let outcomes = execution.map_slice(&ids, |&[x, y, z]| {
        let Some(lxz) = lcp(x, z) else {
            return Outcome::Degenerate;
        };
        let Some(lxy) = lcp(x, y) else {
            return Outcome::Trivial;
        };
        let (vxy, vxz) = (val(x, y), val(x, z));
        if vxy >= cap {
            return Outcome::Trivial;
        }
        let (a, b) = (vxy as i64 - vxz as i64, lxy as i64 - lxz as i64);
        let ok = vxz < cap && eta.holds(prime, a, b);
        let margin = if vxz >= cap {
            f64::NEG_INFINITY
        } else {
            a as f64 * lnp - s * b as f64 * std::f64::consts::LN_2
        };
        Outcome::Checked { ok, a, b, margin }
    });

    let mut degenerate = 0usize;
    let mut checked = 0usize;
    let mut violations = 0usize;
    let mut worst: Option<(f64, usize, i64, i64)> = None;
    let mut first_bad = None;
    for (i, o) in outcomes.iter().enumerate() {
        match *o {
            Outcome::Degenerate => degenerate += 1,
            Outcome::Trivial => checked += 1,
            Outcome::Checked { ok, a, b, margin } => {
                checked += 1;
                if !ok {
                    violations += 1;
                    first_bad.get_or_insert(i);
                }
                if worst.is_none_or(|w| margin < w.0) {
                    worst = Some((margin, i, a, b));
                }
            }
        }
    }
    let mut report = MetricReport::new(
        "quasi_symmetry_audit",
        if violations == 0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    )
    .param("eta_exponent", eta)
    .param("depth", depth)
    .param("triples", triples.len())
    .constant("checked", checked)
    .constant("degenerate", degenerate)
    .constant("violations", violations);
    if let Some((margin, i, a, b)) = worst {
        let margin = if margin.abs() < 1e-9 { 0.0 } else { margin };
        let (x, y, z) = &triples[i];
        report = report
            .constant("worst_log_margin", format!("{margin:.6}"))
            .constant("worst_exponents", format!("dv={a} dL={b}"))
            .constant("worst_triple", format!("{x} / {y} / {z}"));
    }
    if let Some(i) = first_bad {
        let (x, y, z) = &triples[i];
        report = report.witness(format!("violating triple {x} / {y} / {z}"));
    }
    Ok(report)
}

/// Checks that each coarse point has a distinct fine point within `p^-(d - margin)`,
/// `d` the coarse depth.
pub fn isolation_scan(
    coarse: &LimitSetSample,
    fine: &LimitSetSample,
    margin: usize,
) -> MetricReport {
    const NAME: &str = "isolation_scan";
    let d = coarse.depth();
    let base = MetricReport::new(NAME, Verdict::Pass)
        .param("coarse_depth", d)
        .param("fine_depth", fine.depth())
        .param("margin", margin);
    if fine.len() < 2 || coarse.is_empty() {
        return MetricReport {
            verdict: Verdict::NotApplicable,
            ..base
        }
        .witness("fewer than two points");
    }
    if fine.depth() <= d || fine.prime() != coarse.prime() || fine.precision() != coarse.precision()
    {
        return MetricReport {
            verdict: Verdict::NotApplicable,
            ..base
        }
        .witness("samples are not comparable");
    }
    let need = d.saturating_sub(margin);
    let k = fine.header().modulus();
    let mut worst = usize::MAX;
    let mut isolated = Vec::new();
    for x in coarse.points() {
        let best = fine
            .points()
            .iter()
            .map(|y| y.agreement(x))
            .filter(|&v| v < k)
            .max();
        match best {
            Some(v) if v >= need => worst = worst.min(v),
            _ => isolated.push(x),
        }
    }
    let mut report = base;
    if isolated.is_empty() {
        report = report.constant("min_neighbor_valuation", worst);
    } else {
        report.verdict = Verdict::Fail;
        for x in isolated {
            report = report.witness(format!("isolated {x}"));
        }
    }
    report
}

/// Checks that every coarse point is matched mod `p^d` by some fine point,
/// `d` the coarse dedup modulus.
pub fn closure_containment(coarse: &LimitSetSample, fine: &LimitSetSample) -> MetricReport {
    let d = coarse.header().modulus();
    let mut report = MetricReport::new("closure_containment", Verdict::Pass)
        .param("coarse_depth", coarse.depth())
        .param("fine_depth", fine.depth());
    if fine.depth() <= coarse.depth()
        || fine.prime() != coarse.prime()
        || fine.precision() != coarse.precision()
    {
        report.verdict = Verdict::NotApplicable;
        return report.witness("samples are not comparable");
    }
    let residues = fine.residues(d);
    let missing: Vec<&PadicInt> = coarse
        .points()
        .iter()
        .filter(|x| !residues.contains(&x.digits()[..d]))
        .collect();
    report = report.constant("matched", coarse.len() - missing.len());
    if !missing.is_empty() {
        report.verdict = Verdict::Fail;
        for x in missing {
            report = report.witness(format!("unmatched {x}"));
        }
    }
    report
}

/// Pairwise valuations; the diagonal holds the precision `K`.
pub fn distance_matrix(sample: &LimitSetSample, execution: Execution) -> Vec<Vec<usize>> {
    let pts = sample.points();
    execution.map_slice(pts, |x| pts.iter().map(|y| x.agreement(y)).collect())
}
