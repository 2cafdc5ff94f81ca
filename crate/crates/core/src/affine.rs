//! Affine contractions `x -> a x + b` on `Z_p` and their fixed points.
//!
//! A map is contractive exactly when `|a|_p <= 1/p`, i.e. `valuation(a) >= 1`;
//! then `|f(x) - f(y)|_p <= |x - y|_p / p` for every pair, `1 - a` is a unit and
//! the fixed point `b / (1 - a)` is computed in closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::padic::PadicInt;

/// Any self-map of `Z_p` at a fixed prime and precision.
pub trait PadicMap: Sync {
    fn prime(&self) -> u32;
    fn precision(&self) -> usize;
    fn apply(&self, x: &PadicInt) -> PadicInt;

    /// The multiplier when the map is affine; enables the analytic certificate.
    fn affine_multiplier(&self) -> Option<&PadicInt> {
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    a: PadicInt,
    b: PadicInt,
}

impl AffineMap {
    /// A certified contraction; isometries and expanding maps are rejected here.
    pub fn new(a: PadicInt, b: PadicInt) -> Result<Self> {
        let f = Self::uncertified(a, b)?;
        if f.is_contraction() {
            Ok(f)
        } else {
            Err(Error::NotContractive)
        }
    }

    /// Any affine map with compatible coefficients, contractive or not.
    pub fn uncertified(a: PadicInt, b: PadicInt) -> Result<Self> {
        a.check_compatible(&b)?;
        Ok(AffineMap { a, b })
    }

    /// Convenience constructor from rational coefficients `a = an/ad`, `b = bn/bd`.
    pub fn from_rationals(
        prime: u32,
        precision: usize,
        a: (i64, i64),
        b: (i64, i64),
    ) -> Result<Self> {
        Self::new(
            PadicInt::from_rational(prime, precision, a.0, a.1)?,
            PadicInt::from_rational(prime, precision, b.0, b.1)?,
        )
    }

    pub fn multiplier(&self) -> &PadicInt {
        &self.a
    }

    pub fn offset(&self) -> &PadicInt {
        &self.b
    }

    pub fn is_contraction(&self) -> bool {
        self.a.valuation().exponent() >= 1
    }

    pub fn apply(&self, x: &PadicInt) -> Result<PadicInt> {
        x.check_compatible(&self.a)?;
        Ok(&(&self.a * x) + &self.b)
    }

    /// `self ∘ inner`, i.e. `x -> a_f (a_g x + b_g) + b_f`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        self.a.check_compatible(&inner.a)?;
        Ok(AffineMap {
            a: &self.a * &inner.a,
            b: &(&self.a * &inner.b) + &self.b,
        })
    }

    /// `b (1 - a)^(-1) mod p^K`.
    pub fn fixed_point(&self) -> Result<PadicInt> {
        if !self.is_contraction() {
            return Err(Error::NotContractive);
        }
        let one_minus_a = &self.a.one_like() - &self.a;
        Ok(&self.b * &one_minus_a.inverse()?)
    }

    /// Banach iteration from `start` until two successive iterates agree mod `p^K`.
    ///
    /// Returns the limit and the number of map applications. For a certified
    /// contraction each step gains at least one digit, so `K + 1` applications
    /// always suffice.
    pub fn iterate_fixed_point(
        &self,
        start: &PadicInt,
        max_steps: usize,
    ) -> Result<(PadicInt, usize)> {
        let mut x = start.clone();
        for step in 1..=max_steps {
            let next = self.apply(&x)?;
            if next == x {
                return Ok((x, step));
            }
            x = next;
        }
        Err(Error::NoConvergence(max_steps))
    }
}

impl PadicMap for AffineMap {
    fn prime(&self) -> u32 {
        self.a.prime()
    }

    fn precision(&self) -> usize {
        self.a.precision()
    }

    fn apply(&self, x: &PadicInt) -> PadicInt {
        &(&self.a * x) + &self.b
    }

    fn affine_multiplier(&self) -> Option<&PadicInt> {
        Some(&self.a)
    }
}

/// Wraps a closure as a [`PadicMap`] so arbitrary maps can be certified by sampling.
pub struct FnMap<F> {
    prime: u32,
    precision: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&PadicInt) -> PadicInt + Sync,
{
    pub fn new(prime: u32, precision: usize, f: F) -> Self {
        FnMap {
            prime,
            precision,
            f,
        }
    }
}

impl<F> PadicMap for FnMap<F>
where
    F: Fn(&PadicInt) -> PadicInt + Sync,
{
    fn prime(&self) -> u32 {
        self.prime
    }

    fn precision(&self) -> usize {
        self.precision
    }

    fn apply(&self, x: &PadicInt) -> PadicInt {
        (self.f)(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyticVerdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateReport {
    pub analytic: AnalyticVerdict,
    pub sampled_pairs: usize,
    /// Smallest `valuation(f(x) - f(y)) - valuation(x - y)` seen over pairs whose
    /// image difference did not vanish at precision.
    pub worst_gain: Option<i64>,
    /// First sampled pair violating `|f(x) - f(y)|_p <= |x - y|_p / p`.
    pub witness: Option<(PadicInt, PadicInt)>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.analytic != AnalyticVerdict::Fail && self.witness.is_none()
    }
}

/// Draws a uniformly random element of `Z_p / p^K`.
pub fn random_padic<R: Rng>(rng: &mut R, prime: u32, precision: usize) -> PadicInt {
    let digits = (0..precision).map(|_| rng.random_range(0..prime)).collect();
    PadicInt::from_digits(prime, digits).expect("digits drawn in range")
}

/// Checks `|f(x) - f(y)|_p <= (1/p)|x - y|_p`, analytically for affine maps and
/// on `sample_count` seeded random pairs for every map.
///
/// The first pair tested is always `(1, 0)`.
pub fn certify_contraction(f: &dyn PadicMap, sample_count: usize, seed: u64) -> CertificateReport {
    let analytic = match f.affine_multiplier() {
        Some(a) if a.valuation().exponent() >= 1 => AnalyticVerdict::Pass,
        Some(_) => AnalyticVerdict::Fail,
        None => AnalyticVerdict::NotApplicable,
    };
    let (p, k) = (f.prime(), f.precision());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_gain: Option<i64> = None;
    let mut witness = None;
    for i in 0..sample_count {
        let (x, y) = if i == 0 {
            (PadicInt::one(p, k).unwrap(), PadicInt::zero(p, k).unwrap())
        } else {
            (random_padic(&mut rng, p, k), random_padic(&mut rng, p, k))
        };
        let dx = (&x - &y).valuation();
        if dx.is_zero_at_precision() {
            continue;
        }
        let df = (&f.apply(&x) - &f.apply(&y)).valuation();
        let required = (dx.exponent() + 1).min(k);
        if df.exponent() < required && witness.is_none() {
            witness = Some((x.clone(), y.clone()));
        }
        if !df.is_zero_at_precision() {
            let gain = df.exponent() as i64 - dx.exponent() as i64;
            worst_gain = Some(worst_gain.map_or(gain, |w| w.min(gain)));
        }
    }
    CertificateReport {
        analytic,
        sampled_pairs: sample_count,
        worst_gain,
        witness,
    }
}

/// `N >= 1` certified affine contractions sharing prime and precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionSystem {
    maps: Vec<AffineMap>,
}

impl ContractionSystem {
    pub fn new(maps: Vec<AffineMap>) -> Result<Self> {
        let first = maps.first().ok_or(Error::EmptySystem)?;
        for f in &maps {
            first.a.check_compatible(&f.a)?;
            if !f.is_contraction() {
                return Err(Error::NotContractive);
            }
        }
        Ok(ContractionSystem { maps })
    }

    pub fn prime(&self) -> u32 {
        self.maps[0].a.prime()
    }

    pub fn precision(&self) -> usize {
        self.maps[0].a.precision()
    }

    /// The alphabet size `N`.
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[AffineMap] {
        &self.maps
    }

    /// The map for a 1-based symbol.
    pub fn map(&self, symbol: u32) -> Result<&AffineMap> {
        symbol
            .checked_sub(1)
            .and_then(|i| self.maps.get(i as usize))
            .ok_or(Error::SymbolOutOfRange {
                symbol,
                alphabet: self.maps.len() as u32,
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> PadicInt {
        PadicInt::from_i64(3, 4, n).unwrap()
    }

    fn f1() -> AffineMap {
        AffineMap::new(int(3), int(0)).unwrap()
    }

    fn f2() -> AffineMap {
        AffineMap::new(int(3), int(-2)).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(f1().apply(&int(1)).unwrap().digits(), &[0, 1, 0, 0]);
        assert_eq!(f2().apply(&int(1)).unwrap(), int(1));
        assert_eq!(f2().apply(&int(0)).unwrap(), int(-2));
        let wrong = PadicInt::from_i64(3, 5, 1).unwrap();
        assert!(f1().apply(&wrong).is_err());
    }

    #[test]
    fn compose_examples() {
        let g = f1().compose(&f2()).unwrap();
        assert_eq!(g.multiplier(), &int(9));
        assert_eq!(g.offset(), &int(-6));
        let h = f1().compose(&f1()).unwrap();
        assert_eq!(h.multiplier(), &int(9));
        assert!(h.offset().is_zero());
        assert_eq!(h.multiplier().valuation().exponent(), 2);
    }

    #[test]
    fn identity_and_isometries_are_rejected() {
        assert_eq!(AffineMap::new(int(1), int(0)), Err(Error::NotContractive));
        assert_eq!(AffineMap::new(int(2), int(5)), Err(Error::NotContractive));
        let raw = AffineMap::uncertified(int(1), int(1)).unwrap();
        assert_eq!(raw.fixed_point(), Err(Error::NotContractive));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(f2().fixed_point().unwrap(), int(1));
        assert!(f1().fixed_point().unwrap().is_zero());
        let g = f1().compose(&f2()).unwrap();
        assert_eq!(g.fixed_point().unwrap().digits(), &[0, 1, 2, 0]);
    }

    #[test]
    fn banach_iteration_matches_closed_form() {
        let g = f2().compose(&f1()).unwrap().compose(&f2()).unwrap();
        let (x, steps) = g.iterate_fixed_point(&int(0), 16).unwrap();
        assert_eq!(x, g.fixed_point().unwrap());
        assert!(steps <= 4 + 1);
        assert_eq!(
            g.iterate_fixed_point(&int(0), 1),
            Err(Error::NoConvergence(1))
        );
    }

    #[test]
    fn certificates() {
        let r = certify_contraction(&f1(), 100, 7);
        assert_eq!(r.analytic, AnalyticVerdict::Pass);
        assert!(r.passed());
        assert!(r.worst_gain.unwrap() >= 1);

        let iso = AffineMap::uncertified(int(1), int(1)).unwrap();
        let r = certify_contraction(&iso, 10, 7);
        assert_eq!(r.analytic, AnalyticVerdict::Fail);
        assert!(!r.passed());

        let square = FnMap::new(3, 4, |x: &PadicInt| x * x);
        let r = certify_contraction(&square, 1000, 7);
        assert_eq!(r.analytic, AnalyticVerdict::NotApplicable);
        let (x, y) = r.witness.expect("x^2 is not a contraction");
        assert_eq!((x, y), (int(1), int(0)));
        assert_eq!(r.worst_gain, Some(0));
    }

    #[test]
    fn system_validation() {
        assert_eq!(ContractionSystem::new(vec![]), Err(Error::EmptySystem));
        let other = AffineMap::new(
            PadicInt::from_i64(3, 5, 3).unwrap(),
            PadicInt::from_i64(3, 5, 0).unwrap(),
        )
        .unwrap();
        assert!(ContractionSystem::new(vec![f1(), other]).is_err());
        let sys = ContractionSystem::new(vec![f1(), f2()]).unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.map(2).unwrap(), &f2());
        assert!(sys.map(0).is_err());
        assert!(sys.map(3).is_err());
    }
}
