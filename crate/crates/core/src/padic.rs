//! Fixed-precision p-adic integers.
//!
//! A [`PadicInt`] stores the first `K` base-`p` digits of an element of `Z_p`,
//! little-endian, and every operation is exact arithmetic of residues modulo
//! `p^K`. Truncation to `K` digits is the only approximation anywhere in the
//! crate; error bounds are therefore always stated as "agrees mod `p^m`".

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Trial-division primality test; primes in this crate are small.
pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let n = n as u64;
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn check_prime(prime: u32) -> Result<()> {
    if is_prime(prime) {
        Ok(())
    } else {
        Err(Error::NotPrime(prime))
    }
}

/// Inverse of `a` modulo the prime `p`, for `a` not divisible by `p`.
fn inv_mod_prime(a: u32, p: u32) -> u32 {
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i64) as u32
}

/// An element of `Z_p` known to `K` digits: `sum d_i p^i mod p^K`.
///
/// Two values are only combined when prime and precision agree; the checked
/// methods report a mismatch, the operator impls panic on one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PadicInt {
    prime: u32,
    digits: Vec<u32>,
}

impl PadicInt {
    pub fn from_digits(prime: u32, digits: Vec<u32>) -> Result<Self> {
        check_prime(prime)?;
        if digits.is_empty() {
            return Err(Error::EmptyDigits);
        }
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d >= prime) {
            return Err(Error::DigitOutOfRange {
                digit,
                position,
                prime,
            });
        }
        Ok(PadicInt { prime, digits })
    }

    pub fn zero(prime: u32, precision: usize) -> Result<Self> {
        check_prime(prime)?;
        if precision == 0 {
            return Err(Error::InvalidPrecision);
        }
        Ok(PadicInt {
            prime,
            digits: vec![0; precision],
        })
    }

    pub fn one(prime: u32, precision: usize) -> Result<Self> {
        let mut x = Self::zero(prime, precision)?;
        x.digits[0] = 1;
        Ok(x)
    }

    /// Residue of an integer; negative values map to their representative mod `p^K`.
    pub fn from_i64(prime: u32, precision: usize, n: i64) -> Result<Self> {
        let mut x = Self::zero(prime, precision)?;
        let mut m = n.unsigned_abs();
        let p = prime as u64;
        for d in x.digits.iter_mut() {
            if m == 0 {
                break;
            }
            *d = (m % p) as u32;
            m /= p;
        }
        Ok(if n < 0 { x.neg() } else { x })
    }

    /// `num * den^(-1) mod p^K`; the denominator must be prime to `p`.
    pub fn from_rational(prime: u32, precision: usize, num: i64, den: i64) -> Result<Self> {
        check_prime(prime)?;
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        if den.rem_euclid(prime as i64) == 0 {
            return Err(Error::DenominatorDivisibleByP { den, prime });
        }
        let n = Self::from_i64(prime, precision, num)?;
        let d = Self::from_i64(prime, precision, den)?;
        Ok(&n * &d.inverse()?)
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    pub fn is_unit(&self) -> bool {
        self.digits[0] != 0
    }

    pub fn zero_like(&self) -> Self {
        PadicInt {
            prime: self.prime,
            digits: vec![0; self.digits.len()],
        }
    }

    pub fn one_like(&self) -> Self {
        let mut x = self.zero_like();
        x.digits[0] = 1;
        x
    }

    /// The integer `n` at the same prime and precision as `self`.
    pub fn int_like(&self, n: i64) -> Self {
        Self::from_i64(self.prime, self.precision(), n).expect("prime and precision already valid")
    }

    pub fn check_compatible(&self, other: &PadicInt) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch {
                left: self.prime,
                right: other.prime,
            });
        }
        if self.digits.len() != other.digits.len() {
            return Err(Error::PrecisionMismatch {
                left: self.digits.len(),
                right: other.digits.len(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &PadicInt) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn checked_sub(&self, other: &PadicInt) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn checked_mul(&self, other: &PadicInt) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn add_unchecked(&self, other: &PadicInt) -> Self {
        let p = self.prime as u64;
        let mut carry = 0u64;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .map(|(&a, &b)| {
                let t = a as u64 + b as u64 + carry;
                carry = t / p;
                (t % p) as u32
            })
            .collect();
        PadicInt {
            prime: self.prime,
            digits,
        }
    }

    fn mul_unchecked(&self, other: &PadicInt) -> Self {
        let k = self.digits.len();
        let p = self.prime as u128;
        let mut out = vec![0u32; k];
        for (i, &a) in self.digits.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let mut carry = 0u128;
            for (j, &b) in other.digits[..k - i].iter().enumerate() {
                let t = out[i + j] as u128 + a as u128 * b as u128 + carry;
                out[i + j] = (t % p) as u32;
                carry = t / p;
            }
        }
        PadicInt {
            prime: self.prime,
            digits: out,
        }
    }

    /// Additive inverse, `p^K - x`.
    pub fn neg(&self) -> Self {
        match self.digits.iter().position(|&d| d != 0) {
            None => self.clone(),
            Some(first) => {
                let p = self.prime;
                let digits = self
                    .digits
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| match i.cmp(&first) {
                        std::cmp::Ordering::Less => 0,
                        std::cmp::Ordering::Equal => p - d,
                        std::cmp::Ordering::Greater => p - 1 - d,
                    })
                    .collect();
                PadicInt { prime: p, digits }
            }
        }
    }

    pub fn valuation(&self) -> Valuation {
        let exponent = self
            .digits
            .iter()
            .position(|&d| d != 0)
            .unwrap_or(self.digits.len());
        Valuation {
            exponent,
            precision: self.digits.len(),
            prime: self.prime,
        }
    }

    /// Valuation of `self - other`: the length of the common low-digit prefix.
    pub fn distance_valuation(&self, other: &PadicInt) -> Result<Valuation> {
        self.check_compatible(other)?;
        Ok(Valuation {
            exponent: self.agreement(other),
            precision: self.digits.len(),
            prime: self.prime,
        })
    }

    pub(crate) fn agreement(&self, other: &PadicInt) -> usize {
        self.digits
            .iter()
            .zip(&other.digits)
            .position(|(a, b)| a != b)
            .unwrap_or(self.digits.len())
    }

    /// Splits `x = p^gamma * u` with `u` a unit; `u` keeps the `K - gamma` known digits.
    pub fn canonical_decompose(&self) -> Result<(usize, Vec<u32>)> {
        let v = self.valuation();
        if v.is_zero_at_precision() {
            return Err(Error::ZeroAtPrecision(self.precision()));
        }
        Ok((v.exponent, self.digits[v.exponent..].to_vec()))
    }

    /// True iff the first `k` digits agree, i.e. `|x - y|_p <= p^(-k)`.
    pub fn eq_mod(&self, other: &PadicInt, k: usize) -> Result<bool> {
        self.check_compatible(other)?;
        if k > self.precision() {
            return Err(Error::PrecisionMismatch {
                left: k,
                right: self.precision(),
            });
        }
        Ok(self.digits[..k] == other.digits[..k])
    }

    /// Multiplicative inverse of a unit by Newton lifting `y <- y (2 - x y)`.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit);
        }
        let mut y = self.zero_like();
        y.digits[0] = inv_mod_prime(self.digits[0], self.prime);
        let two = self.int_like(2);
        let mut correct = 1;
        while correct < self.precision() {
            let xy = self.mul_unchecked(&y);
            y = y.mul_unchecked(&two.add_unchecked(&xy.neg()));
            correct *= 2;
        }
        Ok(y)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// The residue mod `p^k`, kept at full precision with the higher digits cleared.
    pub fn truncated(&self, k: usize) -> Self {
        let mut x = self.clone();
        for d in x.digits.iter_mut().skip(k) {
            *d = 0;
        }
        x
    }

    /// Header-plus-digits text form, e.g. `"p=3 K=4\n0,1,2,0"`.
    pub fn to_text(&self) -> String {
        format!("p={} K={}\n{}", self.prime, self.precision(), self)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::parse(1, 1, "missing header"))?;
        let (prime, precision) = parse_header(header)?;
        let body = lines
            .next()
            .ok_or_else(|| Error::parse(2, 1, "missing digit line"))?;
        if lines.next().is_some() {
            return Err(Error::parse(3, 1, "trailing content"));
        }
        let x = parse_digits(prime, body).map_err(|e| relocate(e, 2))?;
        if x.precision() != precision {
            return Err(Error::parse(
                2,
                1,
                format!("header says K={precision}, found {} digits", x.precision()),
            ));
        }
        Ok(x)
    }
}

fn relocate(e: Error, line: usize) -> Error {
    match e {
        Error::Parse {
            column, message, ..
        } => Error::Parse {
            line,
            column,
            message,
        },
        other => other,
    }
}

fn parse_header(header: &str) -> Result<(u32, usize)> {
    let mut prime = None;
    let mut precision = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(1, 1, format!("malformed header field {field:?}")))?;
        let bad = || Error::parse(1, 1, format!("bad value in {field:?}"));
        match key {
            "p" => prime = Some(value.parse::<u32>().map_err(|_| bad())?),
            "K" => precision = Some(value.parse::<usize>().map_err(|_| bad())?),
            _ => return Err(Error::parse(1, 1, format!("unknown header field {key:?}"))),
        }
    }
    match (prime, precision) {
        (Some(p), Some(k)) => Ok((p, k)),
        _ => Err(Error::parse(1, 1, "header needs p= and K=")),
    }
}

/// Parses a little-endian comma-separated digit string such as `"0,1,2,0"`.
pub fn parse_digits(prime: u32, text: &str) -> Result<PadicInt> {
    let mut digits = Vec::new();
    let mut column = 1;
    for field in text.trim().split(',') {
        let d = field
            .trim()
            .parse::<u32>()
            .map_err(|_| Error::parse(1, column, format!("not a digit: {field:?}")))?;
        digits.push(d);
        column += field.len() + 1;
    }
    PadicInt::from_digits(prime, digits)
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.digits.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for PadicInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_text(s)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&PadicInt> for &PadicInt {
            type Output = PadicInt;

            fn $method(self, rhs: &PadicInt) -> PadicInt {
                if let Err(e) = self.check_compatible(rhs) {
                    panic!("incompatible p-adic operands: {e}");
                }
                $body(self, rhs)
            }
        }

        impl $trait<PadicInt> for PadicInt {
            type Output = PadicInt;

            fn $method(self, rhs: PadicInt) -> PadicInt {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&PadicInt> for PadicInt {
            type Output = PadicInt;

            fn $method(self, rhs: &PadicInt) -> PadicInt {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, |a: &PadicInt, b: &PadicInt| a.add_unchecked(b));
binop!(Sub, sub, |a: &PadicInt, b: &PadicInt| a
    .add_unchecked(&b.neg()));
binop!(Mul, mul, |a: &PadicInt, b: &PadicInt| a.mul_unchecked(b));

impl Neg for &PadicInt {
    type Output = PadicInt;

    fn neg(self) -> PadicInt {
        PadicInt::neg(self)
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;

    fn neg(self) -> PadicInt {
        PadicInt::neg(&self)
    }
}

/// The exponent `gamma` in `|x|_p = p^(-gamma)`.
///
/// A value that is zero at precision `K` reports exponent `K` and
/// [`is_zero_at_precision`](Self::is_zero_at_precision) returns true; the true
/// valuation is then only known to be `>= K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation {
    exponent: usize,
    precision: usize,
    prime: u32,
}

impl Valuation {
    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.exponent >= self.precision
    }

    pub fn norm(&self) -> Norm {
        Norm {
            prime: self.prime,
            exponent: -(self.exponent as i64),
            at_precision: self.is_zero_at_precision(),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_at_precision() {
            write!(f, ">={}", self.exponent)
        } else {
            write!(f, "{}", self.exponent)
        }
    }
}

/// Symbolic norm `p^exponent`; never converted to floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Norm {
    pub prime: u32,
    pub exponent: i64,
    /// Set when the norm is only an upper bound (the value vanished at precision).
    pub at_precision: bool,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.at_precision { "<=" } else { "" };
        write!(f, "{rel}{}^{}", self.prime, self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(p: u32, digits: &[u32]) -> PadicInt {
        PadicInt::from_digits(p, digits.to_vec()).unwrap()
    }

    #[test]
    fn from_digits_examples() {
        let zero = d(3, &[0, 0, 0, 0]);
        assert!(zero.is_zero());
        assert_eq!(zero.valuation().exponent(), 4);
        assert!(zero.valuation().is_zero_at_precision());
        assert_eq!(d(3, &[1, 0, 0, 0]), PadicInt::one(3, 4).unwrap());
        // 1 + 2 + 8
        assert_eq!(d(2, &[1, 1, 0, 1]), PadicInt::from_i64(2, 4, 11).unwrap());
    }

    #[test]
    fn from_digits_errors() {
        assert_eq!(
            PadicInt::from_digits(3, vec![0, 3]),
            Err(Error::DigitOutOfRange {
                digit: 3,
                position: 1,
                prime: 3
            })
        );
        assert_eq!(PadicInt::from_digits(4, vec![0]), Err(Error::NotPrime(4)));
        assert_eq!(PadicInt::from_digits(1, vec![0]), Err(Error::NotPrime(1)));
        assert_eq!(PadicInt::from_digits(3, vec![]), Err(Error::EmptyDigits));
    }

    #[test]
    fn from_rational_examples() {
        assert_eq!(
            PadicInt::from_rational(3, 4, 3, 4).unwrap().digits(),
            &[0, 1, 2, 0]
        );
        assert_eq!(
            PadicInt::from_rational(2, 4, 1, 3).unwrap().digits(),
            &[1, 1, 0, 1]
        );
        assert_eq!(
            PadicInt::from_rational(5, 3, 0, 7).unwrap().digits(),
            &[0, 0, 0]
        );
        assert_eq!(
            PadicInt::from_rational(3, 4, 1, 6),
            Err(Error::DenominatorDivisibleByP { den: 6, prime: 3 })
        );
        assert_eq!(
            PadicInt::from_rational(3, 4, 1, 0),
            Err(Error::ZeroDenominator)
        );
        // negative denominators go through the residue representative
        assert_eq!(
            PadicInt::from_rational(3, 4, -3, -4).unwrap(),
            PadicInt::from_rational(3, 4, 3, 4).unwrap()
        );
    }

    #[test]
    fn arithmetic_examples() {
        let one = d(3, &[1, 0, 0, 0]);
        let minus_two = d(3, &[1, 2, 2, 2]);
        assert_eq!((&one + &minus_two).digits(), &[2, 2, 2, 2]);
        let three = d(3, &[0, 1, 0, 0]);
        assert_eq!((&three * &three).digits(), &[0, 0, 1, 0]);
        assert!((&three + &-&three).is_zero());
        assert_eq!(&one - &three, PadicInt::from_i64(3, 4, -2).unwrap());
    }

    #[test]
    fn mismatches_are_reported() {
        let a = d(3, &[1, 0]);
        let b = d(3, &[1, 0, 0]);
        let c = d(5, &[1, 0]);
        assert_eq!(
            a.checked_add(&b),
            Err(Error::PrecisionMismatch { left: 2, right: 3 })
        );
        assert_eq!(
            a.checked_mul(&c),
            Err(Error::PrimeMismatch { left: 3, right: 5 })
        );
        assert!(a.eq_mod(&b, 1).is_err());
    }

    #[test]
    #[should_panic(expected = "incompatible")]
    fn operator_panics_on_mismatch() {
        let _ = d(3, &[1, 0]) + d(3, &[1, 0, 0]);
    }

    #[test]
    fn valuation_examples() {
        let v = d(3, &[0, 1, 2, 0]).valuation();
        assert_eq!(v.exponent(), 1);
        assert_eq!(v.norm().to_string(), "3^-1");
        assert_eq!(d(3, &[1, 0, 0, 0]).valuation().exponent(), 0);
        assert_eq!(d(3, &[0, 0, 0, 0]).valuation().to_string(), ">=4");
        assert_eq!(d(3, &[0, 0, 0, 0]).valuation().norm().to_string(), "<=3^-4");
    }

    #[test]
    fn canonical_decompose_examples() {
        assert_eq!(
            d(3, &[0, 1, 2, 0]).canonical_decompose().unwrap(),
            (1, vec![1, 2, 0])
        );
        assert_eq!(
            d(3, &[1, 0, 0, 0]).canonical_decompose().unwrap(),
            (0, vec![1, 0, 0, 0])
        );
        assert_eq!(
            d(3, &[0, 0, 2, 1]).canonical_decompose().unwrap(),
            (2, vec![2, 1])
        );
        assert_eq!(
            d(3, &[0, 0]).canonical_decompose(),
            Err(Error::ZeroAtPrecision(2))
        );
    }

    #[test]
    fn eq_mod_examples() {
        let x = d(3, &[0, 1, 2, 0]);
        let y = d(3, &[0, 1, 0, 0]);
        assert!(x.eq_mod(&x, 4).unwrap());
        assert!(x.eq_mod(&y, 2).unwrap());
        assert!(!x.eq_mod(&y, 3).unwrap());
        assert!(x.eq_mod(&d(3, &[2, 2, 2, 2]), 0).unwrap());
        assert!(x.eq_mod(&y, 5).is_err());
    }

    #[test]
    fn inverse_of_non_unit_fails() {
        assert_eq!(d(3, &[0, 1]).inverse(), Err(Error::NotUnit));
        let four = PadicInt::from_i64(3, 4, 4).unwrap();
        // inv(4) mod 81 = 61
        assert_eq!(
            four.inverse().unwrap(),
            PadicInt::from_i64(3, 4, 61).unwrap()
        );
    }

    #[test]
    fn text_form() {
        let x = d(3, &[0, 1, 2, 0]);
        assert_eq!(x.to_text(), "p=3 K=4\n0,1,2,0");
        assert_eq!(PadicInt::parse_text("p=3 K=4\n0,1,2,0").unwrap(), x);
        assert!(PadicInt::parse_text("p=3 K=5\n0,1,2,0").is_err());
        assert!(PadicInt::parse_text("p=3 K=4\n0,1,x,0").is_err());
        assert!(PadicInt::parse_text("p=3\n0,1,2,0").is_err());
    }

    #[test]
    fn primes() {
        let small: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(65_521));
        assert!(!is_prime(65_521 * 3));
    }

    #[test]
    fn large_prime_digits_do_not_overflow() {
        let p = 4_294_967_291; // largest prime below 2^32
        let x = PadicInt::from_digits(p, vec![p - 1, p - 1, p - 1]).unwrap();
        // x = -1, so x*x = 1
        assert_eq!((&x * &x).digits(), &[1, 0, 0]);
        assert!((&x + &x.one_like()).is_zero());
    }
}
