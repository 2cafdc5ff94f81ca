//! Residue arithmetic on plain integers, independent of the digit-vector code.
#![allow(dead_code)]

use zp_limits::PadicInt;

pub fn modulus(p: u32, k: usize) -> u128 {
    (p as u128).pow(k as u32)
}

pub fn to_int(x: &PadicInt) -> u128 {
    x.digits()
        .iter()
        .rev()
        .fold(0u128, |acc, &d| acc * x.prime() as u128 + d as u128)
}

pub fn from_int(p: u32, k: usize, mut v: u128) -> PadicInt {
    v %= modulus(p, k);
    let digits = (0..k)
        .map(|_| {
            let d = (v % p as u128) as u32;
            v /= p as u128;
            d
        })
        .collect();
    PadicInt::from_digits(p, digits).unwrap()
}

pub fn reduce(v: i128, m: u128) -> u128 {
    v.rem_euclid(m as i128) as u128
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Inverse of a unit mod `p^k` by Euler's theorem.
pub fn inv_mod(a: u128, p: u32, k: usize) -> u128 {
    let m = modulus(p, k);
    let phi = m / p as u128 * (p as u128 - 1);
    pow_mod(a, phi - 1, m)
}

/// `num / den mod p^k` for `p` not dividing `den`.
pub fn rational(p: u32, k: usize, num: i128, den: i128) -> u128 {
    let m = modulus(p, k);
    reduce(num, m) * inv_mod(reduce(den, m), p, k) % m
}

/// Exact fixed point of `f_{i1} o ... o f_{in}` for `f1 = px`, `f2 = px + 1 - p`, as a fraction.
pub fn px_fixed_point_fraction(p: u32, word: &[u32]) -> (i128, i128) {
    let p = p as i128;
    let num = word
        .iter()
        .enumerate()
        .map(|(k, &s)| if s == 2 { p.pow(k as u32) } else { 0 })
        .sum();
    let den = (0..word.len()).map(|k| p.pow(k as u32)).sum();
    (num, den)
}
