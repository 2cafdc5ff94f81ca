//! The two-map system `f1(x) = px`, `f2(x) = px + 1 - p` and its four parity families.
//!
//! Fixed points of compositions have the closed form
//! `x_{i1..in} = (d(i1) + d(i2) p + ... + d(in) p^(n-1)) / (1 + p + ... + p^(n-1))`
//! with `d(i) = 1` when `i = 2` and `0` otherwise. Flipping every symbol maps
//! `x` to `1 - x`.

use std::fmt;

use crate::affine::{AffineMap, ContractionSystem};
use crate::error::{Error, Result};
use crate::family::{IndexEntry, IndexFamily, IndexMap, SymbolWord};
use crate::limit::{enumerate_lambda0_with, EnumerateOptions, LimitSetSample};
use crate::padic::PadicInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PxSystem {
    system: ContractionSystem,
}

impl PxSystem {
    pub fn prime(&self) -> u32 {
        self.system.prime()
    }

    pub fn precision(&self) -> usize {
        self.system.precision()
    }

    pub fn system(&self) -> &ContractionSystem {
        &self.system
    }

    pub fn f1(&self) -> &AffineMap {
        &self.system.maps()[0]
    }

    pub fn f2(&self) -> &AffineMap {
        &self.system.maps()[1]
    }
}

pub fn make_px_system(prime: u32, precision: usize) -> Result<PxSystem> {
    let p = prime as i64;
    let system = ContractionSystem::new(vec![
        AffineMap::from_rationals(prime, precision, (p, 1), (0, 1))?,
        AffineMap::from_rationals(prime, precision, (p, 1), (1 - p, 1))?,
    ])?;
    Ok(PxSystem { system })
}

fn check_binary(word: &SymbolWord) -> Result<()> {
    if word.alphabet() != 2 {
        return Err(Error::AlphabetMismatch {
            expected: 2,
            found: word.alphabet(),
        });
    }
    Ok(())
}

/// Closed-form fixed point of `f_{i1} o ... o f_{in}`.
pub fn closed_form_fp(px: &PxSystem, word: &SymbolWord, n: usize) -> Result<PadicInt> {
    check_binary(word)?;
    if n == 0 {
        return Err(Error::EmptyWord);
    }
    let symbols = word.unfold(n)?;
    let (prime, k) = (px.prime(), px.precision());
    let numerator: Vec<u32> = (0..k)
        .map(|i| symbols.get(i).map_or(0, |&s| u32::from(s == 2)))
        .collect();
    let denominator: Vec<u32> = (0..k).map(|i| u32::from(i < n)).collect();
    let num = PadicInt::from_digits(prime, numerator)?;
    let den = PadicInt::from_digits(prime, denominator)?;
    Ok(&num * &den.inverse()?)
}

/// Outcome of the digit test for the limit set of the plain two-map system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub precision: usize,
    pub zero_at_precision: bool,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let not = if self.member { "" } else { "not " };
        write!(f, "{not}in Λ (at precision {})", self.precision)?;
        if self.zero_at_precision {
            f.write_str(" [zero at precision]")?;
        }
        Ok(())
    }
}

/// `x = p^g (1 + x1 p + x2 p^2 + ...)` with every `xi` in `{0, p - 1}`, decided on
/// the `K` known digits. Zero at precision counts as a member.
pub fn lambda_member(x: &PadicInt) -> Membership {
    let precision = x.precision();
    let Ok((_, unit)) = x.canonical_decompose() else {
        return Membership {
            member: true,
            precision,
            zero_at_precision: true,
        };
    };
    let top = x.prime() - 1;
    let member = unit[0] == 1 && unit[1..].iter().all(|&d| d == 0 || d == top);
    Membership {
        member,
        precision,
        zero_at_precision: false,
    }
}

/// A 2x2 matrix over `{1, 2}` acting on words by parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XiMatrix {
    entries: [[u32; 2]; 2],
}

impl XiMatrix {
    pub fn new(entries: [[u32; 2]; 2]) -> Result<Self> {
        if let Some(&bad) = entries.iter().flatten().find(|&&v| v != 1 && v != 2) {
            return Err(Error::EntryOutOfRange(bad));
        }
        Ok(XiMatrix { entries })
    }

    pub fn case(case: u32) -> Result<Self> {
        let entries = match case {
            1 => [[2, 2], [2, 2]],
            2 => [[2, 1], [2, 1]],
            3 => [[2, 2], [1, 1]],
            4 => [[2, 1], [1, 1]],
            _ => return Err(Error::InvalidCase(case)),
        };
        Ok(XiMatrix { entries })
    }

    pub fn entries(&self) -> [[u32; 2]; 2] {
        self.entries
    }

    /// Which of the four worked cases this matrix is, if any.
    pub fn case_tag(&self) -> Option<u32> {
        (1..=4).find(|&c| XiMatrix::case(c).is_ok_and(|m| m == *self))
    }
}

pub fn parity_family(matrix: &XiMatrix) -> Result<IndexFamily> {
    let entries = matrix
        .entries
        .iter()
        .map(|row| row.iter().map(|&v| IndexEntry::Parity(v)).collect())
        .collect();
    IndexFamily::new(2, entries)
}

/// `2x^2`, `2x(1 - x)`, `x^2 + (1 - x)^2` or `x` for cases 1 to 4.
pub fn case_image(case: u32, x: &PadicInt) -> Result<PadicInt> {
    let one_minus = &x.one_like() - x;
    let two = x.int_like(2);
    Ok(match case {
        1 => &two * &(x * x),
        2 => &two * &(x * &one_minus),
        3 => &(x * x) + &(&one_minus * &one_minus),
        4 => x.clone(),
        _ => return Err(Error::InvalidCase(case)),
    })
}

/// Swaps symbols 1 and 2.
pub fn flip_word(alpha: &SymbolWord) -> Result<SymbolWord> {
    check_binary(alpha)?;
    Ok(alpha.transform(&IndexMap::parity(1)?))
}

/// Depth-`depth` sample of the plain limit set (the 1x1 identity family).
pub fn lambda_sample(
    px: &PxSystem,
    depth: usize,
    options: &EnumerateOptions,
) -> Result<LimitSetSample> {
    enumerate_lambda0_with(px.system(), &IndexFamily::identity(2), depth, options)
}
