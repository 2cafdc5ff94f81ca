mod common;

use common::*;
use zp_limits::family::{compose_word, star_family};
use zp_limits::gallery::{
    case_image, closed_form_fp, flip_word, lambda_member, make_px_system, parity_family, XiMatrix,
};
use zp_limits::limit::{enumerate_lambda0, lambda0_point};
use zp_limits::metric::{diameter, pdist};
use zp_limits::{AffineMap, ContractionSystem, IndexFamily, PadicInt, SymbolWord};

#[test]
fn arithmetic_matches_integer_residues_exhaustively() {
    for (p, k) in [(2u32, 5usize), (3, 3), (5, 2)] {
        let m = modulus(p, k);
        for a in 0..m {
            for b in 0..m {
                let (x, y) = (from_int(p, k, a), from_int(p, k, b));
                assert_eq!(to_int(&(&x + &y)), (a + b) % m);
                assert_eq!(to_int(&(&x - &y)), (a + m - b) % m);
                assert_eq!(to_int(&(&x * &y)), a * b % m);
            }
            assert_eq!(to_int(&-&from_int(p, k, a)), (m - a) % m);
        }
    }
}

#[test]
fn rationals_match_euler_inverse() {
    for p in [2u32, 3, 5, 7, 11] {
        let k = 6;
        for num in -20i64..=20 {
            for den in 1i64..=30 {
                if den % p as i64 == 0 {
                    continue;
                }
                let x = PadicInt::from_rational(p, k, num, den).unwrap();
                assert_eq!(
                    to_int(&x),
                    rational(p, k, num as i128, den as i128),
                    "{num}/{den} p={p}"
                );
            }
        }
    }
}

#[test]
fn valuation_matches_divisibility() {
    let (p, k) = (3u32, 5usize);
    for a in 1..modulus(p, k) {
        let v = from_int(p, k, a).valuation().exponent();
        assert_eq!(a % (p as u128).pow(v as u32), 0);
        assert_ne!(a % (p as u128).pow(v as u32 + 1), 0);
    }
}

#[test]
fn closed_form_matches_fraction_oracle() {
    for p in [2u32, 3, 5] {
        let k = 10;
        let px = make_px_system(p, k).unwrap();
        for n in 1..=7 {
            for i in 0..1u128 << n {
                let w = SymbolWord::nth_of_length(2, n, i);
                let (num, den) = px_fixed_point_fraction(p, &w.unfold(n).unwrap());
                let expected = rational(p, k, num, den);
                assert_eq!(
                    to_int(&closed_form_fp(&px, &w, n).unwrap()),
                    expected,
                    "{w}"
                );
                let f = compose_word(px.system(), &w.unfold(n).unwrap()).unwrap();
                assert_eq!(to_int(&f.fixed_point().unwrap()), expected);
            }
        }
    }
}

#[test]
fn case_images_match_integer_polynomials() {
    let (p, k) = (5u32, 4usize);
    let m = modulus(p, k);
    for a in 0..m {
        let x = from_int(p, k, a);
        let one_minus = (m + 1 - a) % m;
        assert_eq!(to_int(&case_image(1, &x).unwrap()), 2 * a * a % m);
        assert_eq!(
            to_int(&case_image(2, &x).unwrap()),
            2 * a % m * one_minus % m
        );
        assert_eq!(
            to_int(&case_image(3, &x).unwrap()),
            (a * a + one_minus * one_minus) % m
        );
        assert_eq!(to_int(&case_image(4, &x).unwrap()), a);
    }
}

/// Digit patterns `p^g (1 + sum x_i p^i)` with `x_i` in `{0, p-1}`, truncated to `k` digits.
fn admissible_residues(p: u32, k: usize) -> std::collections::BTreeSet<Vec<u32>> {
    let mut out = std::collections::BTreeSet::new();
    out.insert(vec![0; k]);
    for g in 0..k {
        let free = k - g - 1;
        for bits in 0..1u32 << free {
            let mut digits = vec![0; k];
            digits[g] = 1;
            for i in 0..free {
                if bits >> i & 1 == 1 {
                    digits[g + 1 + i] = p - 1;
                }
            }
            out.insert(digits);
        }
    }
    out
}

#[test]
fn plain_sample_is_the_admissible_pattern_set() {
    for p in [3u32, 5, 7] {
        let px = make_px_system(p, 9).unwrap();
        for d in 1..=7 {
            let s = enumerate_lambda0(px.system(), &IndexFamily::identity(2), d).unwrap();
            assert_eq!(s.residues(d), admissible_residues(p, d), "p={p} d={d}");
            assert!(s.points().iter().all(|x| lambda_member(x).member));
        }
    }
}

#[test]
fn case_samples_match_image_sets() {
    let px = make_px_system(3, 9).unwrap();
    for c in 1..=4 {
        let fam = parity_family(&XiMatrix::case(c).unwrap()).unwrap();
        for d in 1..=5 {
            let lhs = enumerate_lambda0(px.system(), &fam, d).unwrap().residues(d);
            let plain = enumerate_lambda0(px.system(), &IndexFamily::identity(2), d).unwrap();
            let rhs: std::collections::BTreeSet<Vec<u32>> = plain
                .points()
                .iter()
                .map(|x| case_image(c, x).unwrap().digits()[..d].to_vec())
                .collect();
            assert_eq!(lhs, rhs, "case {c} depth {d}");
        }
    }
}

#[test]
fn flip_gives_one_minus() {
    let px = make_px_system(7, 8).unwrap();
    for n in 1..=6 {
        for i in 0..1u128 << n {
            let w = SymbolWord::nth_of_length(2, n, i);
            let x = to_int(&closed_form_fp(&px, &w, n).unwrap());
            let y = to_int(&closed_form_fp(&px, &flip_word(&w).unwrap(), n).unwrap());
            assert_eq!((x + y) % modulus(7, 8), 1);
        }
    }
}

#[test]
fn star_family_points_match_direct_sum_of_products() {
    // three maps over Z_5, one row of two star entries
    let p = 5;
    let k = 6;
    let maps = vec![
        AffineMap::from_rationals(p, k, (5, 1), (1, 1)).unwrap(),
        AffineMap::from_rationals(p, k, (10, 3), (2, 1)).unwrap(),
        AffineMap::from_rationals(p, k, (25, 1), (-1, 2)).unwrap(),
    ];
    let sys = ContractionSystem::new(maps.clone()).unwrap();
    let fam = star_family(&[vec![1, 2]], 3).unwrap();
    let m = modulus(p, k);
    let fixed = |word: &[u32]| {
        // fixed point of f_{w1} o ... o f_{wn} via integer composition
        let (mut a, mut b) = (1u128, 0u128);
        for &s in word.iter().rev() {
            let (fa, fb) = (
                to_int(maps[s as usize - 1].multiplier()),
                to_int(maps[s as usize - 1].offset()),
            );
            b = (fa * b + fb) % m;
            a = fa * a % m;
        }
        b * inv_mod((m + 1 - a) % m, p, k) % m
    };
    for n in 1..=3 {
        for i in 0..3u128.pow(n as u32) {
            let w = SymbolWord::nth_of_length(3, n, i);
            let symbols = w.unfold(n).unwrap();
            let shift =
                |l: u32| -> Vec<u32> { symbols.iter().map(|&s| (s + l - 1) % 3 + 1).collect() };
            let expected = fixed(&shift(1)) * fixed(&shift(2)) % m;
            assert_eq!(
                to_int(&lambda0_point(&sys, &fam, &w, n).unwrap()),
                expected,
                "{w}"
            );
        }
    }
}

#[test]
fn diameter_and_pdist_match_pairwise_scan() {
    let px = make_px_system(3, 8).unwrap();
    for c in 1..=4 {
        let fam = parity_family(&XiMatrix::case(c).unwrap()).unwrap();
        let s = enumerate_lambda0(px.system(), &fam, 5).unwrap();
        let mut best = usize::MAX;
        for x in s.points() {
            for y in s.points() {
                if x != y {
                    let v = to_int(&(x - y));
                    let direct = (0..8)
                        .take_while(|&i| v.is_multiple_of(3u128.pow(i + 1)))
                        .count();
                    assert_eq!(pdist(x, y).unwrap().exponent(), direct);
                    best = best.min(direct);
                }
            }
        }
        assert_eq!(diameter(&s).unwrap().exponent(), best);
    }
}
