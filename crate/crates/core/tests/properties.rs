mod common;

use proptest::prelude::*;

use common::*;
use zp_limits::family::{concat_words, star_family};
use zp_limits::gallery::{flip_word, lambda_member, make_px_system, parity_family, XiMatrix};
use zp_limits::limit::{
    enumerate_lambda0_with, f_tilde, lambda0_point, limit_point, EnumerateOptions,
};
use zp_limits::metric::{common_prefix, pdist};
use zp_limits::{
    AffineMap, ContractionSystem, Execution, IndexFamily, LimitSetSample, PadicInt, SymbolWord,
};

const PRIMES: [u32; 5] = [2, 3, 5, 7, 13];

fn padic_pair() -> impl Strategy<Value = (PadicInt, PadicInt, PadicInt)> {
    (prop::sample::select(PRIMES.to_vec()), 1usize..12).prop_flat_map(|(p, k)| {
        let digits = prop::collection::vec(0..p, k);
        (digits.clone(), digits.clone(), digits).prop_map(move |(a, b, c)| {
            (
                PadicInt::from_digits(p, a).unwrap(),
                PadicInt::from_digits(p, b).unwrap(),
                PadicInt::from_digits(p, c).unwrap(),
            )
        })
    })
}

fn word(alphabet: u32, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SymbolWord> {
    prop::collection::vec(1..=alphabet, len)
        .prop_map(move |s| SymbolWord::finite(alphabet, s).unwrap())
}

fn periodic_word(alphabet: u32) -> impl Strategy<Value = SymbolWord> {
    (
        prop::collection::vec(1..=alphabet, 0..3),
        prop::collection::vec(1..=alphabet, 1..4),
    )
        .prop_map(move |(pre, tail)| SymbolWord::periodic(alphabet, pre, tail).unwrap())
}

fn parity_case() -> impl Strategy<Value = IndexFamily> {
    (1u32..=4).prop_map(|c| parity_family(&XiMatrix::case(c).unwrap()).unwrap())
}

/// Three contractions of `Z_5` with random coefficients and a 2x2 star family.
fn random_star_system() -> impl Strategy<Value = (ContractionSystem, IndexFamily)> {
    let k = 10;
    let coeff = prop::collection::vec(0u32..5, k);
    (
        prop::collection::vec((coeff.clone(), coeff), 3),
        prop::collection::vec(prop::collection::vec(1u32..=3, 2), 2),
    )
        .prop_filter_map("family must cover", move |(maps, table)| {
            let maps = maps
                .into_iter()
                .map(|(mut a, b)| {
                    a.insert(0, 0);
                    a.truncate(k);
                    AffineMap::new(
                        PadicInt::from_digits(5, a).unwrap(),
                        PadicInt::from_digits(5, b).unwrap(),
                    )
                    .unwrap()
                })
                .collect();
            let fam = star_family(&table, 3).ok()?;
            Some((ContractionSystem::new(maps).unwrap(), fam))
        })
}

proptest! {
    #[test]
    fn ring_laws((x, y, z) in padic_pair()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert!((&x + &-&x).is_zero());
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        prop_assert_eq!(&x * &x.one_like(), x);
    }

    #[test]
    fn arithmetic_agrees_with_integers((x, y, _z) in padic_pair()) {
        let m = modulus(x.prime(), x.precision());
        prop_assert_eq!(to_int(&(&x * &y)), to_int(&x) * to_int(&y) % m);
        prop_assert_eq!(to_int(&(&x + &y)), (to_int(&x) + to_int(&y)) % m);
    }

    #[test]
    fn strong_triangle((x, y, _z) in padic_pair()) {
        let (vx, vy, vs) = (x.valuation().exponent(), y.valuation().exponent(), (&x + &y).valuation().exponent());
        prop_assert!(vs >= vx.min(vy));
        if vx != vy {
            prop_assert_eq!(vs, vx.min(vy));
        }
    }

    #[test]
    fn valuation_is_multiplicative((x, y, _z) in padic_pair()) {
        let k = x.precision();
        let v = (&x * &y).valuation().exponent();
        prop_assert_eq!(v, (x.valuation().exponent() + y.valuation().exponent()).min(k));
    }

    #[test]
    fn units_invert((x, _y, _z) in padic_pair()) {
        if x.is_unit() {
            prop_assert_eq!(&x * &x.inverse().unwrap(), x.one_like());
        } else {
            prop_assert!(x.inverse().is_err());
        }
    }

    #[test]
    fn rationals_clear_denominators(p in prop::sample::select(PRIMES.to_vec()), k in 1usize..14, num in -10_000i64..10_000, den in 1i64..10_000) {
        prop_assume!(den % p as i64 != 0);
        let x = PadicInt::from_rational(p, k, num, den).unwrap();
        prop_assert_eq!(&x * &x.int_like(den), x.int_like(num));
    }

    #[test]
    fn decompose_round_trip((x, _y, _z) in padic_pair()) {
        match x.canonical_decompose() {
            Err(_) => prop_assert!(x.is_zero()),
            Ok((g, unit)) => {
                prop_assert!(unit[0] != 0);
                let mut digits = vec![0; g];
                digits.extend(unit);
                prop_assert_eq!(PadicInt::from_digits(x.prime(), digits).unwrap(), x);
            }
        }
    }

    #[test]
    fn text_round_trip((x, _y, _z) in padic_pair()) {
        prop_assert_eq!(PadicInt::parse_text(&x.to_text()).unwrap(), x.clone());
        prop_assert_eq!(x.to_string().split(',').count(), x.precision());
    }

    #[test]
    fn ultrametric_law((x, y, z) in padic_pair()) {
        let (xy, yz, xz) = (pdist(&x, &y).unwrap(), pdist(&y, &z).unwrap(), pdist(&x, &z).unwrap());
        prop_assert!(xz.exponent() >= xy.exponent().min(yz.exponent()));
        prop_assert_eq!(xy.exponent(), (&x - &y).valuation().exponent());
    }

    #[test]
    fn unconventional_maps_contract_by_p_to_the_n(fam in parity_case(), w in word(2, 1..=6), (x, y) in (prop::collection::vec(0u32..3, 12), prop::collection::vec(0u32..3, 12))) {
        let px = make_px_system(3, 12).unwrap();
        let (x, y) = (PadicInt::from_digits(3, x).unwrap(), PadicInt::from_digits(3, y).unwrap());
        let n = w.len().unwrap();
        let f = zp_limits::family::UnconventionalMap::build(px.system(), &fam, &w, n).unwrap();
        let dv = pdist(&f.apply(&x).unwrap(), &f.apply(&y).unwrap()).unwrap().exponent();
        prop_assert!(dv >= (pdist(&x, &y).unwrap().exponent() + n).min(12));
    }

    #[test]
    fn cauchy_rate(fam in parity_case(), w in word(2, 8..=8)) {
        let px = make_px_system(3, 12).unwrap();
        let pts: Vec<PadicInt> = (1..=8).map(|n| lambda0_point(px.system(), &fam, &w, n).unwrap()).collect();
        for m in 1..8 {
            for n in m + 1..=8 {
                prop_assert!(pts[n - 1].eq_mod(&pts[m - 1], m).unwrap());
            }
        }
    }

    #[test]
    fn nearby_words_give_nearby_points(fam in parity_case(), a in periodic_word(2), b in periodic_word(2)) {
        let px = make_px_system(3, 10).unwrap();
        let x = limit_point(px.system(), &fam, &a, 10).unwrap();
        let y = limit_point(px.system(), &fam, &b, 10).unwrap();
        let l = common_prefix(&a, &b).unwrap().unwrap_or(10).min(10);
        prop_assert!(x.value.eq_mod(&y.value, l).unwrap());
    }

    #[test]
    fn f_tilde_matches_joined_word(fam in parity_case(), alpha in word(2, 4..=4), n in 1usize..=4, beta in periodic_word(2), m in 1usize..=6) {
        let px = make_px_system(3, 12).unwrap();
        let lhs = f_tilde(px.system(), &fam, &alpha, n, &beta, m).unwrap();
        let joined = concat_words(&alpha, n, &beta).unwrap();
        let rhs = limit_point(px.system(), &fam, &joined, n + m).unwrap();
        prop_assert!(lhs.eq_mod(&rhs.value, (n + m).min(12)).unwrap());
    }

    #[test]
    fn f_tilde_on_general_star_systems((sys, fam) in random_star_system(), alpha in word(3, 3..=3), beta in word(3, 1..=5)) {
        let (n, m) = (alpha.len().unwrap(), beta.len().unwrap());
        let lhs = f_tilde(&sys, &fam, &alpha, n, &beta, m).unwrap();
        let rhs = limit_point(&sys, &fam, &concat_words(&alpha, n, &beta).unwrap(), n + m).unwrap();
        prop_assert!(lhs.eq_mod(&rhs.value, n + m).unwrap());
    }

    #[test]
    fn flip_is_an_involution(w in periodic_word(2)) {
        prop_assert_eq!(flip_word(&flip_word(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn membership_is_symmetric(digits in prop::collection::vec(0u32..3, 1..14)) {
        let x = PadicInt::from_digits(3, digits).unwrap();
        let y = &x.one_like() - &x;
        prop_assert_eq!(lambda_member(&x).member, lambda_member(&y).member);
    }

    #[test]
    fn samples_round_trip_and_ignore_strategy((sys, fam) in random_star_system(), depth in 1usize..=4) {
        let seq = EnumerateOptions { execution: Execution::Sequential, ..Default::default() };
        let par = EnumerateOptions { execution: Execution::Parallel, ..Default::default() };
        let a = enumerate_lambda0_with(&sys, &fam, depth, &seq).unwrap();
        prop_assert_eq!(&a, &enumerate_lambda0_with(&sys, &fam, depth, &par).unwrap());
        prop_assert_eq!(LimitSetSample::parse_text(&a.to_text()).unwrap(), a.clone());
        for pair in a.points().windows(2) {
            prop_assert!(!pair[0].eq_mod(&pair[1], depth.min(10)).unwrap());
        }
    }
}
