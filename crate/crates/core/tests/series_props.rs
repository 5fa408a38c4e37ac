use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shtuka_core::fq::Fq;
use shtuka_core::series::{binom_mod_p, ell_minus, l_zero, Center, Series, ZSeries};
use shtuka_core::trunc::{TruncElem, TruncRing};

fn ring(q: u32, n: usize) -> Arc<TruncRing> {
    TruncRing::new(&Fq::of_size(q).unwrap(), n).unwrap()
}

fn grid() -> impl Strategy<Value = (u32, usize)> {
    prop::sample::select(vec![(2, 2), (2, 4), (2, 8), (3, 3), (3, 9), (4, 4), (5, 5)])
}

/// An exact Laurent polynomial with random coefficients.
fn random_laurent(r: &Arc<TruncRing>, rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> ZSeries {
    let terms: Vec<(i64, TruncElem)> = (0..4).map(|_| (rng.gen_range(lo..=hi), TruncElem::random_sparse(r, rng, 0, 2))).collect();
    terms.into_iter().fold(Series::zero(r, Center::Z), |acc, (e, c)| acc.add(&Series::monomial(c, e, Center::Z)))
}

/// Unit monomial plus nilpotent terms: invertible with an exact inverse.
fn random_invertible(r: &Arc<TruncRing>, rng: &mut ChaCha8Rng) -> ZSeries {
    let mut f = Series::monomial(TruncElem::random_unit(r, rng), rng.gen_range(-3..=3), Center::Z);
    for _ in 0..3 {
        f = f.add(&Series::monomial(TruncElem::random_sparse(r, rng, 1, 2), rng.gen_range(-4..=4), Center::Z));
    }
    f
}

#[test]
fn ell_minus_valuations_up_to_27() {
    for (q, n) in [(2, 2), (2, 4), (2, 8), (2, 16), (3, 3), (3, 9), (3, 27)] {
        let r = ring(q, n);
        let ell = ell_minus(&r);
        assert!(ell.is_exact());
        for (e, a) in ell.terms() {
            let k = (-e) as u32;
            let want = ((q as u64).pow(k) - 1) / (q as u64 - 1);
            assert_eq!(a.valuation().finite(), Some(want as u32), "q={q} N={n} k={k}");
        }
        let factor = Series::one(&r, Center::Z).sub(&Series::monomial(TruncElem::zeta(&r), -1, Center::Z));
        assert!(ell.agrees_with(&factor.mul(&ell.sigma())));
        let depth = (-ell.lo().unwrap_or(0)) as usize;
        let v = ell.sigma().eval_at_zeta(depth).unwrap();
        assert_eq!(v, l_zero(v.ring()), "q={q} N={n}");
    }
}

#[test]
fn l_zero_example() {
    // (1 − ζ)(1 − ζ³) modulo ζ⁴
    let r = ring(2, 4);
    assert_eq!(l_zero(&r), TruncElem::from_raw_terms(&r, &[(0, 0, 1), (1, 0, 1), (3, 0, 1)]));
}

#[test]
fn inverse_with_precision_propagates() {
    let r = ring(3, 9);
    let f = Series::one(&r, Center::Z).add(&Series::var_pow(&r, 1, Center::Z)).add(&Series::monomial(TruncElem::h(&r), -2, Center::Z));
    let g = f.inv_with(Some(15)).unwrap();
    let prod = f.mul(&g);
    assert!(prod.agrees_with(&Series::one(&r, Center::Z)));
    assert!(prod.prec().unwrap() >= 15 + f.wmin().unwrap().min(0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn inverse_times_series_is_one((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_invertible(&r, &mut rng);
        let g = f.inv().unwrap();
        prop_assert!(g.is_exact());
        prop_assert!(f.mul(&g).agrees_with(&Series::one(&r, Center::Z)));
        prop_assert!(f.recenter().mul(&g.recenter()).agrees_with(&Series::one(&r, Center::Zeta)));
    }

    #[test]
    fn recenter_is_multiplicative((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_laurent(&r, &mut rng, -3, 3);
        let g = random_laurent(&r, &mut rng, -3, 3);
        prop_assert!(f.mul(&g).recenter().agrees_with(&f.recenter().mul(&g.recenter())));
        prop_assert!(f.add(&g).recenter().agrees_with(&f.recenter().add(&g.recenter())));
        prop_assert!(f.recenter().uncenter().agrees_with(&f));
    }

    #[test]
    fn sigma_is_multiplicative((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_laurent(&r, &mut rng, -3, 3);
        let g = random_laurent(&r, &mut rng, -3, 3);
        prop_assert!(f.mul(&g).sigma().agrees_with(&f.sigma().mul(&g.sigma())));
    }

    /// For a polynomial f, the w^m coefficient of recenter(f) is the Hasse derivative
    /// Σ_e C(e, m)·a_e·ζ^{e−m}.
    #[test]
    fn recenter_matches_hasse_derivatives((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_laurent(&r, &mut rng, 0, 5);
        let w = f.recenter();
        let p = r.field().p() as u64;
        for m in 0..=5i64 {
            let mut want = TruncElem::zero(&r);
            for (e, a) in f.terms() {
                if e >= m {
                    let b = binom_mod_p(e, m as u64, p) as i64;
                    want = want.add(&a.mul(&TruncElem::zeta_pow(&r, (e - m) as usize)).mul(&TruncElem::from_int(&r, b)));
                }
            }
            prop_assert_eq!(w.coeff(m), want, "m = {}", m);
        }
    }
}
