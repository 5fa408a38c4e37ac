use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use shtuka_core::fq::Fq;
use shtuka_core::trunc::{TruncElem, TruncRing, Valuation};

fn ring(q: u32, n: usize) -> Arc<TruncRing> {
    TruncRing::new(&Fq::of_size(q).unwrap(), n).unwrap()
}

/// (q, N) pairs of the test grid.
fn grid() -> impl Strategy<Value = (u32, usize)> {
    prop::sample::select(vec![(2, 2), (2, 4), (2, 8), (3, 3), (3, 9), (4, 4), (4, 16), (5, 5), (5, 25)])
}

fn val(a: &TruncElem) -> Option<u32> {
    a.valuation().finite()
}

fn ge_opt(a: Option<u32>, b: Option<u32>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x >= y,
    }
}

#[test]
fn examples() {
    let r = ring(3, 4);
    let zeta = TruncElem::zeta(&r);
    let h = TruncElem::h(&r);
    assert_eq!(zeta.add(&h).mul(&zeta.sub(&h)), zeta.mul(&zeta).sub(&h.mul(&h)));
    assert_eq!(zeta.pow(4), TruncElem::zero(&r));
    assert_eq!(zeta.mul(&h).add(&h.pow(3)).valuation(), Valuation::Fin(2));
    assert_eq!(TruncElem::zero(&r).valuation(), Valuation::Inf);
    let u = TruncElem::one(&r).sub(&zeta);
    let expect = TruncElem::from_raw_terms(&r, &[(0, 0, 1), (1, 0, 1), (2, 0, 1), (3, 0, 1)]);
    assert_eq!(u.inv().unwrap(), expect);
    assert!(h.inv().is_err());
    let r2 = ring(2, 4);
    assert_eq!(TruncElem::zeta(&r2).add(&TruncElem::h(&r2)).sigma(), TruncElem::from_raw_terms(&r2, &[(2, 0, 1), (0, 2, 1)]));
}

#[test]
fn inverse_round_trip_500_per_ring() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (q, n) in [(2, 4), (2, 8), (3, 9), (4, 16), (5, 25)] {
        let r = ring(q, n);
        for _ in 0..500 {
            let u = TruncElem::random_unit(&r, &mut rng);
            assert_eq!(u.mul(&u.inv().unwrap()), TruncElem::one(&r), "q={q} N={n} u={u}");
        }
    }
}

#[test]
fn projection_and_lift() {
    let big = ring(3, 9);
    let small = ring(3, 3);
    let a = TruncElem::from_raw_terms(&big, &[(0, 0, 1), (1, 1, 2), (2, 3, 1)]);
    let p = a.project(&small).unwrap();
    assert_eq!(p, TruncElem::from_raw_terms(&small, &[(0, 0, 1), (1, 1, 2)]));
    assert_eq!(p.lift(&big).unwrap().project(&small).unwrap(), p);
    assert!(small.order() < big.order() && a.project(&ring(2, 3)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sigma_is_a_ring_endomorphism((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = TruncElem::random(&r, &mut rng);
        let b = TruncElem::random(&r, &mut rng);
        prop_assert_eq!(a.add(&b).sigma(), a.sigma().add(&b.sigma()));
        prop_assert_eq!(a.mul(&b).sigma(), a.sigma().mul(&b.sigma()));
    }

    #[test]
    fn sigma_matches_repeated_multiplication((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = TruncElem::random(&r, &mut rng);
        let mut prod = TruncElem::one(&r);
        for _ in 0..q {
            prod = prod.mul(&a);
        }
        prop_assert_eq!(a.sigma(), prod);
        prop_assert_eq!(a.sigma_pow(2), a.sigma().sigma());
    }

    #[test]
    fn valuation_inequalities((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = TruncElem::random_sparse(&r, &mut rng, 1, 3);
        let b = TruncElem::random_sparse(&r, &mut rng, 0, 3);
        let sum_v = match (val(&a), val(&b)) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        prop_assert!(ge_opt(val(&a.mul(&b)), sum_v));
        let min_v = match (val(&a), val(&b)) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        };
        prop_assert!(ge_opt(val(&a.add(&b)), min_v));
    }
}
