use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shtuka_core::fq::Fq;
use shtuka_core::matrix::{check_bounded, MatSeries};
use shtuka_core::series::{Center, Series, ZSeries};
use shtuka_core::trunc::{TruncElem, TruncRing};

fn ring(q: u32, n: usize) -> Arc<TruncRing> {
    TruncRing::new(&Fq::of_size(q).unwrap(), n).unwrap()
}

fn random_entry(r: &Arc<TruncRing>, rng: &mut ChaCha8Rng) -> ZSeries {
    (0..3).fold(Series::zero(r, Center::Z), |acc, _| {
        acc.add(&Series::monomial(TruncElem::random_sparse(r, rng, 0, 2), rng.gen_range(-2..=2), Center::Z))
    })
}

fn random_matrix(r: &Arc<TruncRing>, rng: &mut ChaCha8Rng, size: usize) -> MatSeries {
    MatSeries::from_rows((0..size).map(|_| (0..size).map(|_| random_entry(r, rng)).collect()).collect()).unwrap()
}

fn grid() -> impl Strategy<Value = (u32, usize)> {
    prop::sample::select(vec![(2, 2), (2, 4), (3, 3), (4, 4), (5, 5)])
}

#[test]
fn bounded_examples() {
    let r = ring(3, 3);
    let z = Series::var_pow(&r, 1, Center::Z);
    let zeta = Series::constant(TruncElem::zeta(&r), Center::Z);
    let one = Series::one(&r, Center::Z);
    let zero = Series::zero(&r, Center::Z);
    let tau = MatSeries::from_rows(vec![vec![z.sub(&zeta), zero.clone()], vec![Series::constant(TruncElem::h(&r), Center::Z), one.clone()]]).unwrap();
    assert!(check_bounded(&tau, &[1, 0]).unwrap().passed());
    // det = (z − ζ)², not (z − ζ)·unit
    let sq = MatSeries::from_rows(vec![vec![z.sub(&zeta), zero.clone()], vec![zero, z.sub(&zeta)]]).unwrap();
    assert!(!check_bounded(&sq, &[1, 0]).unwrap().passed());
    assert!(check_bounded(&MatSeries::identity(&r, 2, Center::Z), &[0, 0]).unwrap().passed());
}

#[test]
fn divisibility_agrees_across_coordinates() {
    // (z − ζ)^k·g is divisible by (z − ζ)^k after recentering, and by no higher power when g(ζ)
    // is a unit; the same product assembled in w-coordinates gives the same answer.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (q, n) in [(2, 4), (3, 9), (5, 5)] {
        let r = ring(q, n);
        let lin = Series::var_pow(&r, 1, Center::Z).sub(&Series::constant(TruncElem::zeta(&r), Center::Z));
        for k in 0..4 {
            let g = Series::one(&r, Center::Z).add(&Series::monomial(TruncElem::random_sparse(&r, &mut rng, 1, 2), 1, Center::Z));
            let mut f = g.clone();
            for _ in 0..k {
                f = f.mul(&lin);
            }
            let fw = f.recenter();
            let built = g.recenter().mul(&Series::var_pow(&r, k, Center::Zeta));
            assert!(fw.agrees_with(&built));
            assert!(fw.divisible_by_var_pow(k).unwrap());
            assert!(!fw.divisible_by_var_pow(k + 1).unwrap());
            assert_eq!(built.divisible_by_var_pow(k + 1).unwrap(), false);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn det_and_sigma_are_multiplicative((q, n) in grid(), seed in any::<u64>(), size in 2usize..=3) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&r, &mut rng, size);
        let b = random_matrix(&r, &mut rng, size);
        let ab = a.mul(&b);
        prop_assert!(ab.det().agrees_with(&a.det().mul(&b.det())));
        prop_assert!(ab.sigma().agrees_with(&a.sigma().mul(&b.sigma())));
        prop_assert!(ab.recenter().agrees_with(&a.recenter().mul(&b.recenter())));
    }

    #[test]
    fn wedge_is_multiplicative((q, n) in grid(), seed in any::<u64>(), size in 2usize..=3) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&r, &mut rng, size);
        let b = random_matrix(&r, &mut rng, size);
        for i in 1..=size {
            let lhs = a.mul(&b).wedge(i).unwrap();
            let rhs = a.wedge(i).unwrap().mul(&b.wedge(i).unwrap());
            prop_assert!(lhs.agrees_with(&rhs), "wedge^{}", i);
        }
    }

    #[test]
    fn adjugate_gives_det((q, n) in grid(), seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&r, &mut rng, 3);
        let d = a.det();
        let prod = a.mul(&a.adjugate());
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { d.clone() } else { Series::zero(&r, Center::Z) };
                prop_assert!(prod.get(i, j).agrees_with(&want));
            }
        }
    }
}
