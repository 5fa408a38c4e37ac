use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shtuka_core::fq::Fq;
use shtuka_core::json;
use shtuka_core::matrix::MatSeries;
use shtuka_core::series::{Center, Series, ZSeries};
use shtuka_core::shtuka::{make_universal_point, random_integral_unit, twist_by_unit, RZCoords};
use shtuka_core::trunc::{TruncElem, TruncRing};

fn ring(q: u32, n: usize) -> Arc<TruncRing> {
    TruncRing::new(&Fq::of_size(q).unwrap(), n).unwrap()
}

fn random_series(r: &Arc<TruncRing>, rng: &mut ChaCha8Rng, center: Center) -> ZSeries {
    let s = (0..4).fold(Series::zero(r, center), |acc, _| {
        acc.add(&Series::monomial(TruncElem::random_sparse(r, rng, 0, 3), rng.gen_range(-3..=3), center))
    });
    if rng.gen_bool(0.5) {
        s.with_prec(rng.gen_range(0..12))
    } else {
        s
    }
}

#[test]
fn fields_round_trip() {
    for q in [2, 3, 4, 8, 9, 25] {
        let f = Fq::of_size(q).unwrap();
        let back = json::field_from(&json::field_params(&f)).unwrap();
        assert_eq!(back.q(), f.q());
        assert_eq!(json::field_params(&back), json::field_params(&f));
        for raw in 0..f.q() as u16 {
            assert_eq!(json::field_coeff_from(&f, &json::field_coeff(&f, raw)).unwrap(), raw);
        }
    }
    assert!(json::field_from(&serde_json::json!({"q": 6})).is_err());
}

#[test]
fn output_is_deterministic() {
    let r = ring(4, 16);
    let mut a = ChaCha8Rng::seed_from_u64(9);
    let mut b = ChaCha8Rng::seed_from_u64(9);
    let h = TruncElem::random_sparse(&r, &mut a, 1, 4);
    assert_eq!(h, TruncElem::random_sparse(&r, &mut b, 1, 4));
    let t = make_universal_point(&RZCoords::new(1, -2, h, 2).unwrap()).unwrap();
    let s1 = serde_json::to_string(&json::triple(&t)).unwrap();
    let s2 = serde_json::to_string(&json::triple(&t.clone())).unwrap();
    assert_eq!(s1, s2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn elements_and_series_round_trip(q in prop::sample::select(vec![2u32, 3, 4, 9]), n in 1usize..=9, seed in any::<u64>()) {
        let r = ring(q, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = TruncElem::random_sparse(&r, &mut rng, 0, 5);
        prop_assert_eq!(json::trunc_elem_from(&json::trunc_elem(&a), &r).unwrap(), a.clone());
        prop_assert_eq!(json::trunc_elem_standalone(&json::trunc_elem(&a)).unwrap(), a);
        for center in [Center::Z, Center::Zeta] {
            let s = random_series(&r, &mut rng, center);
            let back = json::series_from(&json::series(&s), &r).unwrap();
            prop_assert!(back.agrees_with(&s));
            prop_assert_eq!(back.prec(), s.prec());
            prop_assert_eq!(json::series(&back), json::series(&s));
        }
        let m = MatSeries::from_rows((0..2).map(|_| (0..2).map(|_| random_series(&r, &mut rng, Center::Z)).collect()).collect()).unwrap();
        let back = json::matrix_from(&json::matrix(&m), &r).unwrap();
        prop_assert!(back.agrees_with(&m));
    }

    #[test]
    fn twisted_triples_round_trip(q in prop::sample::select(vec![2u32, 3]), n in 0u32..=2, seed in any::<u64>()) {
        let r = ring(q, (q as usize).pow(n));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = RZCoords::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2), TruncElem::random_sparse(&r, &mut rng, 1, 3), n).unwrap();
        prop_assert_eq!(json::coords_from(&json::coords(&c)).unwrap(), c.clone());
        let t = make_universal_point(&c).unwrap();
        let k = random_integral_unit(&r, &mut rng, 2, 2);
        let tw = twist_by_unit(&t, &k, r.order() as i64 + 8).unwrap();
        let v = json::triple(&tw);
        let back = json::triple_from(&serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap()).unwrap();
        prop_assert!(back.tau().agrees_with(tw.tau()));
        prop_assert!(back.eta().agrees_with(tw.eta()));
        prop_assert_eq!(json::triple(&back), v);
    }
}
