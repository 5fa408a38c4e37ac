use std::sync::Arc;

use shtuka_core::carlitz::{d0, exp_poly, log_coeffs, log_eval, log_poly, phi, twisted_compose, FqPoly, RatZeta, TwistedPoly};
use shtuka_core::fq::Fq;

fn field(q: u32) -> Arc<Fq> {
    Fq::of_size(q).unwrap()
}

/// t, t² and t + 1 in F_q[t].
fn sample_polys(f: &Arc<Fq>) -> Vec<FqPoly> {
    let t = FqPoly::var(f);
    vec![t.clone(), t.mul(&t), t.add(&FqPoly::one(f))]
}

#[test]
fn compositions_are_inverse_up_to_tau_six() {
    for q in [2, 3] {
        let f = field(q);
        for t in 0..=5 {
            let one = TwistedPoly::one(&f, t);
            assert_eq!(twisted_compose(&exp_poly(&f, t), &log_poly(&f, t), t), one, "q={q} T={t}");
            assert_eq!(twisted_compose(&log_poly(&f, t), &exp_poly(&f, t), t), one, "q={q} T={t}");
        }
    }
}

#[test]
fn log_recursion() {
    for q in [2, 3, 4] {
        let f = field(q);
        let c = log_coeffs(&f, 8);
        for n in 1..=8usize {
            // (ζ^{q^n} − ζ)·c_n + c_{n−1} = 0
            let zq = RatZeta::zeta_pow(&f, (q as i64).pow(n as u32));
            let lhs = zq.sub(&RatZeta::zeta_pow(&f, 1)).mul(&c[n]).add(&c[n - 1]);
            assert!(lhs.is_zero(), "q={q} n={n}");
        }
    }
}

#[test]
fn log_table_for_q_two() {
    let f = field(2);
    let z = FqPoly::var(&f);
    let z2 = FqPoly::monomial(&f, 1, 2);
    let z4 = FqPoly::monomial(&f, 1, 4);
    let c = log_coeffs(&f, 2);
    assert_eq!(c[0], RatZeta::one(&f));
    assert_eq!(c[1], RatZeta::new(FqPoly::one(&f), z.sub(&z2)).unwrap());
    assert_eq!(c[2], RatZeta::new(FqPoly::one(&f), z.sub(&z2).mul(&z.sub(&z4))).unwrap());
    assert_eq!(log_coeffs(&f, 0), vec![RatZeta::one(&f)]);
}

#[test]
fn intertwining_relations() {
    const T: usize = 3;
    for q in [2, 3] {
        let f = field(q);
        for a in sample_polys(&f) {
            let pa = phi(&a);
            let da = TwistedPoly::constant(d0(&a), T);
            let lhs = twisted_compose(&da, &log_poly(&f, T), T);
            let rhs = twisted_compose(&log_poly(&f, T), &pa, T);
            assert_eq!(lhs, rhs, "log, q={q}, a={a:?}");
            let lhs = twisted_compose(&exp_poly(&f, T), &da, T);
            let rhs = twisted_compose(&pa, &exp_poly(&f, T), T);
            assert_eq!(lhs, rhs, "exp, q={q}, a={a:?}");
        }
    }
}

#[test]
fn phi_is_a_ring_map() {
    let f = field(3);
    let polys = sample_polys(&f);
    for a in &polys {
        for b in &polys {
            let t = a.degree().unwrap() + b.degree().unwrap();
            let lhs = phi(&a.mul(b)).with_truncation(t);
            let rhs = twisted_compose(&phi(a), &phi(b), t);
            assert_eq!(lhs, rhs);
            assert_eq!(phi(&a.add(b)).with_truncation(t), phi(a).with_truncation(t).add(&phi(b).with_truncation(t)));
        }
    }
}

/// The ζ-expansion of c_n in log_eval times the denominator of c_n is its numerator modulo ζ^P.
#[test]
fn log_eval_expansions_invert_the_denominators() {
    const P: i64 = 24;
    for q in [2, 3] {
        let f = field(q);
        let d = (q as usize).pow(3) + 1;
        let v = log_eval(&f, P, d);
        for (n, c) in log_coeffs(&f, 3).iter().enumerate() {
            let part = v.part((q as usize).pow(n as u32));
            let den = c.den().to_laurent();
            let prod = part.mul(&den, &f);
            let known = P + den.valuation().unwrap();
            assert_eq!(prod.agrees_mod(&c.num().to_laurent(), known, &f), Some(true), "q={q} n={n}");
            assert_eq!(part.valuation(), Some(-(n as i64)));
        }
        for deg in 2..d {
            if !(0..=3).any(|n| (q as usize).pow(n) == deg) {
                assert!(v.part(deg).is_known_zero(), "q={q} h^{deg}");
            }
        }
    }
}
