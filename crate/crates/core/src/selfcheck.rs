//! Seeded, deterministic invariant suites over a (q, n) grid.
//!
//! Every suite draws from its own ChaCha stream derived from the seed, q, n and the suite
//! name, so a run is reproducible bit for bit. With `sabotage` set, one coefficient of τ is
//! flipped before the universal-point checks, and the run must fail.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::carlitz::{exp_poly, log_poly, twisted_compose, TwistedPoly};
use crate::fq::Fq;
use crate::hodge_pink::{check_bounded_omega, compute_q_x_with, period_consistency, QxOptions};
use crate::matrix::MatSeries;
use crate::series::{ell_minus, l_zero, Center, Series, ZSeries};
use crate::shtuka::{
    classify, j_act, level_order, make_universal_point, random_integral_unit, twist_by_unit, verify_point, FixedDatum, RZCoords,
    ShtukaTriple,
};
use crate::trunc::{TruncElem, TruncRing};

#[derive(Debug, Clone)]
pub struct SelfcheckConfig {
    pub qs: Vec<u32>,
    pub levels: Vec<u32>,
    pub seed: u64,
    pub trials: usize,
    pub sabotage: bool,
}

impl Default for SelfcheckConfig {
    fn default() -> Self {
        SelfcheckConfig { qs: vec![2, 3], levels: vec![1, 2], seed: 0, trials: 10, sabotage: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub q: u32,
    pub n: u32,
    pub checks: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfcheckReport {
    pub seed: u64,
    pub sabotage: bool,
    pub results: Vec<SuiteResult>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.failure.is_none())
    }

    pub fn to_json(&self) -> Value {
        let results: Vec<Value> = self
            .results
            .iter()
            .map(|r| json!({"suite": r.suite, "q": r.q, "n": r.n, "checks": r.checks, "passed": r.failure.is_none(), "failure": r.failure}))
            .collect();
        json!({"seed": self.seed, "sabotage": self.sabotage, "passed": self.passed(), "results": results})
    }
}

type Outcome = Result<usize, String>;

struct Ctx {
    field: Arc<Fq>,
    ring: Arc<TruncRing>,
    level: u32,
    trials: usize,
    sabotage: bool,
}

const SUITES: [(&str, fn(&Ctx, &mut ChaCha8Rng) -> Outcome); 7] = [
    ("field", suite_field),
    ("trunc", suite_trunc),
    ("series", suite_series),
    ("universal", suite_universal),
    ("classify", suite_classify),
    ("carlitz", suite_carlitz),
    ("hodge_pink", suite_hodge_pink),
];

fn stream(seed: u64, q: u32, n: u32, suite: &str) -> ChaCha8Rng {
    // FNV-1a over the suite name keeps the derivation stable across platforms.
    let tag = suite.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag);
    rng.set_stream(((q as u64) << 32) | n as u64);
    rng
}

pub fn run(cfg: &SelfcheckConfig) -> SelfcheckReport {
    let mut results = Vec::new();
    for &q in &cfg.qs {
        for &n in &cfg.levels {
            let setup = Fq::of_size(q).map_err(|e| e.to_string()).and_then(|field| {
                let order = level_order(field.q(), n).ok_or_else(|| "ring order overflows".to_string())?;
                let ring = TruncRing::new(&field, order).map_err(|e| e.to_string())?;
                Ok(Ctx { field, ring, level: n, trials: cfg.trials.max(1), sabotage: cfg.sabotage })
            });
            for (name, suite) in SUITES {
                let outcome = match &setup {
                    Ok(ctx) => suite(ctx, &mut stream(cfg.seed, q, n, name)),
                    Err(e) => Err(e.clone()),
                };
                let (checks, failure) = match outcome {
                    Ok(c) => (c, None),
                    Err(e) => (0, Some(e)),
                };
                results.push(SuiteResult { suite: name, q, n, checks, failure });
            }
        }
    }
    SelfcheckReport { seed: cfg.seed, sabotage: cfg.sabotage, results }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite_field(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let f = &ctx.field;
    let q = f.q();
    for a in 0..q as u16 {
        ensure(f.pow(a, q as u64) == a, || format!("a^q != a for a = {a}"))?;
        if a != 0 {
            ensure(f.mul(a, f.inv(a).unwrap()) == 1, || format!("a * a^-1 != 1 for a = {a}"))?;
        }
    }
    for _ in 0..ctx.trials * 10 {
        let (a, b, c) = (f.random_raw(rng), f.random_raw(rng), f.random_raw(rng));
        ensure(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)), || format!("distributivity fails at {a}, {b}, {c}"))?;
        ensure(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), || format!("associativity fails at {a}, {b}, {c}"))?;
    }
    Ok(q + ctx.trials * 10)
}

fn suite_trunc(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let r = &ctx.ring;
    for _ in 0..ctx.trials {
        let a = TruncElem::random(r, rng);
        ensure(a.sigma() == a.pow(r.q() as u64), || format!("sigma differs from q-th power on {a}"))?;
        let u = TruncElem::random_unit(r, rng);
        let inv = u.inv().map_err(|e| e.to_string())?;
        ensure(u.mul(&inv) == TruncElem::one(r), || format!("inverse of {u} is wrong"))?;
    }
    Ok(2 * ctx.trials)
}

/// z^m·u plus nilpotent terms: invertible with an exact inverse.
fn random_invertible(r: &Arc<TruncRing>, rng: &mut ChaCha8Rng) -> ZSeries {
    let m = rng.gen_range(-3..=3);
    let mut f = Series::monomial(TruncElem::random_unit(r, rng), m, Center::Z);
    for _ in 0..3 {
        let c = TruncElem::random_sparse(r, rng, 1, 2);
        f = f.add(&Series::monomial(c, rng.gen_range(-4..=4), Center::Z));
    }
    f
}

fn suite_series(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let r = &ctx.ring;
    let one = Series::one(r, Center::Z);
    for _ in 0..ctx.trials {
        let f = random_invertible(r, rng);
        let g = f.inv().map_err(|e| e.to_string())?;
        ensure(f.mul(&g).agrees_with(&one), || format!("f * inv(f) != 1 for f = {f}"))?;
        ensure(f.recenter().mul(&g.recenter()).agrees_with(&Series::one(r, Center::Zeta)), || "recentered inverse fails".into())?;
    }
    let ell = ell_minus(r);
    let factor = one.sub(&Series::monomial(TruncElem::zeta(r), -1, Center::Z));
    ensure(ell.agrees_with(&factor.mul(&ell.sigma())), || "functional equation of ell_minus fails".into())?;
    let depth = (-ell.lo().unwrap_or(0)) as usize;
    let at_zeta = ell.sigma().eval_at_zeta(depth).map_err(|e| e.to_string())?;
    ensure(at_zeta == l_zero(at_zeta.ring()), || "sigma(ell_minus) at zeta differs from l_0".into())?;
    Ok(2 * ctx.trials + 2)
}

fn random_coords(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<RZCoords, String> {
    let h = TruncElem::random_sparse(&ctx.ring, rng, 1, 3);
    RZCoords::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2), h, ctx.level).map_err(|e| e.to_string())
}

/// Adds z to the off-diagonal entry τ₀₁, which is zero for every point of the functor.
fn sabotaged(t: &ShtukaTriple) -> Result<ShtukaTriple, String> {
    let mut tau: MatSeries = t.tau().clone();
    let bump = Series::monomial(TruncElem::one(t.ring()), 1, Center::Z);
    tau.set(0, 1, tau.get(0, 1).add(&bump));
    ShtukaTriple::new(t.ring(), t.level(), tau, t.eta().clone()).map_err(|e| e.to_string())
}

fn suite_universal(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let fixed = FixedDatum::standard(&ctx.field);
    for _ in 0..ctx.trials {
        let c = random_coords(ctx, rng)?;
        let mut t = make_universal_point(&c).map_err(|e| e.to_string())?;
        if ctx.sabotage {
            t = sabotaged(&t)?;
        }
        let rep = verify_point(&t, &fixed).map_err(|e| e.to_string())?;
        ensure(rep.all_passed(), || format!("universal point ({}, {}, {}) fails verification: {rep:?}", c.i, c.j, c.h))?;
    }
    Ok(ctx.trials)
}

fn suite_classify(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let fixed = FixedDatum::standard(&ctx.field);
    let r = &ctx.ring;
    for _ in 0..ctx.trials {
        let c = random_coords(ctx, rng)?;
        let (a, b) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
        let t = j_act(a, b, &make_universal_point(&c).map_err(|e| e.to_string())?);
        let k = random_integral_unit(r, rng, 2, 2);
        let tw = twist_by_unit(&t, &k, r.order() as i64 + 6).map_err(|e| e.to_string())?;
        let got = classify(&tw, &fixed).map_err(|e| e.to_string())?;
        let want = RZCoords { i: c.i + a, j: c.j + b, ..c };
        ensure(got == want, || format!("classify returned ({}, {}, {}) instead of ({}, {}, {})", got.i, got.j, got.h, want.i, want.j, want.h))?;
    }
    Ok(ctx.trials)
}

fn suite_carlitz(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Outcome {
    let t = ctx.level as usize + 2;
    let c = twisted_compose(&exp_poly(&ctx.field, t), &log_poly(&ctx.field, t), t);
    ensure(c == TwistedPoly::one(&ctx.field, t), || format!("exp . log != 1 modulo tau^{}", t + 1))?;
    let c = twisted_compose(&log_poly(&ctx.field, t), &exp_poly(&ctx.field, t), t);
    ensure(c == TwistedPoly::one(&ctx.field, t), || format!("log . exp != 1 modulo tau^{}", t + 1))?;
    Ok(2)
}

fn suite_hodge_pink(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Outcome {
    let fixed = FixedDatum::standard(&ctx.field);
    let trials = ctx.trials.min(3);
    for _ in 0..trials {
        let c = RZCoords::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2), TruncElem::h(&ctx.ring), ctx.level).map_err(|e| e.to_string())?;
        let t = make_universal_point(&c).map_err(|e| e.to_string())?;
        let lat = compute_q_x_with(&t, &fixed, QxOptions { zeta_prec: 10, w_prec: 4 }).map_err(|e| e.to_string())?;
        let rep = check_bounded_omega(&lat, &[0, -1]).map_err(|e| e.to_string())?;
        ensure(rep.passed(), || format!("Q_x for ({}, {}) is not bounded by (0, -1): {rep:?}", c.i, c.j))?;
        period_consistency(&ctx.field, &c, 10).map_err(|e| format!("period consistency at ({}, {}): {e}", c.i, c.j))?;
    }
    Ok(2 * trials)
}
