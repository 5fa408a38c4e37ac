//! Local GL₂-shtukas with quasi-isogeny to the fixed shtuka (F_q⟦z⟧², diag(z, 1)), the
//! universal Rapoport–Zink point, and the algorithm that recovers the canonical
//! coordinates (i, j, h) of an arbitrary point.
//!
//! A point over R_N (N = q^n) is a pair (τ, η) of 2×2 matrices over R_N((z)) with
//! τ = η⁻¹·b·σ*η and τ bounded by μ = (1, 0). Points are isomorphic when their η differ by
//! right multiplication with GL₂(R_N⟦z⟧). Every point is isomorphic to exactly one
//! `make_universal_point((i, j, h, n))`, and [`classify`] finds it.

use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::fq::Fq;
use crate::matrix::{check_bounded, BoundedReport, CheckStatus, MatSeries, MatrixError};
use crate::series::{Center, Series, SeriesError, ZSeries};
use crate::trunc::{TruncElem, TruncError, TruncRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShtukaError {
    #[error("level {level} needs N = q^level = {expected}, ring has N = {got}")]
    BadLevel { level: u32, expected: usize, got: usize },
    #[error("ring order {0} is not a power of q")]
    NotQPower(usize),
    #[error("h must lie in the nilradical (valuation at least 1)")]
    HNotInIdeal,
    #[error("point is not in the functor: {0}")]
    NotInFunctor(String),
    #[error("reduction violates the lattice conditions: {0}")]
    Lambda(String),
    #[error("normalization precondition violated: {0}")]
    Precondition(String),
    #[error("precision undecidable: {0}")]
    PrecisionUndecidable(String),
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Matrix(MatrixError),
    #[error(transparent)]
    Trunc(#[from] TruncError),
}

impl From<SeriesError> for ShtukaError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Undecidable(s) => ShtukaError::PrecisionUndecidable(s),
            e => ShtukaError::Matrix(MatrixError::Series(e)),
        }
    }
}

impl From<MatrixError> for ShtukaError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::Series(s) => s.into(),
            e => ShtukaError::Matrix(e),
        }
    }
}

/// The fixed shtuka: b over F_q((z)) and the bound μ.
#[derive(Debug, Clone)]
pub struct FixedDatum {
    b: MatSeries,
    mu: Vec<i64>,
}

impl FixedDatum {
    /// b = diag(z, 1), μ = (1, 0).
    pub fn standard(field: &Arc<Fq>) -> Self {
        let r1 = TruncRing::new(field, 1).expect("N = 1 is valid");
        FixedDatum { b: MatSeries::diag_pows(&r1, &[1, 0], Center::Z), mu: vec![1, 0] }
    }

    /// A custom datum; `b` must live over R_1 = F_q and be invertible, μ decreasing.
    pub fn new(b: MatSeries, mu: Vec<i64>) -> Result<Self, ShtukaError> {
        if b.ring().order() != 1 {
            return Err(ShtukaError::NotInFunctor("b must have coefficients in F_q".into()));
        }
        if mu.len() != b.rank() || mu.windows(2).any(|w| w[0] < w[1]) {
            return Err(ShtukaError::NotInFunctor("mu must be decreasing of length r".into()));
        }
        b.inv()?;
        Ok(FixedDatum { b, mu })
    }

    pub fn b(&self) -> &MatSeries {
        &self.b
    }
    pub fn mu(&self) -> &[i64] {
        &self.mu
    }
    /// b viewed over `ring`.
    pub fn b_over(&self, ring: &Arc<TruncRing>) -> MatSeries {
        self.b.lift(ring).expect("R_1 embeds into every R_N")
    }
    fn is_standard(&self) -> bool {
        let r1 = self.b.ring();
        self.mu == [1, 0] && self.b.agrees_with(&MatSeries::diag_pows(r1, &[1, 0], Center::Z)) && self.b.prec().is_none()
    }
}

/// A point (τ, η) over R_N with N = q^level.
#[derive(Debug, Clone)]
pub struct ShtukaTriple {
    ring: Arc<TruncRing>,
    level: u32,
    tau: MatSeries,
    eta: MatSeries,
}

pub fn level_order(q: usize, level: u32) -> Option<usize> {
    q.checked_pow(level)
}

impl ShtukaTriple {
    pub fn new(ring: &Arc<TruncRing>, level: u32, tau: MatSeries, eta: MatSeries) -> Result<Self, ShtukaError> {
        let expected = level_order(ring.q(), level).unwrap_or(usize::MAX);
        if expected != ring.order() {
            return Err(ShtukaError::BadLevel { level, expected, got: ring.order() });
        }
        for m in [&tau, &eta] {
            if m.rank() != 2 || m.center() != Center::Z || !crate::trunc::same_ring(m.ring(), ring) {
                return Err(ShtukaError::NotInFunctor("tau and eta must be 2x2 z-series over the ring".into()));
            }
        }
        Ok(ShtukaTriple { ring: ring.clone(), level, tau, eta })
    }
    pub fn ring(&self) -> &Arc<TruncRing> {
        &self.ring
    }
    pub fn level(&self) -> u32 {
        self.level
    }
    pub fn tau(&self) -> &MatSeries {
        &self.tau
    }
    pub fn eta(&self) -> &MatSeries {
        &self.eta
    }
}

/// Canonical coordinates of a point: component (i, j) and parameter h ∈ I at level n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RZCoords {
    pub i: i64,
    pub j: i64,
    pub h: TruncElem,
    pub n: u32,
}

impl RZCoords {
    /// Checks v(h) ≥ 1 and that h lives in R_{q^n}.
    pub fn new(i: i64, j: i64, h: TruncElem, n: u32) -> Result<Self, ShtukaError> {
        if h.is_unit() {
            return Err(ShtukaError::HNotInIdeal);
        }
        let expected = level_order(h.ring().q(), n).unwrap_or(usize::MAX);
        if h.ring().order() != expected {
            return Err(ShtukaError::BadLevel { level: n, expected, got: h.ring().order() });
        }
        Ok(RZCoords { i, j, h, n })
    }
}

fn zs(ring: &Arc<TruncRing>, e: i64) -> ZSeries {
    Series::var_pow(ring, e, Center::Z)
}
fn cst(c: TruncElem) -> ZSeries {
    Series::constant(c, Center::Z)
}

/// η_{n,h} = [[∏_{i<n} z/(z − ζ^{q^i}), 0], [−Σ_{i<n} h^{q^i}/((z − ζ)⋯(z − ζ^{q^i})), 1]],
/// exact in R_N.
pub fn eta_nh(n: u32, h: &TruncElem) -> Result<MatSeries, ShtukaError> {
    if h.is_unit() {
        return Err(ShtukaError::HNotInIdeal);
    }
    let ring = h.ring();
    let mut prod = zs(ring, 0);
    let mut denom = zs(ring, 0);
    let mut sum = Series::zero(ring, Center::Z);
    for i in 0..n {
        let zq = TruncElem::zeta(ring).sigma_pow(i);
        let inv = zs(ring, 1).sub(&cst(zq)).inv()?;
        prod = prod.mul(&zs(ring, 1)).mul(&inv);
        denom = denom.mul(&inv);
        sum = sum.add(&denom.scale(&h.sigma_pow(i)));
    }
    Ok(MatSeries::from_rows(vec![vec![prod, Series::zero(ring, Center::Z)], vec![sum.neg(), zs(ring, 0)]])?)
}

/// The universal point over R_{q^n}: τ = [[z − ζ, 0], [h, 1]], η = diag(z^i, z^j)·η_{n,h}.
pub fn make_universal_point(c: &RZCoords) -> Result<ShtukaTriple, ShtukaError> {
    let ring = c.h.ring();
    let tau = MatSeries::from_rows(vec![
        vec![zs(ring, 1).sub(&cst(TruncElem::zeta(ring))), Series::zero(ring, Center::Z)],
        vec![cst(c.h.clone()), zs(ring, 0)],
    ])?;
    let eta = eta_nh(c.n, &c.h)?.shift_rows(&[c.i, c.j]);
    ShtukaTriple::new(ring, c.n, tau, eta)
}

/// Outcome of [`verify_point`].
#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// η⁻¹·b·σ*η = τ.
    pub identity: CheckStatus,
    /// τ bounded by μ.
    pub bounded: BoundedReport,
    /// (τ, η) mod I equals (b, diag(z^i, z^j)) literally.
    pub reduction: CheckStatus,
    pub reduction_exps: Option<(i64, i64)>,
}

impl VerifyReport {
    /// Membership in the functor: conditions (a) and (b).
    pub fn in_functor(&self) -> bool {
        self.identity.passed() && self.bounded.passed()
    }
    pub fn all_passed(&self) -> bool {
        self.in_functor() && self.reduction.passed()
    }
    pub fn undecidable(&self) -> bool {
        matches!(self.identity, CheckStatus::Undecidable(_)) || self.bounded.undecidable()
    }
}

fn compare_to_precision(lhs: &MatSeries, rhs: &MatSeries, need: i64) -> CheckStatus {
    for (k, (a, b)) in lhs.entries().zip(rhs.entries()).enumerate() {
        match a.try_sub(b) {
            Ok(d) if !d.is_zero() => {
                let (e, c) = d.terms().next().unwrap();
                return CheckStatus::Fail(format!("entry {k}: residual {c} at z^{e}"));
            }
            Err(err) => return CheckStatus::Fail(err.to_string()),
            Ok(_) => {}
        }
    }
    let prec = lhs.entries().chain(rhs.entries()).filter_map(|s| s.prec()).min();
    match prec {
        Some(z) if z < need => CheckStatus::Undecidable(format!("identity holds only to weight {z} < {need}")),
        _ => CheckStatus::Pass,
    }
}

fn is_diag_monomial(m: &MatSeries) -> Option<(i64, i64)> {
    let one = |s: &ZSeries| -> Option<i64> {
        let mut t = s.terms();
        let (e, c) = t.next()?;
        (t.next().is_none() && *c == TruncElem::one(c.ring())).then_some(e)
    };
    (m.get(0, 1).is_zero() && m.get(1, 0).is_zero()).then_some(())?;
    Some((one(m.get(0, 0))?, one(m.get(1, 1))?))
}

/// τ_from(η) = η⁻¹·b·σ*η.
pub fn tau_from_eta(eta: &MatSeries, fixed: &FixedDatum) -> Result<MatSeries, ShtukaError> {
    let ring = eta.ring();
    let inv = eta.inv_with(eta.prec())?;
    let s = eta.sigma();
    let bs = if fixed.is_standard() { s.shift_rows(&[1, 0]) } else { fixed.b_over(ring).mul(&s) };
    Ok(inv.mul(&bs))
}

pub fn verify_point(t: &ShtukaTriple, fixed: &FixedDatum) -> Result<VerifyReport, ShtukaError> {
    let n = t.ring.order() as i64;
    let r1 = TruncRing::new(t.ring.field(), 1)?;
    // diag(z^i, z^j) commutes with b and is fixed by σ, so τ may be recomputed from the
    // stripped η, which avoids losing weight to the poles.
    let mut eta = t.eta.clone();
    if fixed.is_standard() {
        if let Ok(nf) = reduced_normal_form(&t.eta.project(&r1)?) {
            eta = eta.shift_rows(&[-nf.i, -nf.j]);
        }
    }
    let identity = match tau_from_eta(&eta, fixed) {
        Ok(lhs) => compare_to_precision(&lhs, &t.tau, n),
        Err(ShtukaError::PrecisionUndecidable(s)) => CheckStatus::Undecidable(s),
        Err(e) => CheckStatus::Fail(e.to_string()),
    };
    let bounded = check_bounded(&t.tau, &fixed.mu)?;
    let eta_bar = t.eta.project(&r1)?;
    let tau_bar = t.tau.project(&r1)?;
    let reduction_exps = is_diag_monomial(&eta_bar);
    let b_ok = tau_bar.agrees_with(&fixed.b) && tau_bar.prec().is_none_or(|z| z >= 2);
    let reduction = match (reduction_exps, b_ok) {
        (Some(_), true) => CheckStatus::Pass,
        (None, _) => CheckStatus::Fail("eta mod I is not of the form diag(z^i, z^j)".into()),
        (_, false) => CheckStatus::Fail("tau mod I differs from b".into()),
    };
    Ok(VerifyReport { identity, bounded, reduction, reduction_exps })
}

/// The J-action: η ↦ diag(z^a, z^b)·η, τ unchanged.
pub fn j_act(a: i64, b: i64, t: &ShtukaTriple) -> ShtukaTriple {
    ShtukaTriple { ring: t.ring.clone(), level: t.level, tau: t.tau.clone(), eta: t.eta.shift_rows(&[a, b]) }
}

/// Output of [`reduced_normal_form`]: g·P = diag(z^i, z^j)·k with k ∈ GL₂(F_q⟦z⟧) and P the
/// identity or the column swap.
#[derive(Debug, Clone)]
pub struct NormalForm {
    pub i: i64,
    pub j: i64,
    pub k: MatSeries,
    pub swapped: bool,
}

/// Order of a series over F_q: `Known(e)`, or `AtLeast(z)` when it vanishes to weight z
/// (z = i64::MAX for exact zero).
#[derive(Clone, Copy)]
enum Ord {
    Known(i64),
    AtLeast(i64),
}

fn order_of(s: &ZSeries) -> Ord {
    match s.lo() {
        Some(e) => Ord::Known(e),
        None => Ord::AtLeast(s.prec().unwrap_or(i64::MAX)),
    }
}

/// The smaller of two orders, if decidable at this precision.
fn min_order(a: Ord, b: Ord, what: &str) -> Result<(i64, bool), ShtukaError> {
    match (a, b) {
        (Ord::Known(x), Ord::Known(y)) => Ok(if x <= y { (x, false) } else { (y, true) }),
        (Ord::Known(x), Ord::AtLeast(z)) if x <= z => Ok((x, false)),
        (Ord::AtLeast(z), Ord::Known(y)) if y < z => Ok((y, true)),
        (Ord::AtLeast(i64::MAX), Ord::AtLeast(i64::MAX)) => Err(ShtukaError::Lambda(format!("{what} vanishes"))),
        _ => Err(ShtukaError::PrecisionUndecidable(format!("minimal order in {what} not determined"))),
    }
}

/// Normal form of g ∈ Λ(F_q) over F_q((z)) (a matrix over R_1): swap columns so that
/// ord α ≤ ord β, set m = ord α, n = min(ord γ, ord δ) and k = diag(z^{−m}, z^{−n})·g·P.
pub fn reduced_normal_form(g: &MatSeries) -> Result<NormalForm, ShtukaError> {
    if g.ring().order() != 1 || g.rank() != 2 {
        return Err(ShtukaError::Lambda("expected a 2x2 matrix over F_q((z))".into()));
    }
    let (m, swapped) = min_order(order_of(g.get(0, 0)), order_of(g.get(0, 1)), "first row")?;
    let gp = if swapped { g.swap_cols(0, 1) } else { g.clone() };
    let (n, _) = min_order(order_of(gp.get(1, 0)), order_of(gp.get(1, 1)), "second row")?;
    let k = gp.shift_rows(&[-m, -n]);
    let det = k.det();
    if k.entries().any(|e| e.lo().is_some_and(|x| x < 0)) || !det.coeff(0).is_unit() || det.lo().is_some_and(|x| x < 0) {
        return Err(ShtukaError::Lambda(format!("diag(z^{}, z^{})^-1 g is not in GL2(F_q[[z]])", m, n)));
    }
    Ok(NormalForm { i: m, j: n, k, swapped })
}

/// Result of one induction step.
#[derive(Debug, Clone)]
pub struct StepOutput {
    pub h_tilde: TruncElem,
    /// g = g₂·g₁ with η·g⁻¹ ≡ η_{n+1,h̃}.
    pub g: MatSeries,
    /// g⁻¹, assembled from the factors without a further inversion.
    pub g_inv: MatSeries,
}

/// One step n → n+1 of the normalization. `eta` lives over R_{q^{n+1}} with its diagonal
/// part already stripped, and `prior` holds the level-n parameter h (over R_{q^n}).
pub fn normalize_step(eta: &MatSeries, prior: &RZCoords) -> Result<StepOutput, ShtukaError> {
    let ring = eta.ring().clone();
    let q = ring.q();
    let n = prior.n;
    let np1 = level_order(q, n + 1).ok_or(ShtukaError::NotQPower(ring.order()))?;
    if ring.order() != np1 {
        return Err(ShtukaError::BadLevel { level: n + 1, expected: np1, got: ring.order() });
    }
    let need = np1 as i64;
    let low = prior.h.ring();
    let expected_low = eta_nh(n, &prior.h)?;
    let st = compare_to_precision(&eta.project(low)?, &expected_low, low.order() as i64);
    match st {
        CheckStatus::Pass => {}
        CheckStatus::Fail(s) => return Err(ShtukaError::Precondition(s)),
        CheckStatus::Undecidable(s) => return Err(ShtukaError::PrecisionUndecidable(s)),
    }

    let prec = eta.prec();
    let eta_inv = eta.inv_with(prec)?;
    let tau = eta_inv.mul(&eta.sigma().shift_rows(&[1, 0]));

    // Column 2 of τ is (b, 1 + d); boundedness makes both integral, so the lift that drops
    // negative z-powers changes nothing.
    let b = tau.get(0, 1).clone();
    let one_d = tau.get(1, 1).clone();
    for (s, what) in [(&b, "b"), (&one_d, "1+d")] {
        if s.lo().is_some_and(|e| e < 0) {
            return Err(ShtukaError::NotInFunctor(format!("{what} has a pole")));
        }
    }
    let one_d_inv = one_d.inv_with(prec)?;

    let det_w = tau.det().recenter();
    if !det_w.divisible_by_var_pow(1)? {
        return Err(ShtukaError::NotInFunctor("det tau not divisible by z - zeta".into()));
    }
    let u = det_w.shift(-1).uncenter();
    let u_inv = u.inv_with(prec)?;

    let zero = Series::zero(&ring, Center::Z);
    let g1 = MatSeries::from_rows(vec![vec![one_d.mul(&u_inv), b.mul(&u_inv).neg()], vec![zero.clone(), one_d_inv.clone()]])?;

    let (d0, d1) = one_d_inv.recenter().split_at_zeta()?;
    let (w0, w1) = tau.get(1, 0).recenter().split_at_zeta()?;
    let h_tilde = w0.mul(&d0);
    // Row 2 of g₂·g₁·τ is c₂·(z − ζ) + (1+d)⁻¹τ₂₁, which is the constant h̃ exactly when
    // c₂ = −(w₀d₁ + (1+d)⁻¹w₁).
    let c2 = d1.scale(&w0).add(&one_d_inv.recenter().mul(&w1)).neg().uncenter();
    let one = zs(&ring, 0);
    let g2 = MatSeries::from_rows(vec![vec![one.clone(), zero.clone()], vec![c2.clone(), one.clone()]])?;
    let g = g2.mul(&g1);
    let g1_inv = MatSeries::from_rows(vec![vec![u.mul(&one_d_inv), b], vec![zero.clone(), one_d]])?;
    let g2_inv = MatSeries::from_rows(vec![vec![one.clone(), zero], vec![c2.neg(), one]])?;
    let g_inv = g1_inv.mul(&g2_inv);

    let expected = eta_nh(n + 1, &h_tilde)?;
    match compare_to_precision(&eta.mul(&g_inv), &expected, need) {
        CheckStatus::Pass => {}
        CheckStatus::Fail(s) => return Err(ShtukaError::Internal(format!("normalized eta differs from eta_(n+1,h): {s}"))),
        CheckStatus::Undecidable(s) => return Err(ShtukaError::PrecisionUndecidable(s)),
    }
    if h_tilde.project(low)? != prior.h {
        return Err(ShtukaError::Internal("h_tilde does not lift the previous parameter".into()));
    }
    Ok(StepOutput { h_tilde, g, g_inv })
}

/// Working-precision policy for [`classify`].
#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    /// Extra weight beyond N used when truncating exact input.
    pub margin: i64,
    /// How often the margin is doubled after an undecidable result.
    pub retries: u32,
    /// Skip the membership check (the caller has verified the point).
    pub skip_verify: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { margin: 4, retries: 3, skip_verify: false }
    }
}

/// Canonical coordinates of a point.
pub fn classify(t: &ShtukaTriple, fixed: &FixedDatum) -> Result<RZCoords, ShtukaError> {
    classify_with(t, fixed, ClassifyOptions::default())
}

pub fn classify_with(t: &ShtukaTriple, fixed: &FixedDatum, opts: ClassifyOptions) -> Result<RZCoords, ShtukaError> {
    if !fixed.is_standard() {
        return Err(ShtukaError::NotInFunctor("classification is implemented for b = diag(z,1), mu = (1,0)".into()));
    }
    let exact = t.eta.prec().is_none() && t.tau.prec().is_none();
    let mut margin = opts.margin.max(1);
    let mut attempt = 0;
    loop {
        match classify_once(t, fixed, margin, opts.skip_verify) {
            Err(ShtukaError::PrecisionUndecidable(s)) if exact && attempt < opts.retries => {
                let _ = s;
                margin *= 2;
                attempt += 1;
            }
            r => return r,
        }
    }
}

fn classify_once(t: &ShtukaTriple, fixed: &FixedDatum, margin: i64, skip_verify: bool) -> Result<RZCoords, ShtukaError> {
    let ring = t.ring.clone();
    let big_n = ring.order() as i64;
    let r1 = TruncRing::new(ring.field(), 1)?;

    // Reduction mod I fixes (i, j), so exact input can be truncated row by row.
    let mut eta = t.eta.clone();
    let nf_probe = if eta.prec().is_none() {
        reduced_normal_form(&eta.project(&r1)?.with_prec(big_n + margin))?
    } else {
        reduced_normal_form(&eta.project(&r1)?)?
    };
    let work = big_n + margin;
    if eta.prec().is_none() {
        let (i, j) = (nf_probe.i, nf_probe.j);
        let mut m = eta.clone();
        for c in 0..2 {
            m.set(0, c, eta.get(0, c).with_prec(work + i));
            m.set(1, c, eta.get(1, c).with_prec(work + j));
        }
        eta = m;
    }
    let tri = ShtukaTriple { ring: ring.clone(), level: t.level, tau: if t.tau.prec().is_none() { t.tau.with_prec(work) } else { t.tau.clone() }, eta: eta.clone() };
    if !skip_verify {
        let rep = verify_point(&tri, fixed)?;
        if !rep.in_functor() {
            if rep.undecidable() && !rep.identity.detail().is_some_and(|_| matches!(rep.identity, CheckStatus::Fail(_))) {
                return Err(ShtukaError::PrecisionUndecidable("membership check".into()));
            }
            let why = rep.identity.detail().or(rep.bounded.det_unit.detail()).unwrap_or("boundedness").to_string();
            return Err(ShtukaError::NotInFunctor(why));
        }
    }

    let nf = reduced_normal_form(&eta.project(&r1)?)?;
    let target = nf.k.prec().unwrap_or(work);
    let k_inv = nf.k.inv_with(Some(target))?.lift(&ring)?;
    if nf.swapped {
        eta = eta.swap_cols(0, 1);
    }
    eta = eta.mul(&k_inv).shift_rows(&[-nf.i, -nf.j]);

    let q = ring.q();
    let m = t.level;
    let mut h = TruncElem::zero(&r1);
    for n in 0..m {
        let rn = TruncRing::new(ring.field(), level_order(q, n + 1).unwrap())?;
        let prior = RZCoords { i: 0, j: 0, h: h.clone(), n };
        let step = normalize_step(&eta.project(&rn)?, &prior)?;
        eta = eta.mul(&step.g_inv.lift(&ring)?);
        h = step.h_tilde;
    }
    Ok(RZCoords { i: nf.i, j: nf.j, h, n: m })
}

/// A random element of GL₂(R⟦z⟧): D·(1 + E), D a diagonal of random units of R and E
/// sparse, with constant coefficients in I and arbitrary coefficients at positive z-powers.
pub fn random_integral_unit<R: Rng + ?Sized>(ring: &Arc<TruncRing>, rng: &mut R, max_zdeg: i64, terms: usize) -> MatSeries {
    let mut rows = Vec::new();
    for i in 0..2 {
        let mut row = Vec::new();
        for j in 0..2 {
            let mut s = if i == j { zs(ring, 0) } else { Series::zero(ring, Center::Z) };
            for _ in 0..terms {
                let e = rng.gen_range(0..=max_zdeg);
                let min_deg = if e == 0 { 1 } else { 0 };
                let c = TruncElem::random_sparse(ring, rng, min_deg, 3);
                s = s.add(&Series::monomial(c, e, Center::Z));
            }
            row.push(s);
        }
        rows.push(row);
    }
    let e = MatSeries::from_rows(rows).expect("2x2");
    let d = MatSeries::diag(vec![cst(TruncElem::random_unit(ring, rng)), cst(TruncElem::random_unit(ring, rng))]).expect("2x2");
    d.mul(&e)
}

/// (τ, η) ↦ (k⁻¹τσ(k), η·k): an isomorphic point, computed to weight `prec` relative to the
/// diagonal of η mod I.
pub fn twist_by_unit(t: &ShtukaTriple, k: &MatSeries, prec: i64) -> Result<ShtukaTriple, ShtukaError> {
    let r1 = TruncRing::new(t.ring.field(), 1)?;
    let (i, j) = is_diag_monomial(&t.eta.project(&r1)?).ok_or_else(|| ShtukaError::NotInFunctor("eta mod I is not diagonal".into()))?;
    let stripped = t.eta.shift_rows(&[-i, -j]).with_prec(prec);
    let eta = stripped.mul(k).shift_rows(&[i, j]);
    let k_inv = k.inv_with(Some(prec))?;
    let tau = k_inv.mul(&t.tau.with_prec(prec)).mul(&k.sigma());
    ShtukaTriple::new(&t.ring, t.level, tau, eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(q: u32, n: usize) -> Arc<TruncRing> {
        TruncRing::new(&Fq::of_size(q).unwrap(), n).unwrap()
    }

    #[test]
    fn eta_examples() {
        let r = ring(3, 9);
        let h = TruncElem::h(&r);
        assert!(eta_nh(0, &h).unwrap().agrees_with(&MatSeries::identity(&r, 2, Center::Z)));
        let r2 = ring(2, 2);
        let e = eta_nh(1, &TruncElem::h(&r2)).unwrap();
        let z = |k| zs(&r2, k);
        assert!(e.get(0, 0).agrees_with(&z(0).add(&Series::monomial(TruncElem::zeta(&r2), -1, Center::Z))));
        assert!(e.get(1, 0).agrees_with(&Series::monomial(TruncElem::h(&r2), -1, Center::Z).neg()));
        assert_eq!(eta_nh(1, &TruncElem::one(&r2)).unwrap_err(), ShtukaError::HNotInIdeal);
    }

    #[test]
    fn universal_points_verify() {
        let fixed = FixedDatum::standard(&Fq::of_size(2).unwrap());
        let r = ring(2, 4);
        let c = RZCoords::new(1, -1, TruncElem::h(&r).add(&TruncElem::zeta(&r).mul(&TruncElem::h(&r))), 2).unwrap();
        let t = make_universal_point(&c).unwrap();
        let rep = verify_point(&t, &fixed).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        assert_eq!(rep.reduction_exps, Some((1, -1)));

        let bad = ShtukaTriple::new(&r, 2, t.tau().clone(), MatSeries::identity(&r, 2, Center::Z)).unwrap();
        assert!(!verify_point(&bad, &fixed).unwrap().identity.passed());
    }

    #[test]
    fn level_zero_point() {
        let r1 = ring(3, 1);
        let c = RZCoords::new(1, 2, TruncElem::zero(&r1), 0).unwrap();
        let t = make_universal_point(&c).unwrap();
        assert!(t.eta().agrees_with(&MatSeries::diag_pows(&r1, &[1, 2], Center::Z)));
        assert!(t.tau().agrees_with(&MatSeries::diag_pows(&r1, &[1, 0], Center::Z)));
    }

    #[test]
    fn normal_form_examples() {
        let r1 = ring(2, 1);
        let nf = reduced_normal_form(&MatSeries::diag_pows(&r1, &[3, -1], Center::Z)).unwrap();
        assert_eq!((nf.i, nf.j), (3, -1));
        assert!(nf.k.agrees_with(&MatSeries::identity(&r1, 2, Center::Z)));
        let nf = reduced_normal_form(&MatSeries::identity(&r1, 2, Center::Z)).unwrap();
        assert_eq!((nf.i, nf.j), (0, 0));
    }

    #[test]
    fn classify_round_trip_small() {
        let field = Fq::of_size(2).unwrap();
        let fixed = FixedDatum::standard(&field);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for level in 1..=2u32 {
            let r = TruncRing::new(&field, 2usize.pow(level)).unwrap();
            for _ in 0..5 {
                let h = TruncElem::random_sparse(&r, &mut rng, 1, 4);
                let c = RZCoords::new(rng.gen_range(-2..=2), rng.gen_range(-2..=2), h, level).unwrap();
                let t = make_universal_point(&c).unwrap();
                assert_eq!(classify(&t, &fixed).unwrap(), c);
                let k = random_integral_unit(&r, &mut rng, 2, 2);
                let tw = twist_by_unit(&t, &k, r.order() as i64 + 6).unwrap();
                assert_eq!(classify(&tw, &fixed).unwrap(), c);
            }
        }
    }
}
