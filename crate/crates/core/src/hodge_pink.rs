//! The Hodge-Pink lattice Q_x = σ*η∘τ⁻¹(M⟦z−ζ⟧) of a point, its boundedness by ω, the
//! Hodge filtration Fil¹ as a point of P¹, and the period l₀·ζ^{l−k}·log_φ(h).
//!
//! Lattices are computed over B = F_q((ζ))[h]/(h^D) in the variable w = z − ζ. The generator
//! matrix is the limit of σ*η·τ⁻¹ over all levels: for a point with coordinates (k, l, h, n),
//!
//! G = [[w⁻¹ z^k / σℓ₋(z), 0], [−w⁻¹ z^l Σ_{i<n} h^{q^i}/∏_{m=1}^{i}(z − ζ^{q^m}), z^l]]
//!
//! with σℓ₋ = ∏_{i≥1}(1 − ζ^{q^i}/z) taken in full. Fil¹ is the line (wQ ∩ 𝔭)/w𝔭, read off
//! from the w⁻¹ coefficients of G.

use std::sync::Arc;

use thiserror::Error;

use crate::carlitz::log_eval;
use crate::fq::Fq;
use crate::matrix::{CheckStatus, Mat, MatSeries, MatrixError};
use crate::rigid::{PeriodRing, PeriodValue, ZetaLaurent};
use crate::series::{Center, Series, SeriesError};
use crate::shtuka::{classify, eta_nh, level_order, verify_point, FixedDatum, RZCoords, ShtukaError, ShtukaTriple};
use crate::trunc::TruncElem;

pub type BSeries = Series<PeriodValue>;
pub type BMat = Mat<PeriodValue>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HodgePinkError {
    #[error("degenerate lattice: {0}")]
    Degenerate(String),
    #[error("precision undecidable: {0}")]
    Undecidable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Shtuka(#[from] ShtukaError),
    #[error(transparent)]
    Matrix(MatrixError),
}

impl From<MatrixError> for HodgePinkError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::Series(SeriesError::Undecidable(s)) => HodgePinkError::Undecidable(s),
            e => HodgePinkError::Matrix(e),
        }
    }
}

impl From<SeriesError> for HodgePinkError {
    fn from(e: SeriesError) -> Self {
        MatrixError::Series(e).into()
    }
}

/// The z-isocrystal (F_q((z))^r, τ_D) with the boundedness datum ω.
#[derive(Debug, Clone)]
pub struct IsocrystalDatum {
    pub tau_d: MatSeries,
    pub omega: Vec<i64>,
}

impl IsocrystalDatum {
    /// τ_D = diag(z, 1), ω = (0, −1) = (−μ₂, −μ₁).
    pub fn standard(field: &Arc<Fq>) -> Self {
        let fixed = FixedDatum::standard(field);
        IsocrystalDatum { tau_d: fixed.b().clone(), omega: fixed.mu().iter().rev().map(|m| -m).collect() }
    }
    pub fn rank(&self) -> usize {
        self.tau_d.rank()
    }
}

/// A lattice Q ⊂ B((w))^r given by generator columns, with declared amplitude [d, e]:
/// w^{−d}𝔭 ⊆ Q ⊆ w^{−e}𝔭.
#[derive(Debug, Clone)]
pub struct HPLattice {
    pub gens: BMat,
    pub amplitude: (i64, i64),
}

/// Working precisions for [`compute_q_x_with`].
#[derive(Debug, Clone, Copy)]
pub struct QxOptions {
    /// Required ζ-precision of the w⁻¹ coefficients of G.
    pub zeta_prec: i64,
    /// Number of w-coefficients computed beyond w⁻¹.
    pub w_prec: i64,
}

impl Default for QxOptions {
    fn default() -> Self {
        QxOptions { zeta_prec: 32, w_prec: 6 }
    }
}

/// Coordinates of `t` if it is literally a universal point.
pub fn recognize_universal(t: &ShtukaTriple) -> Option<RZCoords> {
    let ring = t.ring();
    let tau = t.tau();
    if tau.prec().is_some() || t.eta().prec().is_some() {
        return None;
    }
    let h_series = tau.get(1, 0);
    let h = match h_series.term_count() {
        0 => TruncElem::zero(ring),
        1 => {
            let (e, c) = h_series.terms().next()?;
            (e == 0).then(|| c.clone())?
        }
        _ => return None,
    };
    if h.is_unit() {
        return None;
    }
    let r1 = crate::trunc::TruncRing::new(ring.field(), 1).ok()?;
    let eta_bar = t.eta().project(&r1).ok()?;
    let (i, j) = (eta_bar.get(0, 0).lo()?, eta_bar.get(1, 1).lo()?);
    let c = RZCoords::new(i, j, h, t.level()).ok()?;
    let u = crate::shtuka::make_universal_point(&c).ok()?;
    (u.tau().agrees_with(tau) && u.eta().agrees_with(t.eta())).then_some(c)
}

/// (ζ + w)^k to w-precision `wp`.
fn z_pow(ring: &Arc<PeriodRing>, k: i64, wp: i64) -> Result<BSeries, HodgePinkError> {
    let z = Series::from_terms(ring, Center::Zeta, [(0, PeriodValue::zeta_pow(ring, 1)), (1, PeriodValue::one(ring))], None);
    let base = if k >= 0 { z } else { z.inv_with(Some(wp))? };
    let mut out = Series::one(ring, Center::Zeta);
    for _ in 0..k.unsigned_abs() {
        out = out.mul(&base);
    }
    Ok(out)
}

/// (z − ζ^{q^m})⁻¹ = ((ζ − ζ^{q^m}) + w)⁻¹.
fn inv_linear(ring: &Arc<PeriodRing>, m: u32, wp: i64) -> Result<BSeries, HodgePinkError> {
    let q = ring.field().q();
    let a = PeriodValue::zeta_pow(ring, 1).sub(&PeriodValue::zeta_pow(ring, q.pow(m) as i64));
    Ok(Series::from_terms(ring, Center::Zeta, [(0, a), (1, PeriodValue::one(ring))], None).inv_with(Some(wp))?)
}

/// 1/σℓ₋(z) = ∏_{i≥1} (1 + ζ^{q^i}/(z − ζ^{q^i})), every factor that matters modulo ζ^work.
fn inv_sigma_ell_minus(ring: &Arc<PeriodRing>, wp: i64) -> Result<BSeries, HodgePinkError> {
    let q = ring.field().q() as i64;
    let work = ring.work_prec();
    let mut out = Series::one(ring, Center::Zeta);
    let mut i = 1u32;
    // The w^m coefficient of factor i has ζ-valuation q^i − 1 − m.
    while q.pow(i) - 1 - wp < work {
        let corr = inv_linear(ring, i, wp)?.scale(&PeriodValue::zeta_pow(ring, q.pow(i)));
        out = out.mul(&Series::one(ring, Center::Zeta).add(&corr));
        i += 1;
    }
    let tail = q.pow(i) - 1 - wp;
    Ok(out.map_coeffs(|c| c.with_prec(tail)))
}

/// The generator matrix of Q_x for a point with the given coordinates.
pub fn lattice_from_coords(field: &Arc<Fq>, c: &RZCoords, work: i64, wp: i64) -> Result<HPLattice, HodgePinkError> {
    let q = field.q();
    let d = level_order(q, c.n).ok_or_else(|| HodgePinkError::Unsupported("level too large".into()))?;
    let ring = PeriodRing::new(field, d, work);
    let h = PeriodValue::from_trunc(&ring, &c.h);
    let winv = Series::var_pow(&ring, -1, Center::Zeta);
    let zl = z_pow(&ring, c.j, wp)?;
    let g11 = winv.mul(&z_pow(&ring, c.i, wp)?).mul(&inv_sigma_ell_minus(&ring, wp)?);
    let mut sum = Series::zero(&ring, Center::Zeta);
    let mut denom = Series::one(&ring, Center::Zeta);
    let mut hq = h.clone();
    for i in 0..c.n {
        if i > 0 {
            denom = denom.mul(&inv_linear(&ring, i, wp)?);
            hq = hq.pow(q as u64);
        }
        sum = sum.add(&denom.scale(&hq));
    }
    let g21 = winv.mul(&zl).mul(&sum).neg();
    let gens = Mat::from_rows(vec![vec![g11, Series::zero(&ring, Center::Zeta)], vec![g21, zl]])?;
    Ok(HPLattice { gens: gens.with_prec(wp - 1), amplitude: (0, 1) })
}

/// Q_x for a verified point, with default working precision.
pub fn compute_q_x(t: &ShtukaTriple, fixed: &FixedDatum) -> Result<HPLattice, HodgePinkError> {
    compute_q_x_with(t, fixed, QxOptions::default())
}

/// Q_x for a verified point. The point's coordinates come from [`recognize_universal`] or,
/// failing that, [`classify`]; the ζ working precision is raised until the w⁻¹ coefficients
/// of G are known to `opts.zeta_prec`.
pub fn compute_q_x_with(t: &ShtukaTriple, fixed: &FixedDatum, opts: QxOptions) -> Result<HPLattice, HodgePinkError> {
    let rep = verify_point(t, fixed)?;
    if !rep.in_functor() {
        if rep.undecidable() {
            return Err(HodgePinkError::Undecidable("membership of the point".into()));
        }
        return Err(ShtukaError::NotInFunctor("point fails the shtuka identity or boundedness".into()).into());
    }
    let coords = match recognize_universal(t) {
        Some(c) => c,
        None => classify(t, fixed)?,
    };
    let field = t.ring().field();
    let wp = opts.w_prec.max(2);
    let mut work = opts.zeta_prec + wp + 2 * (coords.i.abs() + coords.j.abs()) + coords.n as i64 + 8;
    for _ in 0..6 {
        let lat = lattice_from_coords(field, &coords, work, wp)?;
        let got = lat.gens.entries().map(|s| s.coeff(-1).min_prec().unwrap_or(i64::MAX)).min().unwrap_or(i64::MAX);
        if got >= opts.zeta_prec {
            return Ok(lat);
        }
        work += work.max(opts.zeta_prec - got);
    }
    Err(HodgePinkError::Undecidable(format!("could not reach zeta precision {}", opts.zeta_prec)))
}

/// Order in w: `Ok(Some(e))` for the first coefficient known to be nonzero, `Ok(None)` for a
/// series that vanishes to its precision.
fn w_order(s: &BSeries) -> Result<Option<i64>, HodgePinkError> {
    for (e, c) in s.terms() {
        if c.parts().iter().any(|p| p.valuation().is_some()) {
            return Ok(Some(e));
        }
        return Err(HodgePinkError::Undecidable(format!("coefficient of w^{e} is zero only to finite zeta precision")));
    }
    Ok(None)
}

fn order_at_least(s: &BSeries, bound: i64) -> Result<bool, HodgePinkError> {
    Ok(match w_order(s)? {
        Some(e) => e >= bound,
        None => s.prec().is_none_or(|p| p >= bound),
    })
}

fn status(r: Result<bool, HodgePinkError>, fail: impl FnOnce() -> String) -> CheckStatus {
    match r {
        Ok(true) => CheckStatus::Pass,
        Ok(false) => CheckStatus::Fail(fail()),
        Err(e) => CheckStatus::Undecidable(e.to_string()),
    }
}

/// Outcome of [`check_bounded_omega`] for rank 2.
#[derive(Debug, Clone)]
pub struct OmegaReport {
    /// w^{ω₁}𝔭 ⊆ Q.
    pub lower_inclusion: CheckStatus,
    /// ∧²Q = w^{ω₁+ω₂}∧²𝔭, i.e. det G = w^{ω₁+ω₂}·unit.
    pub top_equality: CheckStatus,
    /// Q ⊆ w^{ω₂}𝔭 (equivalent to the first check given the second).
    pub upper_inclusion: CheckStatus,
    /// Q ≠ w^{ω₁}𝔭.
    pub proper_lower: CheckStatus,
    /// Q ≠ w^{ω₂}𝔭.
    pub proper_upper: CheckStatus,
}

impl OmegaReport {
    pub fn checks(&self) -> [(&'static str, &CheckStatus); 5] {
        [
            ("lower_inclusion", &self.lower_inclusion),
            ("top_equality", &self.top_equality),
            ("upper_inclusion", &self.upper_inclusion),
            ("proper_lower", &self.proper_lower),
            ("proper_upper", &self.proper_upper),
        ]
    }
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, s)| s.passed())
    }
}

/// Whether Q = w^c𝔭: w^{−c}G integral with det of order exactly 2c and unit leading part.
fn equals_scaled_standard(g: &BMat, det: &BSeries, c: i64) -> Result<bool, HodgePinkError> {
    for s in g.entries() {
        if !order_at_least(s, c)? {
            return Ok(false);
        }
    }
    Ok(w_order(det)? == Some(2 * c) && det.coeff(2 * c).is_unit())
}

/// Boundedness of Q by ω = (ω₁, ω₂), ω₁ ≥ ω₂.
pub fn check_bounded_omega(q: &HPLattice, omega: &[i64]) -> Result<OmegaReport, HodgePinkError> {
    let g = &q.gens;
    if g.rank() != 2 || omega.len() != 2 || omega[0] < omega[1] {
        return Err(HodgePinkError::Unsupported("boundedness is implemented for rank 2 and decreasing omega".into()));
    }
    let (w1, w2) = (omega[0], omega[1]);
    let det = g.det();
    let top = w1 + w2;
    let top_equality = status(w_order(&det).map(|o| o == Some(top) && det.coeff(top).is_unit()), || {
        format!("det G is not w^{top} times a unit (leading term {:?})", w_order(&det).ok().flatten())
    });
    let upper_inclusion = status(g.entries().try_fold(true, |acc, s| Ok::<_, HodgePinkError>(acc && order_at_least(s, w2)?)), || {
        format!("some generator has a pole of order > {}", -w2)
    });
    let lower_inclusion = match g.inv_with(g.prec()) {
        Ok(gi) => status(gi.entries().try_fold(true, |acc, s| Ok::<_, HodgePinkError>(acc && order_at_least(s, -w1)?)), || {
            format!("w^{w1} times the standard lattice is not contained in Q")
        }),
        Err(e) => CheckStatus::Fail(format!("generator matrix not invertible: {e}")),
    };
    let proper_lower = status(equals_scaled_standard(g, &det, w1).map(|b| !b), || format!("Q equals w^{w1} times the standard lattice"));
    let proper_upper = status(equals_scaled_standard(g, &det, w2).map(|b| !b), || format!("Q equals w^{w2} times the standard lattice"));
    Ok(OmegaReport { lower_inclusion, top_equality, upper_inclusion, proper_lower, proper_upper })
}

/// Which coordinate of a point of P¹ is normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    S0One,
    S1One,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::S0One => "s0=1",
            Chart::S1One => "s1=1",
        }
    }
}

/// A line in B², as the projective point [s0 : s1] in a chart.
#[derive(Debug, Clone)]
pub struct GrassLine {
    pub s0: PeriodValue,
    pub s1: PeriodValue,
    pub chart: Chart,
}

impl GrassLine {
    /// s1/s0 in the chart s0 = 1.
    pub fn slope(&self) -> Option<&PeriodValue> {
        (self.chart == Chart::S0One).then_some(&self.s1)
    }
    /// The free coordinate of the chart.
    pub fn coordinate(&self) -> &PeriodValue {
        match self.chart {
            Chart::S0One => &self.s1,
            Chart::S1One => &self.s0,
        }
    }
}

/// Fil¹ = (wQ ∩ 𝔭)/w𝔭 for 𝔭 ⊊ Q ⊊ w⁻¹𝔭: the column space of (wG) mod w.
pub fn fil1(q: &HPLattice) -> Result<GrassLine, HodgePinkError> {
    let g = &q.gens;
    if g.rank() != 2 {
        return Err(HodgePinkError::Unsupported("Fil^1 is implemented for rank 2".into()));
    }
    for s in g.entries() {
        if !order_at_least(s, -1)? {
            return Err(HodgePinkError::Degenerate("Q is not contained in w^-1 times the standard lattice".into()));
        }
        if s.prec().is_some_and(|p| p <= -1) {
            return Err(HodgePinkError::Undecidable("w^-1 coefficients are not known".into()));
        }
    }
    let c: Vec<Vec<PeriodValue>> = (0..2).map(|i| (0..2).map(|j| g.get(i, j).coeff(-1)).collect()).collect();
    let det0 = c[0][0].mul(&c[1][1]).sub(&c[0][1].mul(&c[1][0]));
    if det0.is_unit() {
        return Err(HodgePinkError::Degenerate("Q = w^-1 times the standard lattice".into()));
    }
    if det0.parts().iter().any(|p| p.valuation().is_some()) {
        return Err(HodgePinkError::Degenerate("(wQ ∩ p)/wp is not a line".into()));
    }
    for j in 0..2 {
        if c[0][j].is_unit() {
            let inv = c[0][j].inv().expect("unit");
            return Ok(GrassLine { s0: PeriodValue::one(c[0][j].ring()), s1: c[1][j].mul(&inv), chart: Chart::S0One });
        }
    }
    for j in 0..2 {
        if c[1][j].is_unit() {
            let inv = c[1][j].inv().expect("unit");
            return Ok(GrassLine { s0: c[0][j].mul(&inv), s1: PeriodValue::one(c[1][j].ring()), chart: Chart::S1One });
        }
    }
    Err(HodgePinkError::Degenerate("Q equals the standard lattice (Fil^1 vanishes)".into()))
}

/// l₀ = ∏_{i≥1} (1 − ζ^{q^i − 1}) modulo ζ^prec.
pub fn l_zero_laurent(field: &Arc<Fq>, prec: i64) -> ZetaLaurent {
    let q = field.q() as i64;
    let mut out = ZetaLaurent::one();
    let mut qi = q;
    while qi - 1 < prec {
        out = out.mul(&ZetaLaurent::one().sub(&ZetaLaurent::monomial(1, qi - 1), field), field);
        qi *= q;
    }
    out.with_prec(prec)
}

/// l₀·ζ^{l−k}·log_φ(h) in B with h-degree bound D, every h-part known modulo ζ^prec.
pub fn period(field: &Arc<Fq>, k: i64, l: i64, prec: i64, d: usize) -> PeriodValue {
    let q = field.q();
    let mut nmax = 0i64;
    while q.pow(nmax as u32 + 1) < d {
        nmax += 1;
    }
    let work = prec + (l - k).abs() + nmax + 1;
    let log = log_eval(field, work, d);
    let ring = log.ring().clone();
    let l0 = PeriodValue::constant(&ring, l_zero_laurent(field, work));
    l0.mul(&log).shift_zeta(l - k).with_prec(prec)
}

/// n(d) with q^{n(d)} ≤ d < q^{n(d)+1}: the pole order of log_φ at h^d.
fn clearing_exponent(q: usize, d: usize) -> i64 {
    let mut n = 0;
    while q.pow(n as u32 + 1) <= d {
        n += 1;
    }
    n
}

/// Compares a and b per h-monomial after multiplying the h^d part by ζ^{n(d)}, modulo ζ^prec.
pub fn compare_cleared(a: &PeriodValue, b: &PeriodValue, prec: i64) -> Result<(), String> {
    let f = a.ring().field().clone();
    let q = f.q();
    let dmax = a.parts().len().min(b.parts().len());
    for d in 1..dmax {
        let n = clearing_exponent(q, d);
        let x = a.part(d).shift(n);
        let y = b.part(d).shift(n);
        match x.agrees_mod(&y, prec, &f) {
            Some(true) => {}
            Some(false) => {
                let diff = x.sub(&y, &f);
                return Err(format!("h^{d}: first difference at zeta^{}", diff.valuation().unwrap_or(prec)));
            }
            None => return Err(format!("h^{d}: not known modulo zeta^{prec}")),
        }
    }
    match a.part(0).agrees_mod(b.part(0), prec, &f) {
        Some(true) => Ok(()),
        _ => Err("h^0 parts differ".into()),
    }
}

/// The full consistency check for a universal point: −slope(Fil¹(Q_x)) against the period.
pub fn period_consistency(field: &Arc<Fq>, c: &RZCoords, prec: i64) -> Result<(), String> {
    let t = crate::shtuka::make_universal_point(c).map_err(|e| e.to_string())?;
    let fixed = FixedDatum::standard(field);
    let extra = 2 * (c.i.abs() + c.j.abs()) + c.n as i64 + 2;
    let lat = compute_q_x_with(&t, &fixed, QxOptions { zeta_prec: prec + extra, w_prec: 6 }).map_err(|e| e.to_string())?;
    let line = fil1(&lat).map_err(|e| e.to_string())?;
    let slope = line.slope().ok_or("Fil^1 is not in the chart s0 = 1")?;
    let d = slope.ring().h_bound();
    let per = period(field, c.i, c.j, prec, d);
    compare_cleared(&slope.neg(), &per, prec)
}

/// η of a universal point with symbolic h, for tests that need the matrix alone.
pub fn universal_eta(c: &RZCoords) -> Result<MatSeries, HodgePinkError> {
    Ok(eta_nh(c.n, &c.h)?.shift_rows(&[c.i, c.j]))
}
