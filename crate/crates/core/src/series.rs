//! Truncated Laurent series in z or in w = z − ζ.
//!
//! Precision is a weight bound. A term a·X^e has weight v(a) + e, where v is the
//! coefficient's valuation (the I-adic one over R_N, zero over fields). A series with
//! precision Z is known modulo the span of all terms of weight ≥ Z. Products satisfy
//! `Z_out = min(Z_f + wmin(g), Z_g + wmin(f))`, where wmin is the least weight present.
//! Recentering z = ζ + w and Frobenius both preserve weight, so neither loses precision.
//! Over R_N the coefficient of X^e is known modulo I^{Z−e}: fully known once Z − e ≥ N.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::trunc::{DenseAcc, TruncElem, TruncError, TruncRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series live over different coefficient rings")]
    RingMismatch,
    #[error("series use different centers")]
    CenterMismatch,
    #[error("series is not invertible (zero modulo the maximal ideal)")]
    NotInvertible,
    #[error("precision too low to decide: {0}")]
    Undecidable(String),
    #[error("inverse of an exact series is infinite; a target precision is required")]
    NeedPrecision,
    #[error("series has a principal part")]
    PrincipalPart,
    #[error("coefficient of z^{0} is not divisible by zeta^{1}")]
    NotDivisible(i64, i64),
    #[error(transparent)]
    Trunc(#[from] TruncError),
}

/// Coefficient rings for [`Series`]: commutative local rings whose maximal ideal is
/// nilpotent, with a weight (valuation) compatible with multiplication.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display {
    type Ring: fmt::Debug;
    type Acc;

    fn ring(&self) -> &Arc<Self::Ring>;
    fn same_ring(a: &Arc<Self::Ring>, b: &Arc<Self::Ring>) -> bool;
    fn zero(ring: &Arc<Self::Ring>) -> Self;
    fn one(ring: &Arc<Self::Ring>) -> Self;
    fn from_int(ring: &Arc<Self::Ring>, n: i64) -> Self;
    /// True only for elements that are zero with no precision information attached.
    fn is_zero(&self) -> bool;
    /// Least weight of a monomial present; `i64::MAX` for zero.
    fn weight(&self) -> i64;
    fn is_unit(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Drops everything of weight ≥ `cap`.
    fn truncate_weight(&self, cap: i64) -> Self;
    fn inv_unit(&self) -> Option<Self>;
    /// Every element of the maximal ideal raised to this power vanishes.
    fn nilpotency(ring: &Arc<Self::Ring>) -> usize;
    fn new_acc(ring: &Arc<Self::Ring>) -> Self::Acc;
    /// Adds the part of `a·b` of weight below `cap`.
    fn acc_mul_add(acc: &mut Self::Acc, ring: &Arc<Self::Ring>, a: &Self, b: &Self, cap: i64);
    fn acc_take(acc: &mut Self::Acc, ring: &Arc<Self::Ring>) -> Self;
}

fn cap_usize(cap: i64) -> usize {
    cap.clamp(0, i64::from(u32::MAX)) as usize
}

impl Coeff for TruncElem {
    type Ring = TruncRing;
    type Acc = DenseAcc;

    fn ring(&self) -> &Arc<TruncRing> {
        TruncElem::ring(self)
    }
    fn same_ring(a: &Arc<TruncRing>, b: &Arc<TruncRing>) -> bool {
        crate::trunc::same_ring(a, b)
    }
    fn zero(ring: &Arc<TruncRing>) -> Self {
        TruncElem::zero(ring)
    }
    fn one(ring: &Arc<TruncRing>) -> Self {
        TruncElem::one(ring)
    }
    fn from_int(ring: &Arc<TruncRing>, n: i64) -> Self {
        TruncElem::from_int(ring, n)
    }
    fn is_zero(&self) -> bool {
        TruncElem::is_zero(self)
    }
    fn weight(&self) -> i64 {
        TruncElem::weight(self)
    }
    fn is_unit(&self) -> bool {
        TruncElem::is_unit(self)
    }
    fn add(&self, o: &Self) -> Self {
        TruncElem::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        TruncElem::sub(self, o)
    }
    fn neg(&self) -> Self {
        TruncElem::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        TruncElem::mul(self, o)
    }
    fn truncate_weight(&self, cap: i64) -> Self {
        self.truncate(cap_usize(cap))
    }
    fn inv_unit(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn nilpotency(ring: &Arc<TruncRing>) -> usize {
        ring.order()
    }
    fn new_acc(ring: &Arc<TruncRing>) -> DenseAcc {
        DenseAcc::new(ring)
    }
    fn acc_mul_add(acc: &mut DenseAcc, ring: &Arc<TruncRing>, a: &Self, b: &Self, cap: i64) {
        acc.mul_add(ring, a, b, cap_usize(cap));
    }
    fn acc_take(acc: &mut DenseAcc, ring: &Arc<TruncRing>) -> Self {
        acc.take(ring)
    }
}

/// Which variable the exponents refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Center {
    /// Powers of z.
    Z,
    /// Powers of w = z − ζ.
    Zeta,
}

impl Center {
    pub fn name(self) -> &'static str {
        match self {
            Center::Z => "z",
            Center::Zeta => "z-zeta",
        }
    }
    pub fn parse(s: &str) -> Option<Center> {
        match s {
            "z" => Some(Center::Z),
            "z-zeta" => Some(Center::Zeta),
            _ => None,
        }
    }
}

/// A Laurent series with finitely many stored terms and a weight precision
/// (`None` means the stored terms are the exact value).
pub struct Series<C: Coeff> {
    ring: Arc<C::Ring>,
    center: Center,
    terms: BTreeMap<i64, C>,
    prec: Option<i64>,
}

impl<C: Coeff> Clone for Series<C> {
    fn clone(&self) -> Self {
        Series { ring: self.ring.clone(), center: self.center, terms: self.terms.clone(), prec: self.prec }
    }
}

/// Laurent series in z over R_N.
pub type ZSeries = Series<TruncElem>;
/// Laurent series in z − ζ over R_N.
pub type ZetaSeries = Series<TruncElem>;

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl<C: Coeff> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let var = match self.center {
            Center::Z => "z",
            Center::Zeta => "w",
        };
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if *e != 0 {
                write!(f, "*{var}^{e}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(z) = self.prec {
            write!(f, " + O(wt {z})")?;
        }
        Ok(())
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero(ring: &Arc<C::Ring>, center: Center) -> Self {
        Series { ring: ring.clone(), center, terms: BTreeMap::new(), prec: None }
    }
    pub fn one(ring: &Arc<C::Ring>, center: Center) -> Self {
        Self::monomial(C::one(ring), 0, center)
    }
    pub fn constant(c: C, center: Center) -> Self {
        Self::monomial(c, 0, center)
    }
    /// c·X^e, exact.
    pub fn monomial(c: C, e: i64, center: Center) -> Self {
        let mut s = Self::zero(c.ring(), center);
        if !c.is_zero() {
            s.terms.insert(e, c);
        }
        s
    }
    /// X^e, exact.
    pub fn var_pow(ring: &Arc<C::Ring>, e: i64, center: Center) -> Self {
        Self::monomial(C::one(ring), e, center)
    }
    pub fn from_terms(ring: &Arc<C::Ring>, center: Center, terms: impl IntoIterator<Item = (i64, C)>, prec: Option<i64>) -> Self {
        let mut s = Self::zero(ring, center);
        for (e, c) in terms {
            let cur = s.terms.remove(&e).unwrap_or_else(|| C::zero(ring));
            let v = cur.add(&c);
            if !v.is_zero() {
                s.terms.insert(e, v);
            }
        }
        s.prec = prec;
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(z) = self.prec {
            let terms = std::mem::take(&mut self.terms);
            for (e, c) in terms {
                let c = c.truncate_weight(z.saturating_sub(e));
                if !c.is_zero() {
                    self.terms.insert(e, c);
                }
            }
        } else {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn ring(&self) -> &Arc<C::Ring> {
        &self.ring
    }
    pub fn center(&self) -> Center {
        self.center
    }
    /// Weight precision; `None` when exact.
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }
    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
    /// Stored coefficient of X^e (zero if absent).
    pub fn coeff(&self, e: i64) -> C {
        self.terms.get(&e).cloned().unwrap_or_else(|| C::zero(&self.ring))
    }
    /// Least stored exponent.
    pub fn lo(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }
    pub fn hi(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }
    /// No stored terms (the value may still be unknown beyond the precision).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    /// Least weight among stored terms, capped by the precision; `None` for an exact zero.
    pub fn wmin(&self) -> Option<i64> {
        let stored = self.terms.iter().map(|(e, c)| c.weight().saturating_add(*e)).min();
        min_opt(stored, self.prec)
    }

    /// Forgets everything of weight ≥ z.
    pub fn with_prec(&self, z: i64) -> Self {
        let mut s = self.clone();
        s.prec = min_opt(s.prec, Some(z));
        s.normalize();
        s
    }
    /// Drops the precision marker; only valid when the caller knows the stored value is the
    /// intended exact element (e.g. a chosen lift).
    pub fn assume_exact(&self) -> Self {
        let mut s = self.clone();
        s.prec = None;
        s
    }

    fn check(&self, o: &Self) -> Result<(), SeriesError> {
        if !C::same_ring(&self.ring, &o.ring) {
            return Err(SeriesError::RingMismatch);
        }
        if self.center != o.center {
            return Err(SeriesError::CenterMismatch);
        }
        Ok(())
    }

    fn combine(&self, o: &Self, negate: bool) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let v = match terms.remove(e) {
                Some(a) => {
                    if negate {
                        a.sub(c)
                    } else {
                        a.add(c)
                    }
                }
                None => {
                    if negate {
                        c.neg()
                    } else {
                        c.clone()
                    }
                }
            };
            terms.insert(*e, v);
        }
        let mut s = Series { ring: self.ring.clone(), center: self.center, terms, prec: min_opt(self.prec, o.prec) };
        s.normalize();
        s
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        Ok(self.combine(o, false))
    }
    pub fn try_sub(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        Ok(self.combine(o, true))
    }
    pub fn try_mul(&self, o: &Self) -> Result<Self, SeriesError> {
        self.check(o)?;
        Ok(self.mul_unchecked(o))
    }
    /// Sum; panics if rings or centers differ.
    pub fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("series sum")
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("series difference")
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("series product")
    }
    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.terms.values_mut() {
            *c = c.neg();
        }
        s
    }
    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Self {
        self.mul(&Self::constant(c.clone(), self.center))
    }
    /// Multiplication by X^k.
    pub fn shift(&self, k: i64) -> Self {
        Series {
            ring: self.ring.clone(),
            center: self.center,
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
            prec: self.prec.map(|z| z + k),
        }
    }

    fn mul_unchecked(&self, o: &Self) -> Self {
        let prec = {
            let a = match (self.prec, o.wmin()) {
                (Some(z), Some(w)) => Some(z.saturating_add(w)),
                _ => None,
            };
            let b = match (o.prec, self.wmin()) {
                (Some(z), Some(w)) => Some(z.saturating_add(w)),
                _ => None,
            };
            min_opt(a, b)
        };
        let mut out = Series { ring: self.ring.clone(), center: self.center, terms: BTreeMap::new(), prec };
        let (Some(flo), Some(glo)) = (self.lo(), o.lo()) else {
            return out;
        };
        let (fhi, ghi) = (self.hi().unwrap(), o.hi().unwrap());
        let fv: Vec<(i64, &C)> = self.terms().collect();
        let mut gidx: Vec<Option<&C>> = vec![None; (ghi - glo + 1) as usize];
        for (e, c) in o.terms() {
            gidx[(e - glo) as usize] = Some(c);
        }
        let gw = o.terms.values().map(|c| c.weight()).min().unwrap_or(i64::MAX);
        let mut acc = C::new_acc(&self.ring);
        let mut top = fhi + ghi;
        if let Some(z) = prec {
            top = top.min(z - 1);
        }
        for e in (flo + glo)..=top {
            let cap = prec.map_or(i64::MAX, |z| z - e);
            let mut any = false;
            for &(e1, a) in &fv {
                let e2 = e - e1;
                if e2 < glo {
                    break;
                }
                if e2 > ghi {
                    continue;
                }
                if a.weight().saturating_add(gw) >= cap {
                    continue;
                }
                if let Some(b) = gidx[(e2 - glo) as usize] {
                    C::acc_mul_add(&mut acc, &self.ring, a, b, cap);
                    any = true;
                }
            }
            if any {
                let c = C::acc_take(&mut acc, &self.ring);
                if !c.is_zero() {
                    out.terms.insert(e, c);
                }
            }
        }
        out
    }

    /// Maps every coefficient, keeping exponents and precision.
    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut s = Series { ring: self.ring.clone(), center: self.center, terms: BTreeMap::new(), prec: self.prec };
        for (e, c) in &self.terms {
            s.terms.insert(*e, f(c));
        }
        s.normalize();
        s
    }

    /// Whether the two series agree on every weight both of them know.
    pub fn agrees_with(&self, o: &Self) -> bool {
        self.try_sub(o).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Least exponent whose coefficient is a unit.
    pub fn unit_order(&self) -> Option<i64> {
        self.terms.iter().find(|(_, c)| c.is_unit()).map(|(e, _)| *e)
    }

    /// Inverse; fails with [`SeriesError::NeedPrecision`] when the input is exact but its
    /// inverse is not a Laurent polynomial.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        self.inv_with(None)
    }

    /// Inverse, computing at least to weight `target` when the input is exact.
    ///
    /// With m the order of f mod I, f = ĝ + n where ĝ collects the terms from X^m upward
    /// and n the terms below (all in the maximal ideal). Then f⁻¹ = ĝ⁻¹ Σ_k (−nĝ⁻¹)^k,
    /// a finite sum by nilpotency.
    pub fn inv_with(&self, target: Option<i64>) -> Result<Self, SeriesError> {
        let (Some(t), None) = (target, self.prec) else {
            return self.inv_core(target);
        };
        // The nilpotent correction loses weight; raise the internal target until the
        // result is known to weight t.
        let mut work = t;
        for _ in 0..8 {
            let g = self.inv_core(Some(work))?;
            match g.prec {
                Some(p) if p < t => work += t - p,
                _ => return Ok(g.with_prec(t)),
            }
        }
        Err(SeriesError::Undecidable(format!("inverse does not reach weight {t}")))
    }

    fn inv_core(&self, target: Option<i64>) -> Result<Self, SeriesError> {
        let Some(m) = self.unit_order() else {
            return Err(if self.prec.is_some() {
                SeriesError::Undecidable("no unit coefficient within precision".into())
            } else {
                SeriesError::NotInvertible
            });
        };
        let center = self.center;
        let mut low_terms = self.terms.clone();
        // When the only unit coefficient sits at X^m, every other term is nilpotent and the
        // inverse is a Laurent polynomial.
        let high_terms = if self.prec.is_none() && self.terms.values().filter(|c| c.is_unit()).count() == 1 {
            let lead = low_terms.remove(&m).expect("unit term present");
            BTreeMap::from([(m, lead)])
        } else {
            low_terms.split_off(&m)
        };
        let mut upper = Series { ring: self.ring.clone(), center, terms: high_terms, prec: self.prec };
        let lower = Series { ring: self.ring.clone(), center, terms: low_terms, prec: None };
        upper = upper.shift(-m);
        let u0 = upper.coeff(0);
        let u0i = u0.inv_unit().ok_or(SeriesError::NotInvertible)?;
        let ginv = if upper.terms.len() == 1 && upper.prec.is_none() {
            Series::monomial(u0i, -m, center)
        } else {
            let tu = match (upper.prec, target) {
                (Some(z), Some(t)) => z.min(t + m),
                (Some(z), None) => z,
                (None, Some(t)) => t + m,
                (None, None) => return Err(SeriesError::NeedPrecision),
            };
            upper.power_series_inverse(&u0i, tu).shift(-m)
        };
        if lower.is_zero() {
            return Ok(ginv);
        }
        let x = lower.mul_unchecked(&ginv).neg();
        let nil = C::nilpotency(&self.ring);
        let mut sum = Series::one(&self.ring, center);
        let mut pw = x;
        let mut span = 1usize;
        while span < nil && !pw.is_zero() {
            sum = sum.add(&sum.mul_unchecked(&pw));
            pw = pw.mul_unchecked(&pw);
            span *= 2;
        }
        let mut out = ginv.mul_unchecked(&sum);
        if let (None, Some(t)) = (self.prec, target) {
            out = out.with_prec(t);
        }
        Ok(out)
    }

    /// Inverse of a power series u (exponents ≥ 0, unit constant term with inverse `u0i`)
    /// to weight precision `tu`.
    fn power_series_inverse(&self, u0i: &C, tu: i64) -> Self {
        let ring = &self.ring;
        let ut: Vec<(i64, &C)> = self.terms().filter(|(e, _)| *e > 0).collect();
        let mut y: Vec<C> = Vec::new();
        let neg_u0i = u0i.neg();
        let mut acc = C::new_acc(ring);
        for t in 0..tu.max(0) {
            let cap = tu - t;
            let yt = if t == 0 {
                u0i.truncate_weight(cap)
            } else {
                let mut any = false;
                for &(s, us) in &ut {
                    if s > t {
                        break;
                    }
                    let prev = &y[(t - s) as usize];
                    if !prev.is_zero() {
                        C::acc_mul_add(&mut acc, ring, us, prev, cap);
                        any = true;
                    }
                }
                if any {
                    let sum = C::acc_take(&mut acc, ring);
                    C::acc_mul_add(&mut acc, ring, &neg_u0i, &sum, cap);
                    C::acc_take(&mut acc, ring)
                } else {
                    C::zero(ring)
                }
            };
            y.push(yt);
        }
        Series::from_terms(ring, self.center, y.into_iter().enumerate().map(|(t, c)| (t as i64, c)), Some(tu))
    }

}

/// Binomial coefficient C(n, k) mod p for any integer n, via Lucas's theorem and
/// C(−m, k) = (−1)^k C(m + k − 1, k).
pub fn binom_mod_p(n: i64, k: u64, p: u64) -> u64 {
    if n < 0 {
        let m = (-n) as u64;
        let b = binom_mod_p((m + k - 1) as i64, k, p);
        return if k % 2 == 1 { (p - b) % p } else { b };
    }
    let (mut n, mut k) = (n as u64, k);
    let mut res = 1u64;
    while k > 0 || n > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        let mut c = 1u64;
        for t in 0..ki {
            c = c * ((ni - t) % p) % p;
        }
        let mut d = 1u64;
        for t in 1..=ki {
            d = d * (t % p) % p;
        }
        // Fermat inverse of d.
        let mut inv = 1u64;
        let (mut b, mut e) = (d, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                inv = inv * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        res = res * c % p * inv % p;
        n /= p;
        k /= p;
    }
    res
}

impl Series<TruncElem> {
    /// Entrywise Frobenius; exponents are unchanged and weight precision is preserved.
    pub fn sigma(&self) -> Self {
        self.map_coeffs(|c| c.sigma())
    }

    /// Value at z = ζ of an exact series in z, in R_{N−K}. A term a·z^{−k} contributes
    /// a/ζ^k, which is only determined modulo degree N − k. `loss` is K: it must bound the
    /// z⁻¹-depth of the untruncated series, since terms lost to truncation in R_N could
    /// otherwise reappear after division.
    pub fn eval_at_zeta(&self, loss: usize) -> Result<TruncElem, SeriesError> {
        if self.center != Center::Z {
            return Err(SeriesError::CenterMismatch);
        }
        if self.prec.is_some() {
            return Err(SeriesError::Undecidable("evaluation needs an exact series".into()));
        }
        let n = self.ring.order();
        if (-self.lo().unwrap_or(0)).max(0) as usize > loss || loss >= n {
            return Err(SeriesError::Undecidable(format!("loss {loss} does not fit the series over R_{n}")));
        }
        let target = TruncRing::new(self.ring.field(), n - loss)?;
        let mut triples = Vec::new();
        for (&e, c) in &self.terms {
            for (i, j, v) in c.terms() {
                let i = i as i64 + e;
                if i < 0 {
                    return Err(SeriesError::NotDivisible(e, -e));
                }
                triples.push((i as usize, j, v));
            }
        }
        Ok(TruncElem::from_raw_terms(&target, &triples))
    }

    /// Coefficientwise reduction to a smaller truncation order.
    pub fn project(&self, target: &Arc<TruncRing>) -> Result<Self, SeriesError> {
        let mut s = Series { ring: target.clone(), center: self.center, terms: BTreeMap::new(), prec: self.prec };
        for (e, c) in &self.terms {
            let c = c.project(target)?;
            if !c.is_zero() {
                s.terms.insert(*e, c);
            }
        }
        Ok(s)
    }

    /// Coefficientwise lift to a larger truncation order (no new monomials).
    pub fn lift(&self, target: &Arc<TruncRing>) -> Result<Self, SeriesError> {
        let mut s = Series { ring: target.clone(), center: self.center, terms: BTreeMap::new(), prec: self.prec };
        for (e, c) in &self.terms {
            s.terms.insert(*e, c.lift(target)?);
        }
        Ok(s)
    }

    /// Substitutes x = y + c in every term, with c a multiple of ζ (so the expansion of
    /// negative powers terminates).
    fn rebase(&self, c_sign: i64, new_center: Center) -> Self {
        let ring = self.ring.clone();
        let n = ring.order() as i64;
        let p = ring.field().p() as u64;
        let zeta = TruncElem::zeta(&ring);
        let c = if c_sign < 0 { zeta.neg() } else { zeta };
        let mut cpow = vec![TruncElem::one(&ring)];
        for _ in 1..n {
            let next = cpow.last().unwrap().mul(&c);
            cpow.push(next);
        }
        let mut acc: BTreeMap<i64, Vec<(TruncElem, TruncElem)>> = BTreeMap::new();
        for (i, a) in &self.terms {
            let va = a.weight();
            let kmax = if *i >= 0 { (*i).min(n - 1 - va) } else { n - 1 - va };
            for k in 0..=kmax.max(-1) {
                let b = binom_mod_p(*i, k as u64, p);
                if b == 0 {
                    continue;
                }
                let coeff = cpow[k as usize].scale_raw(ring.field().from_int(b as i64));
                acc.entry(i - k).or_default().push((coeff, a.clone()));
            }
        }
        let mut out = Series { ring: ring.clone(), center: new_center, terms: BTreeMap::new(), prec: self.prec };
        let mut dense = DenseAcc::new(&ring);
        for (e, pairs) in acc {
            let cap = self.prec.map_or(n, |z| (z - e).min(n));
            for (x, y) in &pairs {
                dense.mul_add(&ring, x, y, cap_usize(cap));
            }
            let v = dense.take(&ring);
            if !v.is_zero() {
                out.terms.insert(e, v);
            }
        }
        out
    }

    /// z = ζ + w: rewrites a z-series in powers of w = z − ζ.
    pub fn recenter(&self) -> Self {
        assert_eq!(self.center, Center::Z, "recenter expects a z-series");
        self.rebase(1, Center::Zeta)
    }

    /// w = z − ζ: rewrites a w-series in powers of z.
    pub fn uncenter(&self) -> Self {
        assert_eq!(self.center, Center::Zeta, "uncenter expects a (z-zeta)-series");
        self.rebase(-1, Center::Z)
    }

    /// f = a0 + w·a1 for a w-series without principal part.
    pub fn split_at_zeta(&self) -> Result<(TruncElem, Self), SeriesError> {
        assert_eq!(self.center, Center::Zeta, "split_at_zeta expects a (z-zeta)-series");
        let n = self.ring.order() as i64;
        if self.lo().is_some_and(|e| e < 0) {
            return Err(SeriesError::PrincipalPart);
        }
        if self.prec.is_some_and(|z| z < n) {
            return Err(SeriesError::Undecidable("constant coefficient not fully known".into()));
        }
        let a0 = self.coeff(0);
        let mut rest = self.clone();
        rest.terms.remove(&0);
        Ok((a0, rest.shift(-1)))
    }

    /// Whether every stored coefficient at exponents below `k` vanishes and those
    /// coefficients are fully known. `Err` when the precision does not decide it.
    pub fn divisible_by_var_pow(&self, k: i64) -> Result<bool, SeriesError> {
        if self.terms.range(..k).next().is_some() {
            return Ok(false);
        }
        let n = self.ring.order() as i64;
        match self.prec {
            Some(z) if z - (k - 1) < n => Err(SeriesError::Undecidable(format!("divisibility by X^{k} needs weight {}, have {z}", k - 1 + n))),
            _ => Ok(true),
        }
    }
}

/// ℓ₋ = ∏_{q^i < N} (1 − ζ^{q^i} z⁻¹), exact in R_N.
pub fn ell_minus(ring: &Arc<TruncRing>) -> ZSeries {
    let n = ring.order();
    let q = ring.q();
    let mut out = Series::one(ring, Center::Z);
    let mut qi = 1usize;
    while qi < n {
        let factor = Series::one(ring, Center::Z).sub(&Series::monomial(TruncElem::zeta_pow(ring, qi), -1, Center::Z));
        out = out.mul(&factor);
        qi *= q;
    }
    out
}

/// l₀ = ∏_{i ≥ 1, q^i − 1 < N} (1 − ζ^{q^i − 1}).
pub fn l_zero(ring: &Arc<TruncRing>) -> TruncElem {
    let n = ring.order();
    let q = ring.q();
    let mut out = TruncElem::one(ring);
    let mut qi = q;
    while qi - 1 < n {
        out = out.mul(&TruncElem::one(ring).sub(&TruncElem::zeta_pow(ring, qi - 1)));
        qi *= q;
    }
    out
}
