//! The ring B = F_q((ζ))[h]/(h^D), where ζ is an honest Laurent variable rather than a
//! nilpotent. Hodge-Pink lattices and periods live here: their coefficients have genuine
//! ζ-denominators (from 1/(ζ − ζ^{q^i})) which the nilpotent rings R_N cannot express.
//!
//! Each h-degree carries a truncated Laurent series in ζ with its own absolute precision.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::fq::Fq;
use crate::series::Coeff;
use crate::trunc::TruncElem;

/// A Laurent series in ζ over F_q, known modulo ζ^prec (`None`: exact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZetaLaurent {
    lo: i64,
    coeffs: Vec<u16>,
    prec: Option<i64>,
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl ZetaLaurent {
    pub fn zero() -> Self {
        ZetaLaurent { lo: 0, coeffs: Vec::new(), prec: None }
    }
    /// O(ζ^p).
    pub fn zero_to(p: i64) -> Self {
        ZetaLaurent { lo: 0, coeffs: Vec::new(), prec: Some(p) }
    }
    pub fn monomial(c: u16, e: i64) -> Self {
        Self::from_coeffs(e, vec![c], None)
    }
    pub fn one() -> Self {
        Self::monomial(1, 0)
    }
    /// Σ coeffs[i]·ζ^{lo+i} + O(ζ^prec).
    pub fn from_coeffs(lo: i64, coeffs: Vec<u16>, prec: Option<i64>) -> Self {
        let mut s = ZetaLaurent { lo, coeffs, prec };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.lo).clamp(0, self.coeffs.len() as i64) as usize;
            self.coeffs.truncate(keep);
        }
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == 0).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.lo = 0;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i64;
        }
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }
    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }
    /// No known nonzero coefficient.
    pub fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    /// ζ-adic valuation of the known part, if nonzero.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.lo)
    }
    /// A lower bound for the true valuation.
    pub fn val_bound(&self) -> i64 {
        self.valuation().or(self.prec).unwrap_or(i64::MAX)
    }
    pub fn coeff(&self, e: i64) -> u16 {
        let k = e - self.lo;
        if k < 0 {
            return 0;
        }
        self.coeffs.get(k as usize).copied().unwrap_or(0)
    }
    /// Nonzero terms (exponent, raw coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (i64, u16)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(move |(i, &c)| (self.lo + i as i64, c))
    }
    pub fn with_prec(&self, p: i64) -> Self {
        let mut s = self.clone();
        s.prec = min_opt(s.prec, Some(p));
        s.normalize();
        s
    }
    /// Multiplication by ζ^k.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = self.clone();
        if !s.coeffs.is_empty() {
            s.lo += k;
        }
        s.prec = s.prec.map(|p| p + k);
        s
    }
    pub fn neg(&self, f: &Fq) -> Self {
        ZetaLaurent { lo: self.lo, coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect(), prec: self.prec }
    }
    pub fn scale(&self, f: &Fq, c: u16) -> Self {
        Self::from_coeffs(self.lo, self.coeffs.iter().map(|&x| f.mul(x, c)).collect(), self.prec)
    }

    pub fn add(&self, o: &Self, f: &Fq) -> Self {
        if o.coeffs.is_empty() {
            let mut s = self.clone();
            s.prec = min_opt(s.prec, o.prec);
            s.normalize();
            return s;
        }
        if self.coeffs.is_empty() {
            return o.add(self, f);
        }
        let lo = self.lo.min(o.lo);
        let hi = (self.lo + self.coeffs.len() as i64).max(o.lo + o.coeffs.len() as i64);
        let mut coeffs = vec![0u16; (hi - lo) as usize];
        for (e, c) in self.terms() {
            coeffs[(e - lo) as usize] = c;
        }
        for (e, c) in o.terms() {
            let slot = &mut coeffs[(e - lo) as usize];
            *slot = f.add(*slot, c);
        }
        Self::from_coeffs(lo, coeffs, min_opt(self.prec, o.prec))
    }
    pub fn sub(&self, o: &Self, f: &Fq) -> Self {
        self.add(&o.neg(f), f)
    }

    pub fn mul(&self, o: &Self, f: &Fq) -> Self {
        if self.is_exact_zero() || o.is_exact_zero() {
            return Self::zero();
        }
        let p1 = self.prec.map(|p| p.saturating_add(o.val_bound()));
        let p2 = o.prec.map(|p| p.saturating_add(self.val_bound()));
        let prec = min_opt(p1, p2);
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return ZetaLaurent { lo: 0, coeffs: Vec::new(), prec };
        }
        let lo = self.lo + o.lo;
        let mut len = self.coeffs.len() + o.coeffs.len() - 1;
        if let Some(p) = prec {
            len = len.min((p - lo).max(0) as usize);
        }
        let mut coeffs = vec![0u16; len];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 || i >= len {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate().take(len - i) {
                if b != 0 {
                    coeffs[i + j] = f.add(coeffs[i + j], f.mul(a, b));
                }
            }
        }
        Self::from_coeffs(lo, coeffs, prec)
    }

    /// Inverse of an element with known nonzero part. Exact inputs whose inverse is not a
    /// monomial are expanded modulo ζ^work.
    pub fn inv(&self, f: &Fq, work: i64) -> Option<Self> {
        let v = self.valuation()?;
        let u0i = f.inv(self.coeffs[0])?;
        if self.coeffs.len() == 1 && self.prec.is_none() {
            return Some(Self::monomial(u0i, -v));
        }
        let rel = match self.prec {
            Some(p) => p - v,
            None => work + v,
        };
        if rel <= 0 {
            return Some(Self::zero_to(-v + rel.max(0)));
        }
        let rel = rel as usize;
        let neg_u0i = f.neg(u0i);
        let mut y: Vec<u16> = Vec::with_capacity(rel);
        y.push(u0i);
        for t in 1..rel {
            let mut s = 0u16;
            for k in 1..=t.min(self.coeffs.len() - 1) {
                let c = self.coeffs[k];
                if c != 0 && y[t - k] != 0 {
                    s = f.add(s, f.mul(c, y[t - k]));
                }
            }
            y.push(f.mul(neg_u0i, s));
        }
        Some(Self::from_coeffs(-v, y, Some(-v + rel as i64)))
    }

    /// Agreement of the known parts modulo ζ^p; `None` when either side is not known that far.
    pub fn agrees_mod(&self, o: &Self, p: i64, f: &Fq) -> Option<bool> {
        let d = self.sub(o, f);
        if d.valuation().is_some_and(|v| v < p) {
            return Some(false);
        }
        if d.prec.is_some_and(|q| q < p) {
            return None;
        }
        Some(true)
    }

    pub fn fmt_with(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (c, e) {
                (c, 0) => write!(f, "{c}")?,
                (1, 1) => write!(f, "zeta")?,
                (1, e) => write!(f, "zeta^{e}")?,
                (c, 1) => write!(f, "{c}*zeta")?,
                (c, e) => write!(f, "{c}*zeta^{e}")?,
            }
        }
        if first && self.prec.is_none() {
            write!(f, "0")?;
        }
        if let Some(p) = self.prec {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "O(zeta^{p})")?;
        }
        Ok(())
    }
}

/// Parameters of B: the field, the h-degree bound D and the ζ working precision used when an
/// exact element has an infinite inverse.
#[derive(Debug)]
pub struct PeriodRing {
    field: Arc<Fq>,
    d: usize,
    work_prec: i64,
}

impl PeriodRing {
    pub fn new(field: &Arc<Fq>, d: usize, work_prec: i64) -> Arc<PeriodRing> {
        assert!(d >= 1, "h-degree bound must be positive");
        Arc::new(PeriodRing { field: field.clone(), d, work_prec })
    }
    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }
    pub fn h_bound(&self) -> usize {
        self.d
    }
    pub fn work_prec(&self) -> i64 {
        self.work_prec
    }
}

/// An element Σ_{d<D} a_d(ζ)·h^d of B.
#[derive(Clone)]
pub struct PeriodValue {
    ring: Arc<PeriodRing>,
    parts: Vec<ZetaLaurent>,
}

impl PartialEq for PeriodValue {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &o.ring) && self.parts == o.parts
    }
}

impl PeriodValue {
    pub fn zero(ring: &Arc<PeriodRing>) -> Self {
        PeriodValue { ring: ring.clone(), parts: vec![ZetaLaurent::zero(); ring.d] }
    }
    pub fn one(ring: &Arc<PeriodRing>) -> Self {
        Self::constant(ring, ZetaLaurent::one())
    }
    pub fn constant(ring: &Arc<PeriodRing>, c: ZetaLaurent) -> Self {
        let mut v = Self::zero(ring);
        v.parts[0] = c;
        v
    }
    /// c·ζ^e·h^k (zero if k ≥ D).
    pub fn monomial(ring: &Arc<PeriodRing>, c: u16, e: i64, k: usize) -> Self {
        let mut v = Self::zero(ring);
        if k < ring.d {
            v.parts[k] = ZetaLaurent::monomial(c, e);
        }
        v
    }
    pub fn zeta_pow(ring: &Arc<PeriodRing>, e: i64) -> Self {
        Self::monomial(ring, 1, e, 0)
    }
    pub fn h(ring: &Arc<PeriodRing>) -> Self {
        Self::monomial(ring, 1, 0, 1)
    }
    /// Reads a polynomial in ζ, h from R_N into B (monomials with h-degree ≥ D vanish).
    pub fn from_trunc(ring: &Arc<PeriodRing>, a: &TruncElem) -> Self {
        assert!(Arc::ptr_eq(a.ring().field(), &ring.field) || a.ring().field().params() == ring.field.params());
        let f = &ring.field;
        let mut v = Self::zero(ring);
        for (i, j, c) in a.terms() {
            if j < ring.d {
                v.parts[j] = v.parts[j].add(&ZetaLaurent::monomial(c, i as i64), f);
            }
        }
        v
    }
    pub fn from_parts(ring: &Arc<PeriodRing>, mut parts: Vec<ZetaLaurent>) -> Self {
        parts.resize(ring.d, ZetaLaurent::zero());
        PeriodValue { ring: ring.clone(), parts }
    }

    pub fn ring(&self) -> &Arc<PeriodRing> {
        &self.ring
    }
    pub fn parts(&self) -> &[ZetaLaurent] {
        &self.parts
    }
    pub fn part(&self, k: usize) -> &ZetaLaurent {
        &self.parts[k]
    }
    /// Least precision among parts that are not exact.
    pub fn min_prec(&self) -> Option<i64> {
        self.parts.iter().filter_map(|p| p.prec()).min()
    }
    pub fn with_prec(&self, p: i64) -> Self {
        self.map_parts(|x| x.with_prec(p))
    }
    pub fn shift_zeta(&self, k: i64) -> Self {
        self.map_parts(|x| x.shift(k))
    }
    fn map_parts(&self, g: impl Fn(&ZetaLaurent) -> ZetaLaurent) -> Self {
        PeriodValue { ring: self.ring.clone(), parts: self.parts.iter().map(g).collect() }
    }
    fn zip(&self, o: &Self, g: impl Fn(&ZetaLaurent, &ZetaLaurent) -> ZetaLaurent) -> Self {
        assert!(Arc::ptr_eq(&self.ring, &o.ring), "period values from different rings");
        PeriodValue { ring: self.ring.clone(), parts: self.parts.iter().zip(&o.parts).map(|(a, b)| g(a, b)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = self.ring.field.clone();
        self.zip(o, |a, b| a.add(b, &f))
    }
    pub fn sub(&self, o: &Self) -> Self {
        let f = self.ring.field.clone();
        self.zip(o, |a, b| a.sub(b, &f))
    }
    pub fn neg(&self) -> Self {
        let f = self.ring.field.clone();
        self.map_parts(|a| a.neg(&f))
    }
    pub fn mul(&self, o: &Self) -> Self {
        assert!(Arc::ptr_eq(&self.ring, &o.ring), "period values from different rings");
        let f = &self.ring.field;
        let d = self.ring.d;
        let mut out = vec![ZetaLaurent::zero(); d];
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in o.parts.iter().enumerate().take(d - i) {
                if !b.is_exact_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b, f), f);
                }
            }
        }
        PeriodValue { ring: self.ring.clone(), parts: out }
    }
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
    /// A random exact element with `count` monomials c·ζ^e·h^k, e in `zeta_range`.
    pub fn random<R: Rng + ?Sized>(ring: &Arc<PeriodRing>, rng: &mut R, zeta_range: std::ops::RangeInclusive<i64>, count: usize) -> Self {
        let mut v = Self::zero(ring);
        for _ in 0..count {
            let c = ring.field.random_nonzero_raw(rng);
            let e = rng.gen_range(zeta_range.clone());
            let k = rng.gen_range(0..ring.d);
            v = v.add(&Self::monomial(ring, c, e, k));
        }
        v
    }
    /// A random unit: a nonzero constant plus higher ζ-terms and h-terms.
    pub fn random_unit<R: Rng + ?Sized>(ring: &Arc<PeriodRing>, rng: &mut R) -> Self {
        let c = ring.field.random_nonzero_raw(rng);
        Self::monomial(ring, c, 0, 0).add(&Self::random(ring, rng, 1..=4, 2)).add(&Self::random(ring, rng, 0..=3, 2).mul(&Self::h(ring)))
    }
    /// Units are the elements whose h-free part is known to be nonzero.
    pub fn is_unit(&self) -> bool {
        self.parts[0].valuation().is_some()
    }
    pub fn is_exact_zero(&self) -> bool {
        self.parts.iter().all(ZetaLaurent::is_exact_zero)
    }
    pub fn inv(&self) -> Option<Self> {
        let f = &self.ring.field;
        let a0i = PeriodValue::constant(&self.ring, self.parts[0].inv(f, self.ring.work_prec)?);
        let mut nil = self.clone();
        nil.parts[0] = ZetaLaurent::zero();
        if nil.is_exact_zero() {
            return Some(a0i);
        }
        let x = nil.mul(&a0i).neg();
        let mut s = Self::one(&self.ring);
        for _ in 1..self.ring.d {
            s = Self::one(&self.ring).add(&x.mul(&s));
        }
        Some(a0i.mul(&s))
    }
}

impl fmt::Debug for PeriodValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PeriodValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, p) in self.parts.iter().enumerate() {
            if p.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "(")?;
            p.fmt_with(f)?;
            match k {
                0 => write!(f, ")")?,
                1 => write!(f, ")*h")?,
                k => write!(f, ")*h^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Coeff for PeriodValue {
    type Ring = PeriodRing;
    type Acc = Option<PeriodValue>;

    fn ring(&self) -> &Arc<PeriodRing> {
        &self.ring
    }
    fn same_ring(a: &Arc<PeriodRing>, b: &Arc<PeriodRing>) -> bool {
        Arc::ptr_eq(a, b)
    }
    fn zero(ring: &Arc<PeriodRing>) -> Self {
        PeriodValue::zero(ring)
    }
    fn one(ring: &Arc<PeriodRing>) -> Self {
        PeriodValue::one(ring)
    }
    fn from_int(ring: &Arc<PeriodRing>, n: i64) -> Self {
        let c = ring.field.from_int(n);
        if c == 0 {
            PeriodValue::zero(ring)
        } else {
            PeriodValue::monomial(ring, c, 0, 0)
        }
    }
    fn is_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn weight(&self) -> i64 {
        if self.is_exact_zero() {
            i64::MAX
        } else {
            0
        }
    }
    fn is_unit(&self) -> bool {
        PeriodValue::is_unit(self)
    }
    fn add(&self, o: &Self) -> Self {
        PeriodValue::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        PeriodValue::sub(self, o)
    }
    fn neg(&self) -> Self {
        PeriodValue::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        PeriodValue::mul(self, o)
    }
    fn truncate_weight(&self, cap: i64) -> Self {
        if cap <= 0 {
            PeriodValue::zero(&self.ring)
        } else {
            self.clone()
        }
    }
    fn inv_unit(&self) -> Option<Self> {
        self.inv()
    }
    fn nilpotency(ring: &Arc<PeriodRing>) -> usize {
        ring.d
    }
    fn new_acc(_ring: &Arc<PeriodRing>) -> Self::Acc {
        None
    }
    fn acc_mul_add(acc: &mut Self::Acc, _ring: &Arc<PeriodRing>, a: &Self, b: &Self, cap: i64) {
        if cap <= 0 {
            return;
        }
        let p = a.mul(b);
        *acc = Some(match acc.take() {
            Some(s) => s.add(&p),
            None => p,
        });
    }
    fn acc_take(acc: &mut Self::Acc, ring: &Arc<PeriodRing>) -> Self {
        acc.take().unwrap_or_else(|| PeriodValue::zero(ring))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{Center, Series};

    fn f2() -> Arc<Fq> {
        Fq::of_size(2).unwrap()
    }

    #[test]
    fn laurent_inverse() {
        let f = f2();
        // 1/(ζ − ζ²) = ζ⁻¹(1 + ζ + ζ² + …)
        let a = ZetaLaurent::from_coeffs(1, vec![1, 1], None);
        let b = a.inv(&f, 10).unwrap();
        assert_eq!(b.valuation(), Some(-1));
        assert_eq!(b.prec(), Some(10));
        assert!((-1..10).all(|e| b.coeff(e) == 1));
        let one = a.mul(&b, &f);
        assert_eq!(one.agrees_mod(&ZetaLaurent::one(), 11, &f), Some(true));
        assert_eq!(ZetaLaurent::monomial(1, 3).inv(&f, 0).unwrap(), ZetaLaurent::monomial(1, -3));
    }

    #[test]
    fn precision_propagates() {
        let f = Fq::of_size(3).unwrap();
        let a = ZetaLaurent::from_coeffs(-2, vec![1, 2], Some(5));
        let b = ZetaLaurent::from_coeffs(1, vec![2], None);
        assert_eq!(a.mul(&b, &f).prec(), Some(6));
        assert_eq!(ZetaLaurent::zero_to(4).mul(&a, &f).prec(), Some(2));
        assert_eq!(a.add(&ZetaLaurent::zero_to(3), &f).prec(), Some(3));
    }

    #[test]
    fn nilpotent_inverse() {
        let f = f2();
        let r = PeriodRing::new(&f, 4, 20);
        let x = PeriodValue::zeta_pow(&r, 1).add(&PeriodValue::h(&r));
        let y = x.inv().unwrap();
        let p = x.mul(&y);
        for (k, part) in p.parts().iter().enumerate() {
            let want = if k == 0 { ZetaLaurent::one() } else { ZetaLaurent::zero() };
            assert_eq!(part.agrees_mod(&want, 0, &f), Some(true), "{p}");
        }
        // h^4 = 0
        assert!(PeriodValue::h(&r).pow(4).is_exact_zero());
    }

    #[test]
    fn series_over_b() {
        let f = f2();
        let r = PeriodRing::new(&f, 2, 16);
        let zeta = PeriodValue::zeta_pow(&r, 1);
        // (ζ + w)⁻¹ = Σ (−1)^m ζ^{−m−1} w^m, exact coefficients
        let s = Series::from_terms(&r, Center::Zeta, [(0, zeta), (1, PeriodValue::one(&r))], None);
        let t = s.inv_with(Some(5)).unwrap();
        for m in 0..5 {
            assert_eq!(t.coeff(m), PeriodValue::zeta_pow(&r, -m - 1));
        }
        assert_eq!(t.prec(), Some(5));
    }
}
