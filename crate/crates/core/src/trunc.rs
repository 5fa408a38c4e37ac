//! The truncated base ring R_N = F_q[ζ, h]/(ζ, h)^N.
//!
//! Monomials ζ^i h^j with i + j < N are numbered by degree, then by the h-exponent:
//! `index(i, j) = d(d+1)/2 + j` with d = i + j. The numbering does not depend on N, so
//! projecting to a smaller N or lifting to a larger one never renumbers terms.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::fq::{FieldError, Fq, FqElem};

/// Largest supported truncation order (monomial indices must fit in a `u16`).
pub const MAX_N: usize = 360;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TruncError {
    #[error("truncation order must be in 1..={MAX_N}, got {0}")]
    BadOrder(usize),
    #[error("elements belong to different rings")]
    RingMismatch,
    #[error("element is not a unit (constant term is zero)")]
    NotUnit,
    #[error("cannot project from N={from} up to N={to}")]
    ProjectUp { from: usize, to: usize },
    #[error("cannot lift from N={from} down to N={to}")]
    LiftDown { from: usize, to: usize },
    #[error("monomial zeta^{0} h^{1} is outside the ring")]
    OutOfRange(usize, usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// I-adic valuation; `Inf` sorts above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Fin(u32),
    Inf,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Fin(v) => Some(v),
            Valuation::Inf => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Fin(v) => write!(f, "{v}"),
            Valuation::Inf => write!(f, "inf"),
        }
    }
}

#[inline]
pub fn mono_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

pub struct TruncRing {
    field: Arc<Fq>,
    n: usize,
    mi: Vec<u16>,
    mj: Vec<u16>,
    mdeg: Vec<u16>,
}

impl fmt::Debug for TruncRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R_{}({:?})", self.n, self.field)
    }
}

impl PartialEq for TruncRing {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && *self.field == *other.field
    }
}
impl Eq for TruncRing {}

impl TruncRing {
    pub fn new(field: &Arc<Fq>, n: usize) -> Result<Arc<TruncRing>, TruncError> {
        if n == 0 || n > MAX_N {
            return Err(TruncError::BadOrder(n));
        }
        let count = n * (n + 1) / 2;
        let (mut mi, mut mj, mut mdeg) = (Vec::with_capacity(count), Vec::with_capacity(count), Vec::with_capacity(count));
        for d in 0..n {
            for j in 0..=d {
                mi.push((d - j) as u16);
                mj.push(j as u16);
                mdeg.push(d as u16);
            }
        }
        Ok(Arc::new(TruncRing { field: field.clone(), n, mi, mj, mdeg }))
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }
    /// The truncation order N.
    pub fn order(&self) -> usize {
        self.n
    }
    pub fn q(&self) -> usize {
        self.field.q()
    }
    pub fn monomial_count(&self) -> usize {
        self.mi.len()
    }
    #[inline]
    pub fn exps(&self, idx: usize) -> (usize, usize) {
        (self.mi[idx] as usize, self.mj[idx] as usize)
    }
    #[inline]
    pub fn degree(&self, idx: usize) -> usize {
        self.mdeg[idx] as usize
    }
}

pub fn same_ring(a: &Arc<TruncRing>, b: &Arc<TruncRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// An element of R_N, stored as sorted (monomial index, raw coefficient) pairs.
#[derive(Clone)]
pub struct TruncElem {
    ring: Arc<TruncRing>,
    terms: Vec<(u16, u16)>,
}

impl PartialEq for TruncElem {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_ring(&self.ring, &other.ring)
    }
}
impl Eq for TruncElem {}

impl fmt::Debug for TruncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = self.ring.field();
        for (k, &(idx, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let (i, j) = self.ring.exps(idx as usize);
            let coeff = if field.is_prime_field() { c.to_string() } else { format!("{:?}", field.coords(c)) };
            let mut parts = Vec::new();
            if c != 1 || (i == 0 && j == 0) {
                parts.push(coeff);
            }
            match i {
                0 => {}
                1 => parts.push("zeta".into()),
                _ => parts.push(format!("zeta^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("h".into()),
                _ => parts.push(format!("h^{j}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Dense scratch space for products; indices touched since the last flush are remembered
/// so flushing costs time proportional to the output size.
pub struct DenseAcc {
    vals: Vec<u64>,
    touched: Vec<u16>,
}

impl DenseAcc {
    pub fn new(ring: &TruncRing) -> Self {
        DenseAcc { vals: vec![0; ring.monomial_count()], touched: Vec::new() }
    }

    /// Adds the part of `a * b` of total degree below `cap`.
    #[inline]
    pub fn mul_add(&mut self, ring: &TruncRing, a: &TruncElem, b: &TruncElem, cap: usize) {
        let cap = cap.min(ring.n);
        let Some(&(b0, _)) = b.terms.first() else { return };
        let db0 = ring.degree(b0 as usize);
        let field = ring.field();
        let prime = field.is_prime_field();
        for &(ia, ca) in &a.terms {
            let (ai, aj) = ring.exps(ia as usize);
            let da = ai + aj;
            if da + db0 >= cap {
                break;
            }
            for &(ib, cb) in &b.terms {
                let (bi, bj) = ring.exps(ib as usize);
                if da + bi + bj >= cap {
                    break;
                }
                let k = mono_index(ai + bi, aj + bj);
                let slot = &mut self.vals[k];
                if *slot == 0 {
                    self.touched.push(k as u16);
                }
                if prime {
                    // Keep the slot nonzero while it is in `touched`: add p instead of 0.
                    *slot += (ca as u64) * (cb as u64) + field.p() as u64;
                } else {
                    *slot = field.add((*slot).saturating_sub(1) as u16, field.mul(ca, cb)) as u64 + 1;
                }
            }
        }
    }

    /// Adds `a` itself, restricted to degree below `cap`.
    pub fn add(&mut self, ring: &TruncRing, a: &TruncElem, cap: usize) {
        let field = ring.field();
        let prime = field.is_prime_field();
        for &(ia, ca) in &a.terms {
            if ring.degree(ia as usize) >= cap {
                break;
            }
            let slot = &mut self.vals[ia as usize];
            if *slot == 0 {
                self.touched.push(ia);
            }
            if prime {
                *slot += ca as u64 + field.p() as u64;
            } else {
                *slot = field.add((*slot).saturating_sub(1) as u16, ca) as u64 + 1;
            }
        }
    }

    pub fn take(&mut self, ring: &Arc<TruncRing>) -> TruncElem {
        let field = ring.field();
        let p = field.p() as u64;
        let prime = field.is_prime_field();
        self.touched.sort_unstable();
        let mut terms = Vec::with_capacity(self.touched.len());
        for &k in &self.touched {
            let slot = &mut self.vals[k as usize];
            let c = if prime { (*slot % p) as u16 } else { (*slot - 1) as u16 };
            *slot = 0;
            if c != 0 {
                terms.push((k, c));
            }
        }
        self.touched.clear();
        TruncElem { ring: ring.clone(), terms }
    }
}

impl TruncElem {
    pub fn zero(ring: &Arc<TruncRing>) -> Self {
        TruncElem { ring: ring.clone(), terms: Vec::new() }
    }
    pub fn one(ring: &Arc<TruncRing>) -> Self {
        Self::constant_raw(ring, 1)
    }
    pub fn constant_raw(ring: &Arc<TruncRing>, c: u16) -> Self {
        let terms = if c == 0 { Vec::new() } else { vec![(0, c)] };
        TruncElem { ring: ring.clone(), terms }
    }
    pub fn from_int(ring: &Arc<TruncRing>, n: i64) -> Self {
        Self::constant_raw(ring, ring.field().from_int(n))
    }
    pub fn constant(ring: &Arc<TruncRing>, c: &FqElem) -> Result<Self, TruncError> {
        if **c.field() != **ring.field() {
            return Err(FieldError::Mismatch.into());
        }
        Ok(Self::constant_raw(ring, c.raw()))
    }
    /// c·ζ^i h^j, or zero if i + j ≥ N.
    pub fn monomial_raw(ring: &Arc<TruncRing>, i: usize, j: usize, c: u16) -> Self {
        if i + j >= ring.n || c == 0 {
            return Self::zero(ring);
        }
        TruncElem { ring: ring.clone(), terms: vec![(mono_index(i, j) as u16, c)] }
    }
    pub fn zeta(ring: &Arc<TruncRing>) -> Self {
        Self::monomial_raw(ring, 1, 0, 1)
    }
    pub fn h(ring: &Arc<TruncRing>) -> Self {
        Self::monomial_raw(ring, 0, 1, 1)
    }
    pub fn zeta_pow(ring: &Arc<TruncRing>, i: usize) -> Self {
        Self::monomial_raw(ring, i, 0, 1)
    }

    /// Builds an element from (i, j, raw coefficient) triples, summing repeats and
    /// dropping monomials of degree ≥ N.
    pub fn from_raw_terms(ring: &Arc<TruncRing>, triples: &[(usize, usize, u16)]) -> Self {
        let mut acc = DenseAcc::new(ring);
        for &(i, j, c) in triples {
            if i + j < ring.n {
                acc.add(ring, &TruncElem { ring: ring.clone(), terms: vec![(mono_index(i, j) as u16, c)] }, ring.n);
            }
        }
        acc.take(ring)
    }

    pub fn ring(&self) -> &Arc<TruncRing> {
        &self.ring
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    /// Iterates over (i, j, raw coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, u16)> + '_ {
        self.terms.iter().map(|&(k, c)| {
            let (i, j) = self.ring.exps(k as usize);
            (i, j, c)
        })
    }
    pub fn coeff_raw(&self, i: usize, j: usize) -> u16 {
        if i + j >= self.ring.n {
            return 0;
        }
        let k = mono_index(i, j) as u16;
        self.terms.binary_search_by_key(&k, |t| t.0).map(|p| self.terms[p].1).unwrap_or(0)
    }
    pub fn coeff(&self, i: usize, j: usize) -> FqElem {
        FqElem::from_raw(self.ring.field(), self.coeff_raw(i, j))
    }
    pub fn constant_term(&self) -> u16 {
        match self.terms.first() {
            Some(&(0, c)) => c,
            _ => 0,
        }
    }
    pub fn is_unit(&self) -> bool {
        self.constant_term() != 0
    }

    pub fn valuation(&self) -> Valuation {
        match self.terms.first() {
            Some(&(k, _)) => Valuation::Fin(self.ring.degree(k as usize) as u32),
            None => Valuation::Inf,
        }
    }
    /// Valuation as an integer with `i64::MAX` for zero.
    pub fn weight(&self) -> i64 {
        self.valuation().finite().map_or(i64::MAX, |v| v as i64)
    }

    fn check(&self, other: &Self) -> Result<(), TruncError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(TruncError::RingMismatch)
        }
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let f = self.ring.field();
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut x, mut y) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let nb = |c: u16| if negate_other { f.neg(c) } else { c };
        while x < a.len() || y < b.len() {
            let ord = match (a.get(x), b.get(y)) {
                (Some(s), Some(t)) => s.0.cmp(&t.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(a[x]);
                    x += 1;
                }
                Ordering::Greater => {
                    out.push((b[y].0, nb(b[y].1)));
                    y += 1;
                }
                Ordering::Equal => {
                    let c = f.add(a[x].1, nb(b[y].1));
                    if c != 0 {
                        out.push((a[x].0, c));
                    }
                    x += 1;
                    y += 1;
                }
            }
        }
        TruncElem { ring: self.ring.clone(), terms: out }
    }

    /// Sum; panics on ring mismatch. Use [`TruncElem::try_add`] for a checked version.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(same_ring(&self.ring, &other.ring));
        self.merge(other, false)
    }
    pub fn sub(&self, other: &Self) -> Self {
        debug_assert!(same_ring(&self.ring, &other.ring));
        self.merge(other, true)
    }
    pub fn neg(&self) -> Self {
        let f = self.ring.field();
        TruncElem { ring: self.ring.clone(), terms: self.terms.iter().map(|&(k, c)| (k, f.neg(c))).collect() }
    }
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_capped(other, self.ring.n)
    }
    /// Product with all monomials of total degree ≥ `cap` discarded.
    pub fn mul_capped(&self, other: &Self, cap: usize) -> Self {
        debug_assert!(same_ring(&self.ring, &other.ring));
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.ring);
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return other.scale_raw(self.terms[0].1).truncate(cap);
        }
        if other.terms.len() == 1 && other.terms[0].0 == 0 {
            return self.scale_raw(other.terms[0].1).truncate(cap);
        }
        let mut acc = DenseAcc::new(&self.ring);
        acc.mul_add(&self.ring, self, other, cap);
        acc.take(&self.ring)
    }
    pub fn scale_raw(&self, c: u16) -> Self {
        if c == 0 {
            return Self::zero(&self.ring);
        }
        let f = self.ring.field();
        TruncElem { ring: self.ring.clone(), terms: self.terms.iter().map(|&(k, x)| (k, f.mul(x, c))).collect() }
    }
    /// Drops every monomial of total degree ≥ `cap`.
    pub fn truncate(&self, cap: usize) -> Self {
        let end = self.terms.partition_point(|&(k, _)| self.ring.degree(k as usize) < cap);
        TruncElem { ring: self.ring.clone(), terms: self.terms[..end].to_vec() }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, TruncError> {
        self.check(other)?;
        Ok(self.add(other))
    }
    pub fn try_sub(&self, other: &Self) -> Result<Self, TruncError> {
        self.check(other)?;
        Ok(self.sub(other))
    }
    pub fn try_mul(&self, other: &Self) -> Result<Self, TruncError> {
        self.check(other)?;
        Ok(self.mul(other))
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

    /// Inverse of a unit: with a = c(1 − w) and v(w) ≥ 1 this is c⁻¹ Σ_{k<N} w^k, summed
    /// as the product of (1 + w^{2^t}).
    pub fn inv(&self) -> Result<Self, TruncError> {
        let c = self.constant_term();
        let ci = self.ring.field().inv(c).ok_or(TruncError::NotUnit)?;
        let w = Self::one(&self.ring).sub(&self.scale_raw(ci));
        let mut sum = Self::one(&self.ring);
        let mut pw = w;
        let mut span = 1usize;
        while span < self.ring.n && !pw.is_zero() {
            sum = sum.add(&sum.mul(&pw));
            pw = pw.mul(&pw);
            span *= 2;
        }
        Ok(sum.scale_raw(ci))
    }

    /// Frobenius a ↦ a^q, as the monomial map ζ^i h^j ↦ ζ^{qi} h^{qj}.
    pub fn sigma(&self) -> Self {
        self.sigma_pow(1)
    }
    /// σ^k, i.e. ζ^i h^j ↦ ζ^{q^k i} h^{q^k j}.
    pub fn sigma_pow(&self, k: u32) -> Self {
        let Some(s) = (self.ring.q()).checked_pow(k) else {
            return Self::constant_raw(&self.ring, self.constant_term());
        };
        let n = self.ring.n;
        let mut terms: Vec<(u16, u16)> = self
            .terms
            .iter()
            .filter_map(|&(idx, c)| {
                let (i, j) = self.ring.exps(idx as usize);
                let (i, j) = (i.checked_mul(s)?, j.checked_mul(s)?);
                (i + j < n).then(|| (mono_index(i, j) as u16, c))
            })
            .collect();
        terms.sort_unstable();
        TruncElem { ring: self.ring.clone(), terms }
    }

    /// Reduction to R_{N'} for N' ≤ N.
    pub fn project(&self, target: &Arc<TruncRing>) -> Result<Self, TruncError> {
        if **target.field() != **self.ring.field() {
            return Err(FieldError::Mismatch.into());
        }
        if target.n > self.ring.n {
            return Err(TruncError::ProjectUp { from: self.ring.n, to: target.n });
        }
        let t = self.truncate(target.n);
        Ok(TruncElem { ring: target.clone(), terms: t.terms })
    }

    /// The same coefficients viewed in R_{N'} for N' ≥ N (the lift with no new monomials).
    pub fn lift(&self, target: &Arc<TruncRing>) -> Result<Self, TruncError> {
        if **target.field() != **self.ring.field() {
            return Err(FieldError::Mismatch.into());
        }
        if target.n < self.ring.n {
            return Err(TruncError::LiftDown { from: self.ring.n, to: target.n });
        }
        Ok(TruncElem { ring: target.clone(), terms: self.terms.clone() })
    }

    /// Substitutes ζ ↦ ζ and h ↦ `h_val` (any element of R with v ≥ 1), in the ring of `h_val`.
    pub fn substitute_h(&self, h_val: &TruncElem) -> Self {
        let ring = h_val.ring();
        let n = ring.order();
        let mut hp = vec![TruncElem::one(ring)];
        let mut out = DenseAcc::new(ring);
        for (i, j, c) in self.terms() {
            while hp.len() <= j {
                let next = hp.last().unwrap().mul(h_val);
                hp.push(next);
            }
            let term = TruncElem::monomial_raw(ring, i, 0, c);
            out.mul_add(ring, &term, &hp[j], n);
        }
        out.take(ring)
    }

    /// A uniformly random element.
    pub fn random<R: Rng + ?Sized>(ring: &Arc<TruncRing>, rng: &mut R) -> Self {
        Self::random_sparse(ring, rng, 0, ring.monomial_count())
    }

    /// Random element with at most `count` monomials, all of degree ≥ `min_deg`.
    pub fn random_sparse<R: Rng + ?Sized>(ring: &Arc<TruncRing>, rng: &mut R, min_deg: usize, count: usize) -> Self {
        let start = mono_index(min_deg, 0).min(ring.monomial_count());
        let span = ring.monomial_count() - start;
        if span == 0 {
            return Self::zero(ring);
        }
        let field = ring.field();
        let mut triples = Vec::new();
        if count >= span {
            for k in start..ring.monomial_count() {
                let (i, j) = ring.exps(k);
                triples.push((i, j, field.random_raw(rng)));
            }
        } else {
            for _ in 0..count {
                let k = rng.gen_range(start..ring.monomial_count());
                let (i, j) = ring.exps(k);
                triples.push((i, j, field.random_nonzero_raw(rng)));
            }
        }
        Self::from_raw_terms(ring, &triples)
    }

    /// Random unit: nonzero constant plus a random element of I.
    pub fn random_unit<R: Rng + ?Sized>(ring: &Arc<TruncRing>, rng: &mut R) -> Self {
        let c = ring.field().random_nonzero_raw(rng);
        Self::constant_raw(ring, c).add(&Self::random_sparse(ring, rng, 1, usize::MAX))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ring(q: u32, n: usize) -> Arc<TruncRing> {
        TruncRing::new(&Fq::of_size(q).unwrap(), n).unwrap()
    }
    fn el(r: &Arc<TruncRing>, t: &[(usize, usize, i64)]) -> TruncElem {
        let f = r.field().clone();
        TruncElem::from_raw_terms(r, &t.iter().map(|&(i, j, c)| (i, j, f.from_int(c))).collect::<Vec<_>>())
    }

    #[test]
    fn truncated_products() {
        let r = ring(5, 4);
        assert!(el(&r, &[(2, 0, 1)]).mul(&el(&r, &[(0, 2, 1)])).is_zero());
        let p = el(&r, &[(0, 0, 1), (1, 0, 1)]).mul(&el(&r, &[(0, 0, 1), (1, 0, -1)]));
        assert_eq!(p, el(&r, &[(0, 0, 1), (2, 0, -1)]));
        let r9 = ring(3, 9);
        let s = el(&r9, &[(1, 0, 1), (0, 1, 1)]);
        assert_eq!(s.pow(3), el(&r9, &[(3, 0, 1), (0, 3, 1)]));
    }

    #[test]
    fn valuations() {
        let r = ring(3, 6);
        assert_eq!(el(&r, &[(2, 1, 1)]).valuation(), Valuation::Fin(3));
        assert_eq!(TruncElem::zero(&r).valuation(), Valuation::Inf);
        assert_eq!(el(&r, &[(0, 0, 1), (1, 0, 1)]).valuation(), Valuation::Fin(0));
    }

    #[test]
    fn inverse_examples() {
        let r = ring(5, 6);
        let a = el(&r, &[(0, 0, 1), (1, 0, 1)]);
        let expect: Vec<_> = (0..6).map(|k| (k, 0, if k % 2 == 0 { 1 } else { -1 })).collect();
        assert_eq!(a.inv().unwrap(), el(&r, &expect));
        assert_eq!(TruncElem::from_int(&r, 2).inv().unwrap(), TruncElem::from_int(&r, 3));
        assert_eq!(el(&r, &[(1, 0, 1)]).inv(), Err(TruncError::NotUnit));

        let r2 = ring(2, 4);
        let b = el(&r2, &[(0, 0, 1), (1, 0, 1), (0, 1, 1)]);
        // In characteristic 2 the inverse of 1+s is Σ s^k with s = ζ+h.
        let mut brute = TruncElem::zero(&r2);
        let s = el(&r2, &[(1, 0, 1), (0, 1, 1)]);
        for k in 0..4 {
            brute = brute.add(&s.pow(k));
        }
        assert_eq!(b.inv().unwrap(), brute);
        assert_eq!(b.mul(&brute), TruncElem::one(&r2));
    }

    #[test]
    fn sigma_examples() {
        let r = ring(3, 12);
        let a = el(&r, &[(1, 0, 1), (0, 2, 1)]);
        assert_eq!(a.sigma(), el(&r, &[(3, 0, 1), (0, 6, 1)]));
        assert_eq!(TruncElem::from_int(&r, 2).sigma(), TruncElem::from_int(&r, 2));
        let r2 = ring(2, 4);
        let b = el(&r2, &[(0, 0, 1), (1, 0, 1), (1, 1, 1)]);
        assert_eq!(b.sigma(), el(&r2, &[(0, 0, 1), (2, 0, 1)]));
        assert_eq!(b.sigma(), b.mul(&b));
    }

    #[test]
    fn projection() {
        let r = ring(2, 5);
        let r2 = ring(2, 2);
        assert_eq!(el(&r, &[(0, 0, 1), (1, 0, 1), (3, 0, 1)]).project(&r2).unwrap(), el(&r2, &[(0, 0, 1), (1, 0, 1)]));
        assert!(el(&r, &[(1, 1, 1)]).project(&r2).unwrap().is_zero());
        let a = TruncElem::random(&r, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a.project(&r).unwrap(), a);
        assert!(a.project(&ring(2, 6)).is_err());
    }

    #[test]
    fn mismatch_detected() {
        let a = TruncElem::one(&ring(2, 4));
        let b = TruncElem::one(&ring(2, 5));
        assert_eq!(a.try_add(&b), Err(TruncError::RingMismatch));
        assert_eq!(a.try_mul(&b), Err(TruncError::RingMismatch));
    }

    #[test]
    fn display_is_readable() {
        let r = ring(3, 5);
        assert_eq!(el(&r, &[(0, 0, 2), (1, 0, 1), (2, 1, 1)]).to_string(), "2 + zeta + zeta^2*h");
    }
}
