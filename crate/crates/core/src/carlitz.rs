//! The Carlitz module φ: F_q[t] → F_q(ζ){τ}, t ↦ ζ + τ, with τ·b = b(ζ^q)·τ, and the
//! coefficients of its exponential and logarithm
//!
//! e_n = 1/((ζ^{q^n} − ζ)⋯(ζ^{q^n} − ζ^{q^{n−1}})),  c_n = 1/((ζ − ζ^q)⋯(ζ − ζ^{q^n})).
//!
//! Identities are checked in exact rational arithmetic ([`RatZeta`]); [`log_eval`] expands
//! the logarithm as truncated Laurent series in ζ for the period computation.

use std::fmt;
use std::sync::Arc;

use crate::fq::Fq;
use crate::rigid::{PeriodRing, PeriodValue, ZetaLaurent};

/// A polynomial over F_q in one variable (ζ or t), coefficients from low degree up.
#[derive(Clone, PartialEq, Eq)]
pub struct FqPoly {
    field: Arc<Fq>,
    c: Vec<u16>,
}

impl FqPoly {
    pub fn from_raw(field: &Arc<Fq>, mut c: Vec<u16>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        FqPoly { field: field.clone(), c }
    }
    pub fn zero(field: &Arc<Fq>) -> Self {
        Self::from_raw(field, Vec::new())
    }
    pub fn one(field: &Arc<Fq>) -> Self {
        Self::monomial(field, 1, 0)
    }
    pub fn monomial(field: &Arc<Fq>, c: u16, e: usize) -> Self {
        let mut v = vec![0u16; e + 1];
        v[e] = c;
        Self::from_raw(field, v)
    }
    /// The variable itself.
    pub fn var(field: &Arc<Fq>) -> Self {
        Self::monomial(field, 1, 1)
    }
    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }
    pub fn coeffs(&self) -> &[u16] {
        &self.c
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }
    pub fn lead(&self) -> u16 {
        self.c.last().copied().unwrap_or(0)
    }
    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|&x| x != 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        let v = (0..n).map(|i| f.add(self.c.get(i).copied().unwrap_or(0), o.c.get(i).copied().unwrap_or(0))).collect();
        Self::from_raw(f, v)
    }
    pub fn neg(&self) -> Self {
        Self::from_raw(&self.field, self.c.iter().map(|&x| self.field.neg(x)).collect())
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn scale(&self, k: u16) -> Self {
        Self::from_raw(&self.field, self.c.iter().map(|&x| self.field.mul(x, k)).collect())
    }
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.field);
        }
        let f = &self.field;
        let mut v = vec![0u16; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                if b != 0 {
                    v[i + j] = f.add(v[i + j], f.mul(a, b));
                }
            }
        }
        Self::from_raw(f, v)
    }
    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let f = &self.field;
        let dl = f.inv(d.lead()).expect("division by the zero polynomial");
        let dd = d.c.len() - 1;
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(f), self.clone());
        }
        let mut q = vec![0u16; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = f.mul(r[k + dd], dl);
            if c == 0 {
                continue;
            }
            q[k] = c;
            for (j, &b) in d.c.iter().enumerate() {
                if b != 0 {
                    r[k + j] = f.sub(r[k + j], f.mul(c, b));
                }
            }
        }
        r.truncate(dd);
        (Self::from_raw(f, q), Self::from_raw(f, r))
    }
    pub fn monic(&self) -> Self {
        match self.field.inv(self.lead()) {
            Some(l) => self.scale(l),
            None => self.clone(),
        }
    }
    /// Monic greatest common divisor (zero only if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
    /// p(X) ↦ p(X^k).
    pub fn subst_pow(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0u16; (self.c.len() - 1) * k + 1];
        for (i, &x) in self.c.iter().enumerate() {
            v[i * k] = x;
        }
        Self::from_raw(&self.field, v)
    }
    /// Exact element of F_q((ζ)).
    pub fn to_laurent(&self) -> ZetaLaurent {
        ZetaLaurent::from_coeffs(0, self.c.clone(), None)
    }
}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.c.iter().enumerate() {
            if c == 0 {
                continue;
            }
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
        Ok(())
    }
}

/// An element num/den of F_q(ζ) in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RatZeta {
    num: FqPoly,
    den: FqPoly,
}

impl RatZeta {
    /// num/den reduced; `None` if den = 0.
    pub fn new(num: FqPoly, den: FqPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let f = num.field.clone();
        if num.is_zero() {
            return Some(Self::from_poly(FqPoly::zero(&f)));
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num.divrem(&g).0, den.divrem(&g).0);
        let l = f.inv(d.lead()).expect("nonzero lead");
        n = n.scale(l);
        d = d.scale(l);
        Some(RatZeta { num: n, den: d })
    }
    pub fn from_poly(p: FqPoly) -> Self {
        let f = p.field.clone();
        RatZeta { num: p, den: FqPoly::one(&f) }
    }
    pub fn zero(field: &Arc<Fq>) -> Self {
        Self::from_poly(FqPoly::zero(field))
    }
    pub fn one(field: &Arc<Fq>) -> Self {
        Self::from_poly(FqPoly::one(field))
    }
    /// ζ^e for any integer e.
    pub fn zeta_pow(field: &Arc<Fq>, e: i64) -> Self {
        let m = FqPoly::monomial(field, 1, e.unsigned_abs() as usize);
        if e >= 0 {
            Self::from_poly(m)
        } else {
            RatZeta { num: FqPoly::one(field), den: m }
        }
    }
    pub fn num(&self) -> &FqPoly {
        &self.num
    }
    pub fn den(&self) -> &FqPoly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn add(&self, o: &Self) -> Self {
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        Self::new(n, self.den.mul(&o.den)).expect("nonzero denominators")
    }
    pub fn neg(&self) -> Self {
        RatZeta { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }
    pub fn inv(&self) -> Option<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }
    /// b ↦ b(ζ^k); for k = q this is the q-th power map on F_q(ζ).
    pub fn subst_pow(&self, k: usize) -> Self {
        RatZeta { num: self.num.subst_pow(k), den: self.den.subst_pow(k) }
    }
    /// ζ-adic valuation (None for zero).
    pub fn valuation(&self) -> Option<i64> {
        Some(self.num.valuation()? as i64 - self.den.valuation().expect("nonzero den") as i64)
    }
    /// Laurent expansion modulo ζ^prec.
    pub fn to_laurent(&self, prec: i64) -> ZetaLaurent {
        let f = &self.num.field;
        if self.is_zero() {
            return ZetaLaurent::zero_to(prec);
        }
        let v = self.den.valuation().expect("nonzero den") as i64;
        if self.den.degree() == Some(v as usize) {
            return self.num.to_laurent().shift(-v);
        }
        let u =ZetaLaurent::from_coeffs(0, self.den.c[v as usize..].to_vec(), None);
        let ui = u.inv(f, prec + v).expect("unit");
        self.num.to_laurent().mul(&ui, f).shift(-v).with_prec(prec)
    }
}

impl fmt::Debug for RatZeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatZeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Σ_{i ≤ T} a_i τ^i in F_q(ζ){τ}, truncated above τ^T.
#[derive(Clone, PartialEq, Eq)]
pub struct TwistedPoly {
    field: Arc<Fq>,
    coeffs: Vec<RatZeta>,
    t: usize,
}

impl TwistedPoly {
    pub fn new(field: &Arc<Fq>, mut coeffs: Vec<RatZeta>, t: usize) -> Self {
        coeffs.resize(t + 1, RatZeta::zero(field));
        coeffs.truncate(t + 1);
        TwistedPoly { field: field.clone(), coeffs, t }
    }
    pub fn constant(c: RatZeta, t: usize) -> Self {
        let f = c.num.field.clone();
        Self::new(&f, vec![c], t)
    }
    pub fn one(field: &Arc<Fq>, t: usize) -> Self {
        Self::constant(RatZeta::one(field), t)
    }
    pub fn coeffs(&self) -> &[RatZeta] {
        &self.coeffs
    }
    pub fn coeff(&self, i: usize) -> &RatZeta {
        &self.coeffs[i]
    }
    pub fn truncation(&self) -> usize {
        self.t
    }
    /// The same element with a different truncation.
    pub fn with_truncation(&self, t: usize) -> Self {
        Self::new(&self.field, self.coeffs.clone(), t)
    }
    pub fn add(&self, o: &Self) -> Self {
        let t = self.t.min(o.t);
        Self::new(&self.field, (0..=t).map(|i| self.coeffs[i].add(&o.coeffs[i])).collect(), t)
    }
    /// Product under τ·b = b(ζ^q)·τ, truncated at the smaller bound.
    pub fn mul(&self, o: &Self) -> Self {
        let t = self.t.min(o.t);
        let q = self.field.q();
        let mut out = vec![RatZeta::zero(&self.field); t + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(t + 1) {
            if a.is_zero() {
                continue;
            }
            let k = q.pow(i as u32);
            for (j, b) in o.coeffs.iter().enumerate().take(t + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(&b.subst_pow(k)));
                }
            }
        }
        Self::new(&self.field, out, t)
    }
}

impl fmt::Debug for TwistedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TwistedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "[{c}]*tau")?,
                i => write!(f, "[{c}]*tau^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(tau^{})", self.t + 1)
    }
}

/// φ_a for a ∈ F_q[t], computed by Horner's rule from φ_t = ζ + τ (no truncation loss).
pub fn phi(a: &FqPoly) -> TwistedPoly {
    let f = a.field.clone();
    let t = a.degree().unwrap_or(0);
    let phi_t = TwistedPoly::new(&f, vec![RatZeta::zeta_pow(&f, 1), RatZeta::one(&f)], t);
    let mut acc = TwistedPoly::new(&f, Vec::new(), t);
    for &c in a.c.iter().rev() {
        acc = acc.mul(&phi_t).add(&TwistedPoly::constant(RatZeta::from_poly(FqPoly::monomial(&f, c, 0)), t));
    }
    acc
}

/// D₀φ_a = a(ζ), the constant term of φ_a.
pub fn d0(a: &FqPoly) -> RatZeta {
    RatZeta::from_poly(a.clone())
}

fn zeta_qpow(f: &Arc<Fq>, i: u32) -> FqPoly {
    FqPoly::monomial(f, 1, f.q().pow(i))
}

/// e_0, …, e_T.
pub fn exp_coeffs(field: &Arc<Fq>, t: usize) -> Vec<RatZeta> {
    (0..=t as u32)
        .map(|n| {
            let top = zeta_qpow(field, n);
            let den = (0..n).fold(FqPoly::one(field), |acc, i| acc.mul(&top.sub(&zeta_qpow(field, i))));
            RatZeta::new(FqPoly::one(field), den).expect("distinct powers")
        })
        .collect()
}

/// c_0, …, c_T.
pub fn log_coeffs(field: &Arc<Fq>, t: usize) -> Vec<RatZeta> {
    let z = FqPoly::var(field);
    let mut out = vec![RatZeta::one(field)];
    let mut den = FqPoly::one(field);
    for i in 1..=t as u32 {
        den = den.mul(&z.sub(&zeta_qpow(field, i)));
        out.push(RatZeta::new(FqPoly::one(field), den.clone()).expect("distinct powers"));
    }
    out
}

pub fn exp_poly(field: &Arc<Fq>, t: usize) -> TwistedPoly {
    TwistedPoly::new(field, exp_coeffs(field, t), t)
}

pub fn log_poly(field: &Arc<Fq>, t: usize) -> TwistedPoly {
    TwistedPoly::new(field, log_coeffs(field, t), t)
}

/// f·g in F_q(ζ){τ} modulo τ^{T+1}.
pub fn twisted_compose(f: &TwistedPoly, g: &TwistedPoly, t: usize) -> TwistedPoly {
    f.with_truncation(t).mul(&g.with_truncation(t))
}

/// log_φ(h) = Σ_{q^n < D} c_n·h^{q^n} in B = F_q((ζ))[h]/(h^D), each c_n expanded modulo
/// ζ^prec.
pub fn log_eval(field: &Arc<Fq>, prec: i64, d: usize) -> PeriodValue {
    let ring = PeriodRing::new(field, d.max(1), prec);
    let q = field.q();
    let mut parts = vec![ZetaLaurent::zero(); ring.h_bound()];
    if d >= 2 {
        let mut n = 0usize;
        while q.pow(n as u32) < d {
            n += 1;
        }
        for (k, c) in log_coeffs(field, n - 1).iter().enumerate() {
            parts[q.pow(k as u32)] = c.to_laurent(prec);
        }
    }
    PeriodValue::from_parts(&ring, parts)
}
