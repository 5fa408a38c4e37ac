//! Finite fields F_q with q = p^e, e ≤ 4.
//!
//! Elements are packed into a `u16` as the base-p digits of their coordinates in the
//! polynomial basis 1, x, .., x^{e-1}. All arithmetic goes through lookup tables built
//! once per field, so the hot loops in the truncated rings never reduce polynomials.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Largest supported field size; keeps the q×q tables small.
pub const MAX_Q: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be 1..=4, got {0}")]
    BadDegree(u32),
    #[error("field of size {0} exceeds the supported maximum {MAX_Q}")]
    TooLarge(u32),
    #[error("modulus must be monic of degree {e} over F_{p}")]
    BadModulus { p: u32, e: u32 },
    #[error("modulus is reducible over F_{0}")]
    Reducible(u32),
    #[error("elements belong to different fields")]
    Mismatch,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("coordinate vector must have {e} entries in [0, {p})")]
    BadCoords { p: u32, e: u32 },
}

/// Parameters of F_q: characteristic, degree and (for e > 1) a monic irreducible modulus,
/// stored low-to-high with the leading 1 included.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldParams {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
}

impl FieldParams {
    pub fn prime(p: u32) -> Self {
        FieldParams { p, e: 1, modulus: vec![0, 1] }
    }

    /// The shipped modulus for (p, e), falling back to the first irreducible polynomial
    /// in lexicographic order.
    pub fn standard(p: u32, e: u32) -> Result<Self, FieldError> {
        if e == 1 {
            return Ok(Self::prime(p));
        }
        let modulus = match (p, e) {
            (2, 2) => vec![1, 1, 1],
            (2, 3) => vec![1, 1, 0, 1],
            (2, 4) => vec![1, 1, 0, 0, 1],
            (3, 2) => vec![1, 0, 1],
            (3, 3) => vec![1, 2, 0, 1],
            (5, 2) => vec![2, 0, 1],
            (7, 2) => vec![1, 0, 1],
            _ => first_irreducible(p, e).ok_or(FieldError::BadDegree(e))?,
        };
        Ok(FieldParams { p, e, modulus })
    }

    /// Field of size q using the standard modulus.
    pub fn of_size(q: u32) -> Result<Self, FieldError> {
        for p in 2..=q {
            if q % p == 0 {
                let mut e = 0;
                let mut r = q;
                while r % p == 0 {
                    r /= p;
                    e += 1;
                }
                if r != 1 {
                    return Err(FieldError::NotPrime(q));
                }
                return Self::standard(p, e);
            }
        }
        Err(FieldError::NotPrime(q))
    }

    pub fn q(&self) -> u32 {
        self.p.pow(self.e)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Remainder of `a` modulo the monic `m` over F_p (both low-to-high).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &c) in m.iter().enumerate() {
                r[shift + k] = (r[shift + k] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let d = m.len() - 1;
    for k in 1..=d / 2 {
        let count = p.pow(k as u32);
        for code in 0..count {
            let mut f = Vec::with_capacity(k + 1);
            let mut c = code;
            for _ in 0..k {
                f.push(c % p);
                c /= p;
            }
            f.push(1);
            if poly_rem(m, &f, p).iter().all(|&x| x == 0) {
                return false;
            }
        }
    }
    true
}

fn first_irreducible(p: u32, e: u32) -> Option<Vec<u32>> {
    (0..p.pow(e)).find_map(|code| {
        let mut f = Vec::new();
        let mut c = code;
        for _ in 0..e {
            f.push(c % p);
            c /= p;
        }
        f.push(1);
        is_irreducible(&f, p).then_some(f)
    })
}

/// A finite field with precomputed operation tables.
pub struct Fq {
    params: FieldParams,
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)?;
        if self.params.e > 1 {
            write!(f, "[mod {:?}]", self.params.modulus)?;
        }
        Ok(())
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
    }
}
impl Eq for Fq {}

impl Fq {
    pub fn new(params: FieldParams) -> Result<Arc<Fq>, FieldError> {
        let FieldParams { p, e, .. } = params;
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if !(1..=4).contains(&e) {
            return Err(FieldError::BadDegree(e));
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_Q).ok_or(FieldError::TooLarge(p.saturating_pow(e)))?;
        let params = if e == 1 { FieldParams::prime(p) } else { params };
        if e > 1 {
            let m = &params.modulus;
            if m.len() != e as usize + 1 || *m.last().unwrap() != 1 || m.iter().any(|&c| c >= p) {
                return Err(FieldError::BadModulus { p, e });
            }
            if !is_irreducible(m, p) {
                return Err(FieldError::Reducible(p));
            }
        }
        let q = q as usize;
        let digits = |v: usize| -> Vec<u32> {
            let mut d = Vec::with_capacity(e as usize);
            let mut v = v as u32;
            for _ in 0..e {
                d.push(v % p);
                v /= p;
            }
            d
        };
        let pack = |d: &[u32]| -> u16 { d.iter().rev().fold(0u32, |acc, &c| acc * p + c) as u16 };
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        let mut neg = vec![0u16; q];
        let mut inv = vec![0u16; q];
        for a in 0..q {
            let da = digits(a);
            neg[a] = pack(&da.iter().map(|&c| (p - c) % p).collect::<Vec<_>>());
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = pack(&s);
                let mut prod = vec![0u32; 2 * e as usize - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let r = if e == 1 { prod } else { poly_rem(&prod, &params.modulus, p) };
                mul[a * q + b] = pack(&r);
            }
        }
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).expect("field has no zero divisors") as u16;
        }
        Ok(Arc::new(Fq { params, q, add, mul, neg, inv }))
    }

    pub fn of_size(q: u32) -> Result<Arc<Fq>, FieldError> {
        Fq::new(FieldParams::of_size(q)?)
    }

    pub fn params(&self) -> &FieldParams {
        &self.params
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn p(&self) -> u32 {
        self.params.p
    }
    pub fn is_prime_field(&self) -> bool {
        self.params.e == 1
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: u16) -> u16 {
        self.neg[a as usize]
    }
    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg(b))
    }
    /// Inverse of a nonzero raw element.
    #[inline]
    pub fn inv(&self, a: u16) -> Option<u16> {
        (a != 0).then(|| self.inv[a as usize])
    }
    pub fn pow(&self, a: u16, k: u64) -> u16 {
        let (mut base, mut k, mut acc) = (a, k, 1u16);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }
    /// Image of an integer under Z → F_p ⊂ F_q.
    pub fn from_int(&self, n: i64) -> u16 {
        n.rem_euclid(self.params.p as i64) as u16
    }

    /// Coordinates of a raw element in the polynomial basis.
    pub fn coords(&self, a: u16) -> Vec<u32> {
        let p = self.params.p;
        let mut v = a as u32;
        (0..self.params.e)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_coords(&self, c: &[u32]) -> Result<u16, FieldError> {
        let FieldParams { p, e, .. } = self.params;
        if c.len() != e as usize || c.iter().any(|&x| x >= p) {
            return Err(FieldError::BadCoords { p, e });
        }
        Ok(c.iter().rev().fold(0u32, |acc, &x| acc * p + x) as u16)
    }

    pub fn random_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        rng.gen_range(0..self.q) as u16
    }
    pub fn random_nonzero_raw<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        rng.gen_range(1..self.q) as u16
    }
}

/// An element of F_q that remembers its field.
#[derive(Clone)]
pub struct FqElem {
    field: Arc<Fq>,
    v: u16,
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.params.e == 1 {
            write!(f, "{}", self.v)
        } else {
            write!(f, "{:?}", self.field.coords(self.v))
        }
    }
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.field == other.field
    }
}
impl Eq for FqElem {}

impl FqElem {
    pub fn new(field: &Arc<Fq>, coords: &[u32]) -> Result<Self, FieldError> {
        Ok(FqElem { field: field.clone(), v: field.from_coords(coords)? })
    }
    pub fn from_int(field: &Arc<Fq>, n: i64) -> Self {
        FqElem { field: field.clone(), v: field.from_int(n) }
    }
    pub fn from_raw(field: &Arc<Fq>, v: u16) -> Self {
        assert!((v as usize) < field.q, "raw value out of range");
        FqElem { field: field.clone(), v }
    }
    pub fn zero(field: &Arc<Fq>) -> Self {
        Self::from_raw(field, 0)
    }
    pub fn one(field: &Arc<Fq>) -> Self {
        Self::from_raw(field, 1)
    }
    pub fn random<R: Rng + ?Sized>(field: &Arc<Fq>, rng: &mut R) -> Self {
        Self::from_raw(field, field.random_raw(rng))
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }
    pub fn raw(&self) -> u16 {
        self.v
    }
    pub fn coords(&self) -> Vec<u32> {
        self.field.coords(self.v)
    }
    pub fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if Arc::ptr_eq(&self.field, &other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::Mismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(FqElem { field: self.field.clone(), v: self.field.add(self.v, other.v) })
    }
    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(FqElem { field: self.field.clone(), v: self.field.sub(self.v, other.v) })
    }
    pub fn mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        Ok(FqElem { field: self.field.clone(), v: self.field.mul(self.v, other.v) })
    }
    pub fn neg(&self) -> Self {
        FqElem { field: self.field.clone(), v: self.field.neg(self.v) }
    }
    pub fn inv(&self) -> Result<Self, FieldError> {
        let v = self.field.inv(self.v).ok_or(FieldError::ZeroInverse)?;
        Ok(FqElem { field: self.field.clone(), v })
    }
    pub fn pow(&self, k: u64) -> Self {
        FqElem { field: self.field.clone(), v: self.field.pow(self.v, k) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_examples() {
        let f3 = Fq::of_size(3).unwrap();
        let one = FqElem::from_int(&f3, 1);
        let two = FqElem::from_int(&f3, 2);
        assert!(one.add(&two).unwrap().is_zero());
        assert_eq!(two.inv().unwrap(), two);

        let f5 = Fq::of_size(5).unwrap();
        let s = FqElem::from_int(&f5, 3).add(&FqElem::from_int(&f5, 4)).unwrap();
        assert_eq!(s, FqElem::from_int(&f5, 2));
        assert_eq!(FqElem::from_int(&f5, 2).pow(5), FqElem::from_int(&f5, 2));
    }

    #[test]
    fn f4_multiplication() {
        let f4 = Fq::of_size(4).unwrap();
        assert_eq!(f4.params().modulus, vec![1, 1, 1]);
        let x = FqElem::new(&f4, &[0, 1]).unwrap();
        let x1 = FqElem::new(&f4, &[1, 1]).unwrap();
        assert!(x.add(&x).unwrap().is_zero());
        assert_eq!(x.mul(&x1).unwrap(), FqElem::one(&f4));
    }

    #[test]
    fn mismatch_and_zero_inverse() {
        let f3 = Fq::of_size(3).unwrap();
        let f5 = Fq::of_size(5).unwrap();
        let a = FqElem::one(&f3);
        let b = FqElem::one(&f5);
        assert_eq!(a.add(&b), Err(FieldError::Mismatch));
        assert_eq!(FqElem::zero(&f3).inv(), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(Fq::new(FieldParams::prime(4)).unwrap_err(), FieldError::NotPrime(4));
        let red = FieldParams { p: 2, e: 2, modulus: vec![1, 0, 1] };
        assert_eq!(Fq::new(red).unwrap_err(), FieldError::Reducible(2));
        assert!(Fq::of_size(6).is_err());
    }

    #[test]
    fn shipped_moduli_are_irreducible() {
        for (p, e) in [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4), (5, 2), (5, 3), (7, 2)] {
            let fp = FieldParams::standard(p, e).unwrap();
            assert!(is_irreducible(&fp.modulus, p), "{p}^{e}");
            Fq::new(fp).unwrap();
        }
    }

    #[test]
    fn frobenius_fixes_every_element() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Fq::of_size(q).unwrap();
            for a in 0..q as u16 {
                assert_eq!(f.pow(a, q as u64), a, "q={q} a={a}");
            }
        }
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for q in [2, 3, 4, 5] {
            let f = Fq::of_size(q).unwrap();
            for _ in 0..1000 {
                let (a, b, c) = (f.random_raw(&mut rng), f.random_raw(&mut rng), f.random_raw(&mut rng));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
        }
    }
}
