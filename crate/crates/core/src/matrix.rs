//! Square matrices of Laurent series.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::series::{Center, Coeff, Series, SeriesError};
use crate::trunc::{TruncElem, TruncRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("entries use different centers")]
    CenterMismatch,
    #[error("entries live over different rings")]
    RingMismatch,
    #[error("exterior power {i} out of range for rank {r}")]
    WedgeRange { i: usize, r: usize },
    #[error("determinant is not invertible")]
    NotInvertible,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// An r×r matrix of series sharing one ring and one center, stored row-major.
pub struct Mat<C: Coeff> {
    r: usize,
    entries: Vec<Series<C>>,
}

/// Matrices over R_N.
pub type MatSeries = Mat<TruncElem>;

impl<C: Coeff> Clone for Mat<C> {
    fn clone(&self) -> Self {
        Mat { r: self.r, entries: self.entries.clone() }
    }
}

impl<C: Coeff> fmt::Debug for Mat<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.r {
            let row: Vec<String> = (0..self.r).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

fn subsets(r: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, r: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..r {
            cur.push(x);
            rec(x + 1, r, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, r, k, &mut Vec::new(), &mut out);
    out
}

impl<C: Coeff> Mat<C> {
    /// Builds a matrix from rows; all entries must share ring and center.
    pub fn from_rows(rows: Vec<Vec<Series<C>>>) -> Result<Self, MatrixError> {
        let r = rows.len();
        if r == 0 || rows.iter().any(|row| row.len() != r) {
            return Err(MatrixError::Shape("rows must form a nonempty square".into()));
        }
        let entries: Vec<Series<C>> = rows.into_iter().flatten().collect();
        let (ring, center) = (entries[0].ring().clone(), entries[0].center());
        for e in &entries {
            if e.center() != center {
                return Err(MatrixError::CenterMismatch);
            }
            if !C::same_ring(e.ring(), &ring) {
                return Err(MatrixError::RingMismatch);
            }
        }
        Ok(Mat { r, entries })
    }

    pub fn identity(ring: &Arc<C::Ring>, r: usize, center: Center) -> Self {
        let entries = (0..r * r)
            .map(|k| if k / r == k % r { Series::one(ring, center) } else { Series::zero(ring, center) })
            .collect();
        Mat { r, entries }
    }

    pub fn diag(d: Vec<Series<C>>) -> Result<Self, MatrixError> {
        let r = d.len();
        if r == 0 {
            return Err(MatrixError::Shape("empty diagonal".into()));
        }
        let (ring, center) = (d[0].ring().clone(), d[0].center());
        let mut rows = vec![vec![Series::zero(&ring, center); r]; r];
        for (i, s) in d.into_iter().enumerate() {
            rows[i][i] = s;
        }
        Self::from_rows(rows)
    }

    /// diag(X^{e_1}, .., X^{e_r}).
    pub fn diag_pows(ring: &Arc<C::Ring>, exps: &[i64], center: Center) -> Self {
        Self::diag(exps.iter().map(|&e| Series::var_pow(ring, e, center)).collect()).expect("nonempty")
    }

    pub fn rank(&self) -> usize {
        self.r
    }
    pub fn ring(&self) -> &Arc<C::Ring> {
        self.entries[0].ring()
    }
    pub fn center(&self) -> Center {
        self.entries[0].center()
    }
    pub fn get(&self, i: usize, j: usize) -> &Series<C> {
        &self.entries[i * self.r + j]
    }
    pub fn set(&mut self, i: usize, j: usize, s: Series<C>) {
        assert_eq!(s.center(), self.center());
        self.entries[i * self.r + j] = s;
    }
    pub fn rows(&self) -> Vec<Vec<Series<C>>> {
        (0..self.r).map(|i| (0..self.r).map(|j| self.get(i, j).clone()).collect()).collect()
    }
    pub fn entries(&self) -> impl Iterator<Item = &Series<C>> {
        self.entries.iter()
    }
    /// Least precision among the entries.
    pub fn prec(&self) -> Option<i64> {
        self.entries.iter().filter_map(|e| e.prec()).min()
    }

    pub fn map(&self, f: impl Fn(&Series<C>) -> Series<C>) -> Self {
        Mat { r: self.r, entries: self.entries.iter().map(f).collect() }
    }
    pub fn try_map<E>(&self, f: impl Fn(&Series<C>) -> Result<Series<C>, E>) -> Result<Self, E> {
        Ok(Mat { r: self.r, entries: self.entries.iter().map(f).collect::<Result<_, _>>()? })
    }
    pub fn with_prec(&self, z: i64) -> Self {
        self.map(|e| e.with_prec(z))
    }

    fn check(&self, o: &Self) -> Result<(), MatrixError> {
        if self.r != o.r {
            return Err(MatrixError::Shape(format!("{} vs {}", self.r, o.r)));
        }
        if self.center() != o.center() {
            return Err(MatrixError::CenterMismatch);
        }
        if !C::same_ring(self.ring(), o.ring()) {
            return Err(MatrixError::RingMismatch);
        }
        Ok(())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, MatrixError> {
        self.check(o)?;
        let r = self.r;
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                let mut s = Series::zero(self.ring(), self.center());
                for k in 0..r {
                    let (a, b) = (self.get(i, k), o.get(k, j));
                    if a.is_zero() && a.is_exact() || b.is_zero() && b.is_exact() {
                        continue;
                    }
                    s = s.add(&a.mul(b));
                }
                entries.push(s);
            }
        }
        Ok(Mat { r, entries })
    }
    pub fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("matrix product")
    }
    pub fn try_add(&self, o: &Self) -> Result<Self, MatrixError> {
        self.check(o)?;
        Ok(Mat { r: self.r, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.add(b)).collect() })
    }
    pub fn try_sub(&self, o: &Self) -> Result<Self, MatrixError> {
        self.check(o)?;
        Ok(Mat { r: self.r, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a.sub(b)).collect() })
    }

    /// Multiplies row i by `s`.
    pub fn scale_row(&self, i: usize, s: &Series<C>) -> Self {
        let mut m = self.clone();
        for j in 0..self.r {
            m.entries[i * self.r + j] = self.get(i, j).mul(s);
        }
        m
    }
    /// Multiplies row i by X^{e_i}.
    pub fn shift_rows(&self, exps: &[i64]) -> Self {
        let mut m = self.clone();
        for i in 0..self.r {
            for j in 0..self.r {
                m.entries[i * self.r + j] = self.get(i, j).shift(exps[i]);
            }
        }
        m
    }
    pub fn swap_cols(&self, a: usize, b: usize) -> Self {
        let mut m = self.clone();
        for i in 0..self.r {
            m.entries.swap(i * self.r + a, i * self.r + b);
        }
        m
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Series<C> {
        match rows.len() {
            0 => Series::one(self.ring(), self.center()),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => {
                let a = self.get(rows[0], cols[0]).mul(self.get(rows[1], cols[1]));
                let b = self.get(rows[0], cols[1]).mul(self.get(rows[1], cols[0]));
                a.sub(&b)
            }
            k => {
                let mut acc = Series::zero(self.ring(), self.center());
                for (t, &c) in cols.iter().enumerate() {
                    let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = self.get(rows[0], c).mul(&self.minor_det(&rows[1..k], &sub_cols));
                    acc = if t % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                acc
            }
        }
    }

    pub fn det(&self) -> Series<C> {
        let idx: Vec<usize> = (0..self.r).collect();
        self.minor_det(&idx, &idx)
    }

    /// Transpose of the cofactor matrix.
    pub fn adjugate(&self) -> Self {
        let r = self.r;
        if r == 1 {
            return Self::identity(self.ring(), 1, self.center());
        }
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                let rows: Vec<usize> = (0..r).filter(|&x| x != j).collect();
                let cols: Vec<usize> = (0..r).filter(|&x| x != i).collect();
                let m = self.minor_det(&rows, &cols);
                entries.push(if (i + j) % 2 == 0 { m } else { m.neg() });
            }
        }
        Mat { r, entries }
    }

    pub fn inv(&self) -> Result<Self, MatrixError> {
        self.inv_with(None)
    }

    /// Adjugate over determinant; `target` bounds the precision of an infinite
    /// determinant inverse.
    pub fn inv_with(&self, target: Option<i64>) -> Result<Self, MatrixError> {
        let d = self.det();
        let di = d.inv_with(target).map_err(|e| match e {
            SeriesError::NotInvertible => MatrixError::NotInvertible,
            e => e.into(),
        })?;
        Ok(self.adjugate().map(|e| e.mul(&di)))
    }

    /// Matrix of i×i minors in the lexicographic basis of the i-th exterior power.
    pub fn wedge(&self, i: usize) -> Result<Self, MatrixError> {
        if i == 0 || i > self.r {
            return Err(MatrixError::WedgeRange { i, r: self.r });
        }
        let subs = subsets(self.r, i);
        let mut rows = Vec::with_capacity(subs.len());
        for s in &subs {
            rows.push(subs.iter().map(|t| self.minor_det(s, t)).collect());
        }
        Self::from_rows(rows)
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.r == o.r && self.entries.iter().zip(&o.entries).all(|(a, b)| a.agrees_with(b))
    }
}

impl Mat<TruncElem> {
    pub fn sigma(&self) -> Self {
        self.map(|e| e.sigma())
    }
    pub fn recenter(&self) -> Self {
        self.map(|e| e.recenter())
    }
    pub fn uncenter(&self) -> Self {
        self.map(|e| e.uncenter())
    }
    pub fn project(&self, target: &Arc<TruncRing>) -> Result<Self, MatrixError> {
        Ok(self.try_map(|e| e.project(target))?)
    }
    pub fn lift(&self, target: &Arc<TruncRing>) -> Result<Self, MatrixError> {
        Ok(self.try_map(|e| e.lift(target))?)
    }
}

/// Outcome of one boundedness condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail(String),
    Undecidable(String),
}

impl CheckStatus {
    pub fn passed(&self) -> bool {
        matches!(self, CheckStatus::Pass)
    }
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail(_) => "fail",
            CheckStatus::Undecidable(_) => "undecidable",
        }
    }
    pub fn detail(&self) -> Option<&str> {
        match self {
            CheckStatus::Pass => None,
            CheckStatus::Fail(s) | CheckStatus::Undecidable(s) => Some(s),
        }
    }
}

/// Result of [`check_bounded`]: one status per exterior power, plus the unit condition on
/// the determinant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedReport {
    pub divisibility: Vec<CheckStatus>,
    pub det_unit: CheckStatus,
}

impl BoundedReport {
    pub fn passed(&self) -> bool {
        self.divisibility.iter().all(CheckStatus::passed) && self.det_unit.passed()
    }
    pub fn undecidable(&self) -> bool {
        self.divisibility.iter().chain([&self.det_unit]).any(|s| matches!(s, CheckStatus::Undecidable(_)))
    }
}

/// Boundedness of τ by a decreasing μ: every entry of ∧^i τ is divisible by
/// (z − ζ)^{μ_{r−i+1}+…+μ_r}, and det τ·(z − ζ)^{−Σμ} is a unit. Decided in w-coordinates.
pub fn check_bounded(tau: &MatSeries, mu: &[i64]) -> Result<BoundedReport, MatrixError> {
    let r = tau.rank();
    if mu.len() != r {
        return Err(MatrixError::Shape(format!("mu has {} entries for rank {r}", mu.len())));
    }
    let to_w = |m: &MatSeries| if m.center() == Center::Z { m.recenter() } else { m.clone() };
    let mut divisibility = Vec::with_capacity(r);
    for i in 1..=r {
        let k: i64 = mu[r - i..].iter().sum();
        let wi = to_w(&tau.wedge(i)?);
        let mut status = CheckStatus::Pass;
        for (idx, e) in wi.entries().enumerate() {
            match e.divisible_by_var_pow(k) {
                Ok(true) => {}
                Ok(false) => {
                    status = CheckStatus::Fail(format!("entry {idx} of wedge^{i} not divisible by (z-zeta)^{k}"));
                    break;
                }
                Err(err) => {
                    status = CheckStatus::Undecidable(err.to_string());
                }
            }
        }
        divisibility.push(status);
    }
    let total: i64 = mu.iter().sum();
    let det = tau.det();
    let det = if det.center() == Center::Z { det.recenter() } else { det };
    let u = det.shift(-total);
    let det_unit = if u.lo().is_some_and(|e| e < 0) {
        CheckStatus::Fail("det has a pole after dividing by (z-zeta)^{sum mu}".into())
    } else if u.coeff(0).is_unit() {
        CheckStatus::Pass
    } else if u.prec().is_some_and(|z| z < 1) {
        CheckStatus::Undecidable("constant term of det/(z-zeta)^{sum mu} unknown".into())
    } else {
        CheckStatus::Fail("det/(z-zeta)^{sum mu} is not a unit".into())
    };
    Ok(BoundedReport { divisibility, det_unit })
}
