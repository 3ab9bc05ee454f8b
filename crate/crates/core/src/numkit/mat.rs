use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, Zero};

use super::scalar::{real, Real, Scalar};
use crate::error::{Error, Result};

/// Absolute/relative tolerance pair used for approximate comparisons.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance<R> {
    pub abs: R,
    pub rel: R,
}

impl<R: Real> Tolerance<R> {
    pub fn new(abs: R, rel: R) -> Result<Self> {
        if !abs.is_finite() || !rel.is_finite() || abs < R::zero() || rel < R::zero() {
            return Err(Error::InvalidInput(format!(
                "tolerances must be finite and non-negative (abs = {abs}, rel = {rel})"
            )));
        }
        Ok(Self { abs, rel })
    }

    /// Purely absolute tolerance.
    pub fn absolute(abs: R) -> Self {
        Self { abs, rel: R::zero() }
    }

    /// Bound allowed for a difference between quantities of size `scale`.
    pub fn bound(&self, scale: R) -> R {
        self.abs + self.rel * scale
    }
}

impl<R: Real> Default for Tolerance<R> {
    fn default() -> Self {
        Self { abs: real(1e-12), rel: real(1e-12) }
    }
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[S]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[S]>>(n_rows: usize, cols: &[C]) -> Result<Self> {
        let mut m = Self::zeros(n_rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            let c = c.as_ref();
            if c.len() != n_rows {
                return Err(Error::DimensionMismatch("column length".into()));
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn diag(entries: &[S]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[S]) {
        assert_eq!(v.len(), self.rows);
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Submatrix of the given column range.
    pub fn select_columns(&self, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols.start + j)])
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row count".into()));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)]
            } else {
                other[(i, j - self.cols)]
            }
        }))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: S) -> Self {
        self.map(|x| x * s)
    }

    pub fn scale_real(&self, r: S::Real) -> Self {
        self.map(|x| x.mul_real(r))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> S::Real {
        self.data.iter().map(|x| x.modulus_sqr()).sum::<S::Real>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> S::Real {
        self.data.iter().fold(S::Real::zero(), |m, x| m.max(x.modulus()))
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> S::Real {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in max_abs_diff");
        self.data
            .iter()
            .zip(&other.data)
            .fold(S::Real::zero(), |m, (&a, &b)| m.max((a - b).modulus()))
    }

    /// `max |A_ij - B_ij| <= abs + rel * max(|A|, |B|)`; false on shape mismatch.
    pub fn approx_eq(&self, other: &Self, tol: Tolerance<S::Real>) -> bool {
        if self.shape() != other.shape() {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs());
        self.max_abs_diff(other) <= tol.bound(scale)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == S::zero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn is_upper_triangular(&self, tol: S::Real) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].modulus() <= tol))
    }

    pub fn is_strictly_upper_triangular(&self, tol: S::Real) -> bool {
        (0..self.rows).all(|i| (0..=i.min(self.cols.saturating_sub(1))).all(|j| self[(i, j)].modulus() <= tol))
    }

    pub fn is_diagonal(&self, tol: S::Real) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)].modulus() <= tol))
    }

    /// Frobenius inner product `Re tr(A^* B)`.
    pub fn real_inner(&self, other: &Self) -> S::Real {
        assert_eq!(self.shape(), other.shape());
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a.conj() * b).re()).sum()
    }
}

impl<R: Real> Mat<R> {
    pub fn to_complex(&self) -> Mat<Complex<R>> {
        self.map(Complex::from_real)
    }
}

impl<R: Real> Mat<Complex<R>> {
    pub fn re_part(&self) -> Mat<R> {
        self.map(|z| z.re)
    }

    pub fn im_part(&self) -> Mat<R> {
        self.map(|z| z.im)
    }

    /// Real vector `(Re entries, Im entries)` used when treating complex
    /// matrix spaces as real vector spaces.
    pub fn realify(&self) -> Vec<R> {
        self.data.iter().map(|z| z.re).chain(self.data.iter().map(|z| z.im)).collect()
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

macro_rules! elementwise {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<S: Scalar> $tr<&Mat<S>> for &Mat<S> {
            type Output = Mat<S>;
            fn $f(self, rhs: &Mat<S>) -> Mat<S> {
                assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
                Mat {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a $op b).collect(),
                }
            }
        }
        impl<S: Scalar> $tr<Mat<S>> for Mat<S> {
            type Output = Mat<S>;
            fn $f(self, rhs: Mat<S>) -> Mat<S> {
                (&self).$f(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl<S: Scalar> AddAssign<&Mat<S>> for Mat<S> {
    fn add_assign(&mut self, rhs: &Mat<S>) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl<S: Scalar> SubAssign<&Mat<S>> for Mat<S> {
    fn sub_assign(&mut self, rhs: &Mat<S>) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl<S: Scalar> Mul<&Mat<S>> for &Mat<S> {
    type Output = Mat<S>;
    fn mul(self, rhs: &Mat<S>) -> Mat<S> {
        self.matmul(rhs)
    }
}

impl<S: Scalar> Mul<Mat<S>> for Mat<S> {
    type Output = Mat<S>;
    fn mul(self, rhs: Mat<S>) -> Mat<S> {
        self.matmul(&rhs)
    }
}

impl<S: Scalar> Neg for &Mat<S> {
    type Output = Mat<S>;
    fn neg(self) -> Mat<S> {
        self.map(|x| -x)
    }
}

impl<S: Scalar> Neg for Mat<S> {
    type Output = Mat<S>;
    fn neg(self) -> Mat<S> {
        -&self
    }
}

impl<S: Scalar> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// Formats complex matrices entry by entry with a fixed precision, for
/// human-readable CLI output.
pub fn format_complex<R: Real>(m: &Mat<Complex<R>>, precision: usize) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let cells: Vec<String> = m
            .row(i)
            .iter()
            .map(|z| {
                let re = if z.re.abs() < real(1e-14) { R::zero() } else { z.re };
                let im = if z.im.abs() < real(1e-14) { R::zero() } else { z.im };
                format!("{re:>w$.p$}{im:>+w$.p$}i", w = precision + 4, p = precision)
            })
            .collect();
        out.push_str("  [");
        out.push_str(&cells.join(", "));
        out.push_str("]\n");
    }
    out
}

/// Serde adapter: real matrices as nested row arrays.
pub mod rows_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<R: Real + Serialize, Ser: Serializer>(m: &Mat<R>, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<&[R]> = (0..m.rows()).map(|i| m.row(i)).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, R: Real + Deserialize<'de>, D: Deserializer<'de>>(d: D) -> std::result::Result<Mat<R>, D::Error> {
        let rows: Vec<Vec<R>> = Vec::deserialize(d)?;
        Mat::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter: lists of real matrices.
pub mod rows_vec_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<R: Real + Serialize, Ser: Serializer>(ms: &[Mat<R>], s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let all: Vec<Vec<&[R]>> = ms.iter().map(|m| (0..m.rows()).map(|i| m.row(i)).collect()).collect();
        all.serialize(s)
    }

    pub fn deserialize<'de, R: Real + Deserialize<'de>, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Mat<R>>, D::Error> {
        let all: Vec<Vec<Vec<R>>> = Vec::deserialize(d)?;
        all.iter().map(|rows| Mat::from_rows(rows).map_err(serde::de::Error::custom)).collect()
    }
}

impl<S: Scalar> Add<S> for &Mat<S> {
    type Output = Mat<S>;
    /// Adds `s * I`.
    fn add(self, s: S) -> Mat<S> {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] += s;
        }
        m
    }
}
