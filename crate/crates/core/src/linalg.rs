//! Fixed-capacity vectors and matrices for points of `R^d`, `d <= MAX_DIM`.
//!
//! Walk positions are updated millions of times per experiment, so these are
//! plain `Copy` values that never touch the heap.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    dim: u8,
    coords: [f64; MAX_DIM],
}

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "dimension {dim} outside 1..={MAX_DIM}"
        );
        Self {
            dim: dim as u8,
            coords: [0.0; MAX_DIM],
        }
    }

    pub fn from_slice(values: &[f64]) -> Self {
        let mut v = Self::zeros(values.len());
        v.coords[..values.len()].copy_from_slice(values);
        v
    }

    /// Unit vector along axis `axis`.
    pub fn basis(dim: usize, axis: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[axis] = 1.0;
        v
    }

    /// The point `(s, 0, ..., 0)`.
    pub fn along_first_axis(dim: usize, s: f64) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[0] = s;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim()]
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        let d = self.dim();
        &mut self.coords[..d]
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Sup norm; `|x|_inf <= r` is membership in the closed box `[-r, r]^d`.
    pub fn sup_norm(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn outer(&self, other: &Vector) -> Matrix {
        let d = self.dim();
        let mut m = Matrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.entries[i][j] = self.coords[i] * other.coords[j];
            }
        }
        m
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        let mut out = *self;
        for c in out.as_mut_slice() {
            *c = f(*c);
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for Vector {
    #[inline]
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    #[inline]
    fn add(mut self, rhs: Vector) -> Vector {
        self += rhs;
        self
    }
}

impl AddAssign for Vector {
    #[inline]
    fn add_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim() {
            self.coords[i] += rhs.coords[i];
        }
    }
}

impl Sub for Vector {
    type Output = Vector;
    #[inline]
    fn sub(mut self, rhs: Vector) -> Vector {
        self -= rhs;
        self
    }
}

impl SubAssign for Vector {
    #[inline]
    fn sub_assign(&mut self, rhs: Vector) {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..self.dim() {
            self.coords[i] -= rhs.coords[i];
        }
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;
    #[inline]
    fn mul(self, s: f64) -> Vector {
        self.map(|c| c * s)
    }
}

impl Neg for Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.map(|c| -c)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(d)?;
        if values.is_empty() || values.len() > MAX_DIM {
            return Err(serde::de::Error::custom(format!(
                "vector length {} outside 1..={MAX_DIM}",
                values.len()
            )));
        }
        Ok(Vector::from_slice(&values))
    }
}

/// Square `d x d` matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix {
    dim: u8,
    entries: [[f64; MAX_DIM]; MAX_DIM],
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Self {
            dim: dim as u8,
            entries: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&Vector::from_slice(&vec![1.0; dim]))
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        Self::diagonal(&Vector::from_slice(&vec![s; dim]))
    }

    pub fn diagonal(diag: &Vector) -> Self {
        let mut m = Self::zeros(diag.dim());
        for i in 0..diag.dim() {
            m.entries[i][i] = diag[i];
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let d = rows.len();
        let mut m = Self::zeros(d);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), d, "matrix rows must be square");
            m.entries[i][..d].copy_from_slice(row);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.dim() && j < self.dim());
        self.entries[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.dim() && j < self.dim());
        self.entries[i][j] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[i][i]).sum()
    }

    pub fn diag(&self) -> Vector {
        let mut v = Vector::zeros(self.dim());
        for i in 0..self.dim() {
            v[i] = self.entries[i][i];
        }
        v
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.entries[i][..self.dim()].to_vec())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.rows().iter().flatten().all(|x| x.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| (self.entries[i][j] - self.entries[j][i]).abs() <= tol))
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        let d = self.dim();
        let mut out = Vector::zeros(d);
        for i in 0..d {
            out[i] = (0..d).map(|j| self.entries[i][j] * v[j]).sum();
        }
        out
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        let d = self.dim();
        let mut m: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                m = m.max((self.entries[i][j] - other.entries[i][j]).abs());
            }
        }
        m
    }

    /// Lower-triangular `L` with `L L^T = self` for a symmetric positive
    /// semi-definite matrix. Zero pivots (within `tol`) produce zero columns,
    /// so degenerate covariances are accepted. Returns `None` when a pivot is
    /// negative beyond `tol`.
    pub fn cholesky_psd(&self, tol: f64) -> Option<Matrix> {
        let d = self.dim();
        let mut l = Matrix::zeros(d);
        for j in 0..d {
            let mut pivot = self.entries[j][j];
            for k in 0..j {
                pivot -= l.entries[j][k] * l.entries[j][k];
            }
            if pivot < -tol {
                return None;
            }
            if pivot <= tol {
                // Column is (numerically) zero; the remaining rows must agree.
                for i in j + 1..d {
                    let mut s = self.entries[i][j];
                    for k in 0..j {
                        s -= l.entries[i][k] * l.entries[j][k];
                    }
                    if s.abs() > tol.sqrt().max(tol) {
                        return None;
                    }
                }
                continue;
            }
            let root = pivot.sqrt();
            l.entries[j][j] = root;
            for i in j + 1..d {
                let mut s = self.entries[i][j];
                for k in 0..j {
                    s -= l.entries[i][k] * l.entries[j][k];
                }
                l.entries[i][j] = s / root;
            }
        }
        Some(l)
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(mut self, rhs: Matrix) -> Matrix {
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                self.entries[i][j] += rhs.entries[i][j];
            }
        }
        self
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        self + rhs.scale(-1.0)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        if rows.is_empty() || rows.len() > MAX_DIM || rows.iter().any(|r| r.len() != rows.len()) {
            return Err(serde::de::Error::custom("matrix must be square with size 1..=4"));
        }
        Ok(Matrix::from_rows(&rows))
    }
}
