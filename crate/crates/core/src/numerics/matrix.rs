use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;

use super::{is_finite, Complex};
use crate::{Error, Result};

/// Tolerance on `|a_ij − conj(a_ji)|`, relative to `max(1, max|a|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data; fails if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::validation("matrix data length does not match its shape"));
        }
        Ok(CMatrix { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::validation("columns have different lengths"));
        }
        Ok(Self::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(Error::validation("matrix product shape mismatch"));
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex]) -> Vec<Complex> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| is_finite(*z))
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::validation("matrix difference shape mismatch"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex;

    fn index(&self, (i, j): (usize, usize)) -> &Complex {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex {
        &mut self.data[i * self.cols + j]
    }
}

/// A finite square matrix equal to its conjugate transpose.
///
/// Construction checks Hermiticity to [`HERMITIAN_TOL`] and then stores the
/// exactly Hermitian part `(A + A†)/2`, so every stored matrix is Hermitian to
/// the last bit.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::validation("Hermitian matrix must be square"));
        }
        if m.rows() == 0 {
            return Err(Error::validation("Hermitian matrix must have positive dimension"));
        }
        if !m.is_finite() {
            return Err(Error::validation("matrix has non-finite entries"));
        }
        let scale = m.max_abs().max(1.0);
        let n = m.rows();
        for i in 0..n {
            for j in i..n {
                if (m[(i, j)] - m[(j, i)].conj()).norm() > HERMITIAN_TOL * scale {
                    return Err(Error::validation("matrix is not Hermitian"));
                }
            }
        }
        Ok(Self::hermitian_part(&m))
    }

    /// `(A + A†)/2` without any tolerance check beyond finiteness and shape.
    pub fn symmetrized(m: &CMatrix) -> Result<Self> {
        if m.rows() != m.cols() || m.rows() == 0 {
            return Err(Error::validation("matrix must be square with positive dimension"));
        }
        if !m.is_finite() {
            return Err(Error::validation("matrix has non-finite entries"));
        }
        Ok(Self::hermitian_part(m))
    }

    fn hermitian_part(m: &CMatrix) -> Self {
        let n = m.rows();
        let inner = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(m[(i, i)].re, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        HermitianMatrix { inner }
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(values[i], 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    /// Multiplies every entry by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        let n = self.dim();
        HermitianMatrix {
            inner: CMatrix::from_fn(n, n, |i, j| self.inner[(i, j)] * factor),
        }
    }

    /// Rescales to unit trace.
    pub fn normalized_trace(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr.is_finite() && tr.abs() > f64::MIN_POSITIVE) {
            return Err(Error::Degenerate("cannot renormalise a matrix with zero trace".into()));
        }
        Ok(self.scaled(1.0 / tr))
    }

    /// Largest deviation from exact Hermitian symmetry (always 0 for stored matrices).
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn projector(v: &[Complex]) -> Result<Self> {
        let n = v.len();
        Self::symmetrized(&CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj()))
    }
}
