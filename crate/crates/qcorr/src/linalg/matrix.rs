//! Dense complex matrices and the tensor-index conventions used crate-wide.
//!
//! Composite systems are indexed with subsystem 1 as the slow index:
//! `(i1, i2) -> i1 * d2 + i2`. Kronecker products, partial traces and partial
//! transposes all follow this convention.

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Factor selector for partial operations on a bipartite index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    /// The slow (left) tensor factor.
    First,
    /// The fast (right) tensor factor.
    Second,
}

/// Dense complex matrix in row-major layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from nested rows, rejecting ragged shapes and non-finite entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidInput("matrix must be non-empty".into()));
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::InvalidInput("ragged matrix rows".into()));
            }
            for &z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::InvalidInput("non-finite matrix entry".into()));
                }
                data.push(z);
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Reinterprets a length `rows*cols` vector as a row-major matrix.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{} entries, got {}",
                rows,
                cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    /// Matrix unit |i><j|.
    pub fn matrix_unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m.set(i, j, Complex64::new(1.0, 0.0));
        m
    }

    /// Computational basis column vector |i> as a dim x 1 matrix.
    pub fn basis_column(dim: usize, i: usize) -> Self {
        let mut m = Self::zeros(dim, 1);
        m.set(i, 0, Complex64::new(1.0, 0.0));
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise difference to `other`; matrices must share shape.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// ||M - M^dag||_max; panics on non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Hermitian within `tol * max(1, ||M||_max)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_residual() <= tol * self.norm_max().max(1.0)
    }

    /// (M + M^dag) / 2.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// Kronecker product; index convention `(i1, i2) -> i1 * rows2 + i2`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.set(
                            i1 * other.rows + i2,
                            j1 * other.cols + j2,
                            a * other.get(i2, j2),
                        );
                    }
                }
            }
        }
        out
    }

    fn check_bipartite(&self, dims: (usize, usize)) -> Result<()> {
        let (d1, d2) = dims;
        if d1 == 0 || d2 == 0 {
            return Err(Error::InvalidInput(
                "subsystem dimensions must be >= 1".into(),
            ));
        }
        if !self.is_square() || self.rows != d1 * d2 {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected square of side {}*{}",
                self.rows, self.cols, d1, d2
            )));
        }
        Ok(())
    }

    /// Traces out the named factor; the result lives on the other one.
    pub fn partial_trace(&self, dims: (usize, usize), subsystem: Subsystem) -> Result<Self> {
        self.check_bipartite(dims)?;
        let (d1, d2) = dims;
        match subsystem {
            Subsystem::First => {
                let mut out = Self::zeros(d2, d2);
                for i2 in 0..d2 {
                    for j2 in 0..d2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..d1 {
                            acc += self.get(k * d2 + i2, k * d2 + j2);
                        }
                        out.set(i2, j2, acc);
                    }
                }
                Ok(out)
            }
            Subsystem::Second => {
                let mut out = Self::zeros(d1, d1);
                for i1 in 0..d1 {
                    for j1 in 0..d1 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..d2 {
                            acc += self.get(i1 * d2 + k, j1 * d2 + k);
                        }
                        out.set(i1, j1, acc);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Transposes only the named factor's indices; involutive.
    pub fn partial_transpose(&self, dims: (usize, usize), subsystem: Subsystem) -> Result<Self> {
        self.check_bipartite(dims)?;
        let (d1, d2) = dims;
        let mut out = Self::zeros(self.rows, self.cols);
        for i1 in 0..d1 {
            for i2 in 0..d2 {
                for j1 in 0..d1 {
                    for j2 in 0..d2 {
                        let v = match subsystem {
                            Subsystem::First => self.get(j1 * d2 + i2, i1 * d2 + j2),
                            Subsystem::Second => self.get(i1 * d2 + j2, j1 * d2 + i2),
                        };
                        out.set(i1 * d2 + i2, j1 * d2 + j2, v);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Tr[A * B] without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.cols(), b.rows(), "trace_product shape mismatch");
    assert_eq!(a.rows(), b.cols(), "trace_product shape mismatch");
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// Conjugate inner product v^dag w.
pub fn vec_dot(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    assert_eq!(v.len(), w.len());
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Quadratic form v^dag M v.
pub fn quadratic_form(m: &ComplexMatrix, v: &[Complex64]) -> Complex64 {
    let mv = m.mul_vec(v);
    vec_dot(v, &mv)
}

pub fn pauli_x() -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    ComplexMatrix::from_rows(&[vec![o, l], vec![l, o]]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    ComplexMatrix::from_rows(&[vec![o, -i], vec![i, o]]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    ComplexMatrix::from_rows(&[vec![l, o], vec![o, -l]]).unwrap()
}

/// Projector |i><i| on a `dim`-dimensional space.
pub fn basis_projector(dim: usize, i: usize) -> ComplexMatrix {
    ComplexMatrix::matrix_unit(dim, i, i)
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * rhs.get(k, j));
                }
            }
        }
        out
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                let z = self.get(i, j);
                if j > 0 {
                    write!(f, "  ")?;
                }
                write!(f, "{:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
