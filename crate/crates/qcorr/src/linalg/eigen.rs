//! Cyclic Jacobi eigensolver for Hermitian matrices.
//!
//! Each rotation annihilates one off-diagonal pivot with a complex plane
//! rotation; sweeps repeat until the off-diagonal Frobenius norm falls below
//! `1e-13 * ||M||_F` or 100 sweeps have run. Adequate and dependency-free at
//! the matrix sizes this crate works with (side <= ~100).

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Spectral decomposition of a Hermitian matrix.
///
/// `values` are ascending; `vectors` holds the matching orthonormal
/// eigenvectors as columns, each scaled so its largest entry is real and
/// non-negative (a deterministic phase convention).
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `Sum_k values[k] * v_k v_k^dag` restricted to the selected indices.
    pub fn reconstruct_from(&self, indices: &[usize]) -> ComplexMatrix {
        let n = self.vectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for &k in indices {
            let v = self.vectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + v[i] * v[j].conj() * self.values[k]);
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let all: Vec<usize> = (0..self.values.len()).collect();
        self.reconstruct_from(&all)
    }
}

const MAX_SWEEPS: usize = 100;

/// Full spectral decomposition of a Hermitian matrix.
///
/// The input must satisfy `||M - M^dag||_max <= 1e-9 * max(1, ||M||_max)`;
/// the residual asymmetry is symmetrized away before iterating.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let residual = m.hermiticity_residual();
    if residual > 1e-9 * m.norm_max().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "matrix is not Hermitian: residual {residual:.3e}"
        )));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut q = ComplexMatrix::identity(n);

    let fro = a.norm_fro();
    if fro > 0.0 {
        let threshold = 1e-13 * fro;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= threshold {
                break;
            }
            for p in 0..n - 1 {
                for r in p + 1..n {
                    rotate(&mut a, &mut q, p, r);
                }
            }
        }
        if off_diagonal_norm(&a) > 1e-7 * fro {
            return Err(Error::NumericalFailure(
                "Jacobi iteration did not converge".into(),
            ));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        a.get(x, x)
            .re
            .partial_cmp(&a.get(y, y).re)
            .unwrap()
            .then(x.cmp(&y))
    });
    let values: Vec<f64> = order.iter().map(|&k| a.get(k, k).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = q.column(src);
        let phase = dominant_phase(&col);
        for (i, &z) in col.iter().enumerate() {
            vectors.set(i, dst, z * phase);
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Unit factor that makes the largest-magnitude entry real and non-negative.
fn dominant_phase(v: &[Complex64]) -> Complex64 {
    let mut best = 0usize;
    let mut best_mag = 0.0;
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    if best_mag == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        v[best].conj() / best_mag
    }
}

/// One complex Jacobi rotation annihilating the (p, r) pivot of `a`,
/// accumulated into `q`. Keeps `a` Hermitian and its diagonal real.
fn rotate(a: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize) {
    let n = a.rows();
    let pivot = a.get(p, r);
    let mag = pivot.norm();
    if mag < 1e-300 {
        return;
    }
    let phase = pivot / mag;
    let app = a.get(p, p).re;
    let arr = a.get(r, r).re;
    // annihilation condition: t^2 - 2*tau*t - 1 = 0 with tau = (arr-app)/(2|pivot|)
    let tau = (arr - app) / (2.0 * mag);
    let t = -tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // columns: A <- A R with R = [[c, -s e^{i b}], [s e^{-i b}, c]]
    for k in 0..n {
        let akp = a.get(k, p);
        let akr = a.get(k, r);
        a.set(k, p, akp * c + akr * phase.conj() * s);
        a.set(k, r, akr * c - akp * phase * s);
    }
    // rows: A <- R^dag A
    for k in 0..n {
        let apk = a.get(p, k);
        let ark = a.get(r, k);
        a.set(p, k, apk * c + ark * phase * s);
        a.set(r, k, ark * c - apk * phase.conj() * s);
    }
    a.set(p, r, Complex64::new(0.0, 0.0));
    a.set(r, p, Complex64::new(0.0, 0.0));
    let dp = a.get(p, p);
    let dr = a.get(r, r);
    a.set(p, p, Complex64::new(dp.re, 0.0));
    a.set(r, r, Complex64::new(dr.re, 0.0));

    for k in 0..n {
        let qkp = q.get(k, p);
        let qkr = q.get(k, r);
        q.set(k, p, qkp * c + qkr * phase.conj() * s);
        q.set(k, r, qkr * c - qkp * phase * s);
    }
}
