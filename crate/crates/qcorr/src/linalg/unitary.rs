//! Deterministic completion of an isometry to a square unitary.

use num_complex::Complex64;

use super::matrix::{vec_dot, vec_norm, ComplexMatrix};
use crate::error::{Error, Result};

const RESIDUAL_SKIP: f64 = 1e-8;

/// Extends an isometry `V` (orthonormal columns, rows >= cols) to a square
/// unitary whose first `cols` columns are bit-identical copies of `V`.
///
/// Remaining columns come from Gram-Schmidt over the identity basis in index
/// order, skipping candidates whose orthogonal residual is shorter than 1e-8.
/// The procedure involves no randomness, so the output is a pure function of
/// the input bytes.
pub fn complete_to_unitary(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = v.rows();
    let k = v.cols();
    if n < k {
        return Err(Error::DimensionMismatch(format!(
            "isometry must be tall, got {n}x{k}"
        )));
    }
    let gram = &v.adjoint() * v;
    let residual = gram.max_diff(&ComplexMatrix::identity(k));
    if residual > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "columns are not orthonormal: residual {residual:.3e}"
        )));
    }

    let mut columns: Vec<Vec<Complex64>> = (0..k).map(|j| v.column(j)).collect();
    for cand in 0..n {
        if columns.len() == n {
            break;
        }
        let mut r: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n];
        r[cand] = Complex64::new(1.0, 0.0);
        // two projection passes keep the new column orthogonal to working precision
        for _ in 0..2 {
            for u in &columns {
                let overlap = vec_dot(u, &r);
                for (ri, ui) in r.iter_mut().zip(u) {
                    *ri -= ui * overlap;
                }
            }
        }
        let nrm = vec_norm(&r);
        if nrm < RESIDUAL_SKIP {
            continue;
        }
        for z in &mut r {
            *z /= nrm;
        }
        columns.push(r);
    }
    if columns.len() < n {
        return Err(Error::NumericalFailure(
            "failed to complete isometry to a unitary".into(),
        ));
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for (j, col) in columns.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u.set(i, j, z);
        }
    }
    Ok(u)
}
