//! The ideal correlator map `T` with `Tr[T(rho) (A (x) B)] = Tr[A rho B]`,
//! its Hermitian/anti-Hermitian split into HP components, and the exact
//! ground-truth evaluation of two-point correlation functions.

use num_complex::Complex64;

use crate::channels::{validate_observable, validate_state, LinearMap};
use crate::error::{Error, Result};
use crate::linalg::{trace_product, ComplexMatrix, Subsystem};

/// HP components of the ideal correlator: expectations of `real_part` and
/// `imag_part` against `A (x) B` recover `Re Tr[A rho B]` and `Im Tr[A rho B]`.
#[derive(Clone, Debug)]
pub struct CorrelatorPair {
    dim: usize,
    real_part: LinearMap,
    imag_part: LinearMap,
}

impl CorrelatorPair {
    /// Builds the ideal correlator for dimension `dim` and splits it.
    pub fn for_dimension(dim: usize) -> Result<Self> {
        hermitian_split(&ideal_correlator(dim)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn real_part(&self) -> &LinearMap {
        &self.real_part
    }

    pub fn imag_part(&self) -> &LinearMap {
        &self.imag_part
    }

    /// `Tr[A rho B]` evaluated through the two HP maps (Choi route); the
    /// sampling-free cross-check of the split.
    pub fn expectation(
        &self,
        rho: &ComplexMatrix,
        a: &ComplexMatrix,
        b: &ComplexMatrix,
    ) -> Result<Complex64> {
        let obs = a.kron(b);
        let re = trace_product(&self.real_part.apply(rho)?, &obs).re;
        let im = trace_product(&self.imag_part.apply(rho)?, &obs).re;
        Ok(Complex64::new(re, im))
    }
}

/// The ideal correlator `T: L(H_d) -> L(H_d (x) H_d)`.
///
/// Constructed as `T(rho) = PT_2[(rho (x) 1) |Omega><Omega|]` with the
/// unnormalized `|Omega> = sum_i |ii>`; the closed form is validated against
/// the defining identity `Tr[T(rho)(A (x) B)] = Tr[A rho B]` in the tests
/// rather than trusted. Not Hermiticity-preserving.
pub fn ideal_correlator(dim: usize) -> Result<LinearMap> {
    if dim < 2 {
        return Err(Error::InvalidInput(format!(
            "correlator needs dimension >= 2, got {dim}"
        )));
    }
    let identity = ComplexMatrix::identity(dim);
    let omega = ComplexMatrix::from_vec(dim * dim, 1, identity.entries().to_vec())?;
    let omega_proj = &omega * &omega.adjoint();
    let mut images = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let unit = ComplexMatrix::matrix_unit(dim, i, j);
            let lifted = &unit.kron(&identity) * &omega_proj;
            images.push(lifted.partial_transpose((dim, dim), Subsystem::Second)?);
        }
    }
    LinearMap::from_action(dim, dim * dim, &images)
}

/// Splits a map into HP components via its Choi matrix:
/// `choi_real = (C + C^dag)/2`, `choi_imag = (C - C^dag)/(2i)`, so that
/// `C = choi_real + i choi_imag`. The input must have `dim_out = dim_in^2`.
pub fn hermitian_split(map: &LinearMap) -> Result<CorrelatorPair> {
    let dim = map.dim_in();
    if map.dim_out() != dim * dim {
        return Err(Error::DimensionMismatch(format!(
            "correlator-shaped map must have dim_out = dim_in^2, got {} -> {}",
            dim,
            map.dim_out()
        )));
    }
    let choi = map.choi();
    let adj = choi.adjoint();
    let real_choi = (choi + &adj).scale(Complex64::new(0.5, 0.0));
    let imag_choi = (choi - &adj).scale(Complex64::new(0.0, -0.5));
    Ok(CorrelatorPair {
        dim,
        real_part: LinearMap::new(dim, dim * dim, real_choi)?,
        imag_part: LinearMap::new(dim, dim * dim, imag_choi)?,
    })
}

/// Ground-truth oracle: the direct matrix-product trace `Tr[A rho B]`.
pub fn exact_correlation(
    rho: &ComplexMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<Complex64> {
    validate_state(rho)?;
    validate_observable(a)?;
    validate_observable(b)?;
    if a.rows() != rho.rows() || b.rows() != rho.rows() {
        return Err(Error::DimensionMismatch(format!(
            "state and observables must share one dimension, got {}, {}, {}",
            rho.rows(),
            a.rows(),
            b.rows()
        )));
    }
    Ok((&(a * rho) * b).trace())
}
