//! Realization of a statistical decomposition as a partial expectation value:
//! an isometry `V: H -> K (x) K'`, projectors `{P_i}` on the ancilla `K'`, the
//! ancilla observable `Z = sum_i lambda_i P_i` and a unitary completion `U`,
//! with `Tr[V rho V^dag (A (x) Z)] = Tr[L(rho) A]`.

use num_complex::Complex64;

use crate::channels::{validate_observable, validate_state, LinearMap, StatisticalDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{complete_to_unitary, trace_product, ComplexMatrix, Subsystem};

/// Isometric dilation of a weighted instrument.
///
/// Ancilla basis states are grouped by instrument outcome: outcome `i` with
/// `k_i` Kraus operators owns a contiguous block of `k_i` ancilla indices, so
/// each `P_i` is a diagonal 0/1 block and `Z` is diagonal.
#[derive(Clone, Debug)]
pub struct Dilation {
    dim_in: usize,
    dim_out: usize,
    ancilla_dim: usize,
    isometry: ComplexMatrix,
    unitary: ComplexMatrix,
    projectors: Vec<ComplexMatrix>,
    z_diagonal: Vec<f64>,
    coefficients: Vec<f64>,
    outcome_of_basis: Vec<usize>,
}

impl Dilation {
    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    /// `V`, a `(dim_out * ancilla_dim) x dim_in` matrix with `V^dag V = 1`.
    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    /// Square unitary whose first `dim_in` columns equal `V`.
    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// Outcome projectors on the ancilla; diagonal 0/1, summing to identity.
    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    /// Diagonal of the ancilla observable `Z = sum_i lambda_i P_i`.
    pub fn z_diagonal(&self) -> &[f64] {
        &self.z_diagonal
    }

    /// `Z` as a matrix on the ancilla.
    pub fn ancilla_observable(&self) -> ComplexMatrix {
        let entries: Vec<Complex64> = self
            .z_diagonal
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        ComplexMatrix::diagonal(&entries)
    }

    /// Instrument coefficients `lambda_i` in outcome order.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Maps each ancilla basis index to the instrument outcome that owns it.
    pub fn outcome_of_basis(&self) -> &[usize] {
        &self.outcome_of_basis
    }

    /// `V rho V^dag`, the dilated state on output (x) ancilla.
    pub fn dilated_state(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, expected side {}",
                rho.rows(),
                rho.cols(),
                self.dim_in
            )));
        }
        Ok(&(&self.isometry * rho) * &self.isometry.adjoint())
    }

    /// `Tr[V rho V^dag (A (x) Z)]`, which equals `Tr[L(rho) A]`.
    pub fn partial_expectation(&self, rho: &ComplexMatrix, a: &ComplexMatrix) -> Result<f64> {
        validate_state(rho)?;
        validate_observable(a)?;
        if a.rows() != self.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "observable has side {}, expected {}",
                a.rows(),
                self.dim_out
            )));
        }
        let dilated = self.dilated_state(rho)?;
        let obs = a.kron(&self.ancilla_observable());
        Ok(trace_product(&dilated, &obs).re)
    }

    /// Reassembles the represented map `rho -> Tr_K'[V rho V^dag (1 (x) Z)]`.
    pub fn reduced_map(&self) -> Result<LinearMap> {
        let lifted_z = ComplexMatrix::identity(self.dim_out).kron(&self.ancilla_observable());
        let mut images = Vec::with_capacity(self.dim_in * self.dim_in);
        for i in 0..self.dim_in {
            for j in 0..self.dim_in {
                let unit = ComplexMatrix::matrix_unit(self.dim_in, i, j);
                let dilated = &(&self.isometry * &unit) * &self.isometry.adjoint();
                let weighted = &dilated * &lifted_z;
                images.push(
                    weighted.partial_trace((self.dim_out, self.ancilla_dim), Subsystem::Second)?,
                );
            }
        }
        LinearMap::from_action(self.dim_in, self.dim_out, &images)
    }

    /// Embeds an input vector into the dilation space on the first `dim_in`
    /// basis vectors, the convention under which `U * embed(psi) = V psi`
    /// holds exactly. With a one-dimensional ancilla this is literally
    /// `psi (x) e_0`.
    pub fn embed_input(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "input vector has length {}, expected {}",
                psi.len(),
                self.dim_in
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim_out * self.ancilla_dim];
        out[..self.dim_in].copy_from_slice(psi);
        Ok(out)
    }

    /// Probability of ancilla outcome `i` on the dilated state,
    /// `Tr[V rho V^dag (1 (x) P_i)]`.
    pub fn outcome_probability(&self, rho: &ComplexMatrix, outcome: usize) -> Result<f64> {
        if outcome >= self.projectors.len() {
            return Err(Error::InvalidInput(format!("no outcome {outcome}")));
        }
        let dilated = self.dilated_state(rho)?;
        let lifted = ComplexMatrix::identity(self.dim_out).kron(&self.projectors[outcome]);
        Ok(trace_product(&dilated, &lifted).re)
    }
}

/// Builds the dilation of a statistical decomposition:
/// `V = sum_ik K_ik (x) |(i,k)>`, `P_i` the block projector of outcome `i`,
/// `Z = sum_i lambda_i P_i`, `U` the deterministic unitary completion of `V`.
///
/// `V` is an isometry precisely because the part sum is trace-preserving;
/// decompositions violating that are rejected.
pub fn dilate(dec: &StatisticalDecomposition) -> Result<Dilation> {
    if dec.is_empty() {
        return Err(Error::InvalidInput(
            "cannot dilate an empty decomposition".into(),
        ));
    }
    let dim_in = dec.dim_in().expect("non-empty");
    let dim_out = dec.dim_out().expect("non-empty");
    let tp_residual = dec
        .part_sum()?
        .trace_effect()
        .max_diff(&ComplexMatrix::identity(dim_in));
    if tp_residual > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "part sum is not trace-preserving: residual {tp_residual:.3e}"
        )));
    }

    let mut kraus_per_outcome = Vec::with_capacity(dec.len());
    for part in dec.parts() {
        kraus_per_outcome.push(part.kraus()?);
    }
    let ancilla_dim: usize = kraus_per_outcome.iter().map(|k| k.len()).sum();
    if ancilla_dim == 0 {
        return Err(Error::InvalidInput(
            "decomposition has no Kraus content".into(),
        ));
    }

    let mut isometry = ComplexMatrix::zeros(dim_out * ancilla_dim, dim_in);
    let mut outcome_of_basis = vec![0usize; ancilla_dim];
    let mut z_diagonal = vec![0.0f64; ancilla_dim];
    let mut offset = 0usize;
    for (i, kraus) in kraus_per_outcome.iter().enumerate() {
        for (k, op) in kraus.operators().iter().enumerate() {
            let m = offset + k;
            outcome_of_basis[m] = i;
            z_diagonal[m] = dec.coefficients()[i];
            for a in 0..dim_out {
                for j in 0..dim_in {
                    isometry.set(a * ancilla_dim + m, j, op.get(a, j));
                }
            }
        }
        offset += kraus.len();
    }

    let gram = &isometry.adjoint() * &isometry;
    let iso_residual = gram.max_diff(&ComplexMatrix::identity(dim_in));
    if iso_residual > 1e-9 {
        return Err(Error::NumericalFailure(format!(
            "assembled V is not an isometry: residual {iso_residual:.3e}"
        )));
    }

    let mut projectors = Vec::with_capacity(dec.len());
    for i in 0..dec.len() {
        let entries: Vec<Complex64> = outcome_of_basis
            .iter()
            .map(|&o| Complex64::new(if o == i { 1.0 } else { 0.0 }, 0.0))
            .collect();
        projectors.push(ComplexMatrix::diagonal(&entries));
    }

    let unitary = complete_to_unitary(&isometry)?;

    Ok(Dilation {
        dim_in,
        dim_out,
        ancilla_dim,
        isometry,
        unitary,
        projectors,
        z_diagonal,
        coefficients: dec.coefficients().to_vec(),
        outcome_of_basis,
    })
}
