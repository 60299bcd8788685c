//! Dense complex linear algebra primitives: matrices, Kronecker structure,
//! Hermitian eigendecomposition and isometry-to-unitary completion.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs, so everything here is safe to share across threads.

mod eigen;
mod matrix;
mod unitary;

pub use eigen::{eig_hermitian, HermitianEigen};
pub use matrix::{
    basis_projector, pauli_x, pauli_y, pauli_z, quadratic_form, trace_product, vec_dot, vec_norm,
    ComplexMatrix, Subsystem,
};
pub use unitary::complete_to_unitary;
