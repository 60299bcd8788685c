//! Operational access to two-point quantum correlation functions `Tr[A rho B]`.
//!
//! The product of two observables is generally not an observable, so a value
//! like `Tr[A rho B]` has no single measurement that produces it. This crate
//! builds the machinery that makes it operationally accessible anyway:
//!
//! - [`correlator`]: the linear map `T` with `Tr[T(rho)(A (x) B)] = Tr[A rho B]`,
//!   split into two Hermiticity-preserving components for its real and
//!   imaginary parts, plus the exact ground-truth evaluation.
//! - [`channels`]: Choi-matrix maps, Kraus extraction, and statistical
//!   decompositions `L = sum_i lambda_i E_i` of any HP map into a quantum
//!   instrument with classical weights.
//! - [`dilation`]: realization of a decomposition as a partial expectation
//!   value `Tr[V rho V^dag (A (x) Z)]` via an isometry `V`, ancilla projectors
//!   and the diagonal ancilla observable `Z`, with a deterministic unitary
//!   completion of `V`.
//! - [`simulate`]: seeded Monte Carlo runs of the instrument protocol with
//!   unbiased estimates, tracked standard errors and a Robertson
//!   uncertainty-relation check.
//! - [`linalg`]: the dense complex matrix layer everything sits on, including
//!   a cyclic Jacobi eigensolver and isometry-to-unitary completion.
//! - [`cli`]: matrix file parsing and the `qcorr` command implementations.
//!
//! # Quick start
//!
//! ```
//! use qcorr::linalg::{basis_projector, pauli_x, pauli_y};
//! use qcorr::correlator::exact_correlation;
//! use qcorr::simulate::estimate_correlation;
//!
//! let rho = basis_projector(2, 0); // |0><0|
//! let oracle = exact_correlation(&rho, &pauli_x(), &pauli_y()).unwrap();
//! assert!((oracle.im + 1.0).abs() < 1e-12);
//!
//! let est = estimate_correlation(&rho, &pauli_x(), &pauli_y(), 20_000, 7).unwrap();
//! assert!((est.estimate_im - oracle.im).abs() <= 5.0 * est.std_error_im);
//! ```
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example
//! sampling_protocol` is a good entry point.

pub mod channels;
pub mod cli;
pub mod correlator;
pub mod dilation;
mod error;
pub mod linalg;
pub mod random;
pub mod rng;
pub mod simulate;

pub use channels::{KrausSet, LinearMap, StatisticalDecomposition};
pub use correlator::CorrelatorPair;
pub use dilation::{dilate, Dilation};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use simulate::{CorrelationEstimate, EstimatorResult, UncertaintyReport};
