//! Testing the Robertson uncertainty relation from sampled data alone:
//! the commutator expectation comes from two correlation estimates, the
//! spreads from direct single-observable sampling.
//!
//! ```bash
//! cargo run --example uncertainty_demo
//! ```

use qcorr::linalg::{basis_projector, pauli_x, pauli_y, ComplexMatrix};
use qcorr::simulate::uncertainty_check;

fn show(label: &str, rho: &ComplexMatrix) {
    let report = uncertainty_check(rho, &pauli_x(), &pauli_y(), 300_000, 7).unwrap();
    println!("{label}: A = sx, B = sy");
    println!(
        "  <[A,B]> estimate: {:+.4}{:+.4}i",
        report.commutator_re, report.commutator_im
    );
    println!(
        "  Robertson bound |<[A,B]>|/2: {:.4} +- {:.4}",
        report.bound, report.bound_std_error
    );
    println!(
        "  spreads: dA = {:.4}, dB = {:.4}, product {:.4}",
        report.delta_a, report.delta_b, report.product
    );
    println!("  verdict: {}\n", report.verdict);
}

fn main() {
    // pure |0><0|: dA dB = 1 and |<[sx, sy]>|/2 = |<sz>| = 1, saturation
    show("ground state |0><0|", &basis_projector(2, 0));

    // maximally mixed state: the commutator bound collapses to zero
    let mixed = ComplexMatrix::identity(2).scale(num_complex::Complex64::new(0.5, 0.0));
    show("maximally mixed state", &mixed);
}
