//! Dilation of a weighted instrument into an isometry, ancilla projectors and
//! the diagonal ancilla observable, plus the unitary completion: the whole
//! map becomes one interaction followed by an ancilla measurement.
//!
//! ```bash
//! cargo run --example dilate_and_complete
//! ```

use qcorr::channels::transpose_map;
use qcorr::dilation::dilate;
use qcorr::linalg::{basis_projector, pauli_z, trace_product, ComplexMatrix};

fn main() {
    let map = transpose_map(2);
    let dec = map.statistical_decomposition().unwrap();
    let dil = dilate(&dec).unwrap();

    println!("transpose map (d = 2) dilation");
    println!("  ancilla dimension: {}", dil.ancilla_dim());
    println!("  Z diagonal: {:?}", dil.z_diagonal());
    println!(
        "  outcome of each ancilla basis state: {:?}",
        dil.outcome_of_basis()
    );

    let v = dil.isometry();
    println!("\nisometry V ({}x{}):", v.rows(), v.cols());
    print!("{v}");
    let gram = &v.adjoint() * v;
    println!(
        "  ||V^dag V - 1||: {:.3e}",
        gram.max_diff(&ComplexMatrix::identity(2))
    );

    let u = dil.unitary();
    let unitarity = (&u.adjoint() * u).max_diff(&ComplexMatrix::identity(u.rows()));
    println!(
        "\nunitary completion U ({}x{}), ||U^dag U - 1|| = {unitarity:.3e}",
        u.rows(),
        u.cols()
    );

    // the partial expectation value reproduces the map expectation
    let rho = basis_projector(2, 0);
    let a = pauli_z();
    let via_dilation = dil.partial_expectation(&rho, &a).unwrap();
    let via_map = trace_product(&map.apply(&rho).unwrap(), &a).re;
    println!("\nTr[V rho V^dag (A (x) Z)] = {via_dilation:+.6}");
    println!("Tr[L(rho) A]              = {via_map:+.6}");

    // and the reduced map round-trips to the original
    let reduced = dil.reduced_map().unwrap();
    println!(
        "reduced map residual: {:.3e}",
        reduced.choi().max_diff(map.choi())
    );

    // ancilla outcome statistics match the instrument
    println!("\nancilla outcome probabilities on |0><0|:");
    for (i, part) in dec.parts().iter().enumerate() {
        let via_projector = dil.outcome_probability(&rho, i).unwrap();
        let via_instrument = part.apply(&rho).unwrap().trace().re;
        println!("  outcome {i}: projector {via_projector:.6}, instrument {via_instrument:.6}");
    }
}
