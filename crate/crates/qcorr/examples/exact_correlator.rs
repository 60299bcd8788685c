//! Builds the ideal correlator map and checks its defining identity
//! `Tr[T(rho)(A (x) B)] = Tr[A rho B]` against direct evaluation.
//!
//! ```bash
//! cargo run --example exact_correlator
//! ```

use qcorr::correlator::{exact_correlation, ideal_correlator};
use qcorr::linalg::{basis_projector, pauli_x, pauli_y, pauli_z, trace_product, ComplexMatrix};
use qcorr::random::{random_hermitian, random_state};
use qcorr::rng::CounterRng;

fn main() {
    let rho = basis_projector(2, 0);
    let t = ideal_correlator(2).expect("dimension 2 is fine");
    println!("ideal correlator at d = 2 (Choi side {})", t.choi().rows());
    println!("Hermiticity-preserving: {}\n", t.is_hp());

    let observables: [(&str, ComplexMatrix); 4] = [
        ("1 ", ComplexMatrix::identity(2)),
        ("sx", pauli_x()),
        ("sy", pauli_y()),
        ("sz", pauli_z()),
    ];
    println!("two-point correlations on |0><0|, via the map and via Tr[A rho B]:");
    for (name_a, a) in &observables {
        for (name_b, b) in &observables {
            let via_map = trace_product(&t.apply(&rho).unwrap(), &a.kron(b));
            let oracle = exact_correlation(&rho, a, b).unwrap();
            println!(
                "  <{name_a} . {name_b}>  map {:+.4}{:+.4}i   direct {:+.4}{:+.4}i   |diff| {:.1e}",
                via_map.re,
                via_map.im,
                oracle.re,
                oracle.im,
                (via_map - oracle).norm()
            );
        }
    }

    let mut rng = CounterRng::new(1);
    let mut worst = 0.0f64;
    for dim in [2usize, 3] {
        let t = ideal_correlator(dim).unwrap();
        for _ in 0..100 {
            let rho = random_state(dim, &mut rng);
            let a = random_hermitian(dim, &mut rng);
            let b = random_hermitian(dim, &mut rng);
            let via_map = trace_product(&t.apply(&rho).unwrap(), &a.kron(&b));
            let oracle = exact_correlation(&rho, &a, &b).unwrap();
            worst = worst.max((via_map - oracle).norm());
        }
    }
    println!("\nmax residual over 200 random instances at d = 2, 3: {worst:.3e}");
}
