//! Seeded generators for random states, observables and maps.
//!
//! Used by the `validate` command and throughout the test suites; everything
//! is driven by [`CounterRng`] so instances are reproducible across runs.

use num_complex::Complex64;

use crate::channels::LinearMap;
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::rng::CounterRng;

/// Standard normal draw via Box-Muller.
pub fn standard_normal(rng: &mut CounterRng) -> f64 {
    let u1 = 1.0 - rng.next_f64(); // (0, 1]
    let u2 = rng.next_f64();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_normal(rng: &mut CounterRng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// Matrix with independent complex-normal entries.
pub fn random_complex_matrix(rows: usize, cols: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, complex_normal(rng));
        }
    }
    m
}

/// Random Hermitian matrix, (G + G^dag)/2 of a complex-normal G.
pub fn random_hermitian(dim: usize, rng: &mut CounterRng) -> ComplexMatrix {
    random_complex_matrix(dim, dim, rng).hermitian_part()
}

/// Random full-rank density matrix (normalized Wishart).
pub fn random_state(dim: usize, rng: &mut CounterRng) -> ComplexMatrix {
    let g = random_complex_matrix(dim, dim, rng);
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    w.scale(Complex64::new(1.0 / tr, 0.0))
}

/// Random matrix with orthonormal columns, via Gram-Schmidt on normal columns.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut CounterRng) -> ComplexMatrix {
    assert!(rows >= cols);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<Complex64> = (0..rows).map(|_| complex_normal(rng)).collect();
        for u in &columns {
            let overlap = crate::linalg::vec_dot(u, &v);
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= ui * overlap;
            }
        }
        let nrm = crate::linalg::vec_norm(&v);
        if nrm < 1e-6 {
            continue; // essentially impossible; redraw
        }
        for z in &mut v {
            *z /= nrm;
        }
        columns.push(v);
    }
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (j, col) in columns.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            m.set(i, j, z);
        }
    }
    m
}

pub fn random_unitary(dim: usize, rng: &mut CounterRng) -> ComplexMatrix {
    random_isometry(dim, dim, rng)
}

/// Random CPTP map built from `kraus_count` normal Kraus operators,
/// renormalized so the total effect is exactly the identity.
pub fn random_cptp(
    dim_in: usize,
    dim_out: usize,
    kraus_count: usize,
    rng: &mut CounterRng,
) -> LinearMap {
    assert!(kraus_count >= 1);
    let raw: Vec<ComplexMatrix> = (0..kraus_count)
        .map(|_| random_complex_matrix(dim_out, dim_in, rng))
        .collect();
    let mut total = ComplexMatrix::zeros(dim_in, dim_in);
    for k in &raw {
        total = &total + &(&k.adjoint() * k);
    }
    // total^(-1/2), well-defined since the Gram sum is positive definite a.s.
    let eig = eig_hermitian(&total).expect("Gram matrix is Hermitian");
    let max = eig.values.last().copied().unwrap();
    let mut inv_sqrt = ComplexMatrix::zeros(dim_in, dim_in);
    for (k, &val) in eig.values.iter().enumerate() {
        assert!(val > 1e-12 * max, "degenerate Kraus draw");
        let v = eig.vectors.column(k);
        let w = val.sqrt().recip();
        for i in 0..dim_in {
            for j in 0..dim_in {
                let cur = inv_sqrt.get(i, j);
                inv_sqrt.set(i, j, cur + v[i] * v[j].conj() * w);
            }
        }
    }
    let kraus: Vec<ComplexMatrix> = raw.iter().map(|k| k * &inv_sqrt).collect();
    LinearMap::from_kraus(dim_in, dim_out, &kraus).expect("consistent Kraus shapes")
}

/// Random Hermiticity-preserving map: a random Hermitian Choi matrix.
pub fn random_hp_map(dim_in: usize, dim_out: usize, rng: &mut CounterRng) -> LinearMap {
    let choi = random_hermitian(dim_out * dim_in, rng);
    LinearMap::new(dim_in, dim_out, choi).expect("consistent Choi side")
}
