//! Statistical decomposition of Hermiticity-preserving maps: the transpose
//! map (the classic non-physical example) and a random HP map.
//!
//! ```bash
//! cargo run --example decompose_map
//! ```

use qcorr::channels::transpose_map;
use qcorr::random::random_hp_map;
use qcorr::rng::CounterRng;
use qcorr::LinearMap;

fn describe(name: &str, map: &LinearMap) {
    let dec = map.statistical_decomposition().expect("HP map");
    println!("{name}: {} -> {}", map.dim_in(), map.dim_out());
    println!("  parts: {}", dec.len());
    println!("  coefficients: {:?}", dec.coefficients());
    println!("  l1 cost: {:.6}", dec.l1_cost());
    println!("  max |coefficient|: {:.6}", dec.max_coefficient());
    let res = dec.residuals(map).unwrap();
    println!(
        "  reconstruction residual: {:.3e}",
        res.reconstruction_error
    );
    println!("  trace-preservation residual: {:.3e}", res.tp_error);
    println!(
        "  part Choi eigenvalue floors: {:?}",
        res.cp_min_eigenvalues
            .iter()
            .map(|v| format!("{v:.2e}"))
            .collect::<Vec<_>>()
    );
    println!();
}

fn main() {
    // already physical: a channel decomposes as itself with cost 1
    describe("identity channel (d = 2)", &LinearMap::identity(2));

    // the transpose map needs coefficients +-2, so sampling it costs
    // a variance factor of (l1 cost)^2 = 16 relative to a physical channel
    describe("transpose map (d = 2)", &transpose_map(2));

    let mut rng = CounterRng::new(5);
    describe("random HP map (d = 3)", &random_hp_map(3, 3, &mut rng));
}
