//! Writes ready-to-use matrix files for the `qcorr` binary and prints the
//! matching command lines.
//!
//! ```bash
//! cargo run --example matrix_files
//! ```

use qcorr::channels::transpose_map;
use qcorr::cli::MatrixFile;
use qcorr::linalg::{basis_projector, pauli_x, pauli_y};

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("qcorr-demo");
    std::fs::create_dir_all(&dir)?;

    let files = [
        (
            "state0.json",
            MatrixFile::from_matrix(&basis_projector(2, 0), 2, None),
        ),
        ("sx.json", MatrixFile::from_matrix(&pauli_x(), 2, None)),
        ("sy.json", MatrixFile::from_matrix(&pauli_y(), 2, None)),
        (
            "transpose_map.json",
            MatrixFile::from_matrix(transpose_map(2).choi(), 2, Some(2)),
        ),
    ];
    for (name, doc) in &files {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(doc).unwrap())?;
        println!("wrote {}", path.display());
    }

    println!("\nexample file contents (sx.json):");
    println!("{}", serde_json::to_string_pretty(&files[1].1).unwrap());

    let d = dir.display();
    println!("\ntry:");
    println!("  qcorr correlate --state {d}/state0.json --obsA {d}/sx.json --obsB {d}/sy.json");
    println!("  qcorr correlate --state {d}/state0.json --obsA {d}/sx.json --obsB {d}/sy.json \\");
    println!("        --mode simulate --shots 1000000 --seed 7");
    println!("  qcorr decompose --map {d}/transpose_map.json");
    println!("  qcorr dilate --map {d}/transpose_map.json");
    println!(
        "  qcorr simulate --map {d}/transpose_map.json --state {d}/state0.json --obsA {d}/sx.json"
    );
    println!("  qcorr uncertainty --state {d}/state0.json --obsA {d}/sx.json --obsB {d}/sy.json");
    println!("  qcorr validate --dims 2,3 --instances 50");
    Ok(())
}
