use std::process::exit;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match qcorr::cli::run(&args) {
        Ok(code) => exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            exit(err.exit_code());
        }
    }
}
