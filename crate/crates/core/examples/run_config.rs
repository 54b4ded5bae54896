//! Run a TOML experiment config the way `msflow run` does.
//!
//! cargo run --example run_config -- configs/heat.toml
use std::path::PathBuf;

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("configs/heat.toml"));
    match msflow::cli::run_file(&path) {
        Ok(summary) => {
            for f in &summary.files {
                println!("{}", f.display());
            }
            println!("{}", msflow::dynamics::termination_text(&summary.termination));
            std::process::exit(summary.exit_code());
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(msflow::cli::EXIT_ERROR);
        }
    }
}
