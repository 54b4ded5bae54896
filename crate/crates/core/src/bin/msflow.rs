use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use msflow::cli::{self, EXIT_ERROR, EXIT_OK};

/// Mullins-Sekerka flow laboratory.
#[derive(Parser)]
#[command(version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Run a verification suite: geometry, elliptic, stepper, dynamics or all.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Linearize the flow at the configured equilibrium.
    Linearize { config: PathBuf },
}

fn code(c: i32) -> ExitCode {
    ExitCode::from(c as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = match args.command {
        Command::Run { config } => cli::run_file(&config).map(|s| {
            for f in &s.files {
                println!("wrote {}", f.display());
            }
            println!("{}", msflow::dynamics::termination_text(&s.termination));
            s.exit_code()
        }),
        Command::Verify { suite, seed } => cli::verify(&suite, seed).map(|(report, ok)| {
            print!("{report}");
            if ok {
                EXIT_OK
            } else {
                EXIT_ERROR
            }
        }),
        Command::Linearize { config } => cli::linearize_file(&config).map(|p| {
            println!("wrote {}", p.display());
            EXIT_OK
        }),
    };
    match result {
        Ok(c) => code(c),
        Err(e) => {
            eprintln!("error: {e}");
            code(EXIT_ERROR)
        }
    }
}
