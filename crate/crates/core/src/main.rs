use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ruelle_core::cli_reports::{cmd_orbits, cmd_report, cmd_topology, cmd_verify, cmd_zeta, Overrides, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Verb {
    /// Closed-orbit census as CSV.
    Orbits,
    /// Per-orbit, factorization and sign-identity residuals as JSON.
    Verify,
    /// Truncated log-zeta values on the lambda grid as JSON.
    Zeta,
    /// Twisted Betti numbers and vanishing orders as JSON.
    Topology,
    /// All of the above.
    Report,
}

/// Orbit-level checks of twisted Ruelle zeta factorizations.
#[derive(Debug, Parser)]
#[command(name = "ruelle", version)]
struct Args {
    verb: Verb,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in model: bolza, schottky-orientable, schottky-nonorientable.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    tmax: Option<f64>,
    /// Fail when the census has warnings.
    #[arg(long)]
    strict: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let overrides = Overrides { model: args.model, t_max: args.tmax, out_dir: args.out, strict: args.strict };
    let result = RunConfig::load(args.config.as_deref(), overrides).and_then(|cfg| match args.verb {
        Verb::Orbits => cmd_orbits(&cfg),
        Verb::Verify => cmd_verify(&cfg),
        Verb::Zeta => cmd_zeta(&cfg),
        Verb::Topology => cmd_topology(&cfg),
        Verb::Report => cmd_report(&cfg),
    });
    match result {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            for n in &outcome.notes {
                eprintln!("ruelle: {n}");
            }
            if !outcome.pass {
                eprintln!("ruelle: verification failed");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("ruelle: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
