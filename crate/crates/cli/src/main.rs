//! Batch front-end: reads a problem configuration, runs the requested
//! analyses, and emits machine-readable CSV tables.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure,
//! 3 verification failure.

mod config;
mod emit;
mod run;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hilltongue", version, about = "Instability tongues of Hill equations driven by a nonlinear oscillator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Problem configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for the CSV tables (default: the config's
    /// output.dir, then "out").
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for oracle grid sweeps (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Reserved; the pipeline is deterministic and takes no randomness.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact series tables (frequency, orbit, coefficient, eigenvalue,
    /// leading-coefficient), plus shape and coexistence when configured.
    Series(CommonArgs),
    /// Oracle tongue boundaries over the q-grid, plus order fits when
    /// configured.
    Tongues(CommonArgs),
    /// Run the verification suite; nonzero exit on any failed check.
    Verify(CommonArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let (name, args) = match &cli.command {
        Command::Series(a) => ("series", a),
        Command::Tongues(a) => ("tongues", a),
        Command::Verify(a) => ("verify", a),
    };

    if let Some(threads) = args.threads {
        if threads > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    let _ = args.seed; // reserved

    let cfg = match &args.config {
        Some(path) => match config::load(path) {
            Ok(cfg) => Some(cfg),
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(1);
            }
        },
        None => None,
    };

    let out_dir = args
        .out
        .clone()
        .or_else(|| cfg.as_ref().and_then(|c| c.out_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));

    let outcome = match (name, &cfg) {
        ("series", Some(cfg)) => {
            let provenance = provenance(name, Some(cfg));
            run::cmd_series(cfg, &out_dir, &provenance)
        }
        ("tongues", Some(cfg)) => {
            let provenance = provenance(name, Some(cfg));
            run::cmd_tongues(cfg, &out_dir, &provenance)
        }
        ("verify", cfg) => {
            let provenance = provenance(name, cfg.as_ref());
            run::cmd_verify(&out_dir, &provenance)
        }
        _ => {
            eprintln!("error: the {name} subcommand requires --config");
            return ExitCode::from(1);
        }
    };

    match outcome {
        Ok(files) => {
            for f in files {
                println!("wrote {f}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn provenance(cmd: &str, cfg: Option<&config::RunConfig>) -> String {
    match cfg {
        Some(c) => format!(
            "hilltongue v{} cmd={cmd} config_sha256={}",
            env!("CARGO_PKG_VERSION"),
            c.hash
        ),
        None => format!("hilltongue v{} cmd={cmd}", env!("CARGO_PKG_VERSION")),
    }
}
