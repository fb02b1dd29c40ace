use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use muntz_vide_cli::config::{parse_config_with, parse_override};
use muntz_vide_cli::run;

#[derive(Parser)]
#[command(
    name = "muntz-vide",
    version,
    about = "Müntz spectral collocation for delay VIDEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve at a single N and dump nodal values
    Solve(RunArgs),
    /// Convergence sweep over a range of N
    Sweep(RunArgs),
    /// Sweep measured against a high-N reference solution
    Compare(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a `key = value` config file
    #[arg(long)]
    config: PathBuf,
    /// Override a config key; may be repeated
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match cli.command {
        Command::Solve(a) => ("solve", a),
        Command::Sweep(a) => ("sweep", a),
        Command::Compare(a) => ("compare", a),
    };
    match execute(mode, &args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(false)` when some row failed.
fn execute(mode: &str, args: &RunArgs) -> Result<bool, String> {
    let text =
        fs::read_to_string(&args.config).map_err(|e| format!("{}: {e}", args.config.display()))?;
    let mut overrides = args
        .set
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    overrides.push(("mode".into(), mode.into()));
    let spec = parse_config_with(&text, &overrides)
        .map_err(|e| format!("{}: {e}", args.config.display()))?;
    let report = run(&spec, &mut io::stdout().lock()).map_err(|e| e.to_string())?;
    for path in &report.written {
        println!("wrote {}", path.display());
    }
    Ok(report.table.all_ok())
}
