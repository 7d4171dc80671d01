use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use landau_cli::commands::{self, print_report, ORACLE_TOL};
use landau_cli::{CliError, RunConfig};
use landau_core::GridSpec;

/// Fourier-Galerkin spectral solver for the spatially homogeneous Landau
/// equation.
#[derive(Parser)]
#[command(name = "landau", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write diagnostics.csv
    Run { config: PathBuf },
    /// Repeat a BKW run over several grid sizes and write convergence.csv
    Convergence {
        config: PathBuf,
        /// Comma-separated list of points per dimension, e.g. 16,32,48
        #[arg(long)]
        grids: String,
    },
    /// Verify kernel identities and the fast collision sum on a small grid
    KernelCheck {
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, default_value_t = std::f64::consts::PI)]
        half_width: f64,
    },
    /// Compare the fast collision sum with the direct double sum on the
    /// configured initial state
    OracleCompare { config: PathBuf },
}

fn load(path: &std::path::Path) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::load(path)?;
    commands::configure_threads(cfg.threads)?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => commands::cmd_run(&load(&config)?),
        Command::Convergence { config, grids } => {
            let grids = commands::parse_grids(&grids)?;
            let cfg = load(&config)?;
            for row in commands::convergence(&cfg, &grids)? {
                println!(
                    "P = {}: max e1 = {:.3e}, max e2 = {:.3e}",
                    row.points, row.max_e1, row.max_e2
                );
            }
            Ok(())
        }
        Command::KernelCheck {
            points,
            gamma,
            half_width,
        } => {
            commands::configure_threads(0)?;
            let grid = GridSpec::new(half_width, points, gamma)?;
            let report = commands::kernel_check(&grid)?;
            print_report(&report);
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Numerical("kernel check failed".into()))
            }
        }
        Command::OracleCompare { config } => {
            let report = commands::oracle_compare(&load(&config)?)?;
            let ok = report.relative_error <= ORACLE_TOL;
            println!(
                "{} fast vs direct: relative error {:.3e} (limit {:.0e})",
                if ok { "PASS" } else { "FAIL" },
                report.relative_error,
                ORACLE_TOL
            );
            if ok {
                Ok(())
            } else {
                Err(CliError::Numerical("oracle comparison failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
