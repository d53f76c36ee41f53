//! `cdsopt`: price CDS options, recovery options and index options from a
//! JSON market config and write CSV tables.

mod commands;
mod config;
mod error;
mod scan;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::scan::Scan;

#[derive(Parser)]
#[command(name = "cdsopt", version, about = "CDS option pricing tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Market config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gauss-Hermite node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Random seed for sampling commands.
    #[arg(long)]
    seed: Option<u64>,
    /// Strike (or grid) scan as lo:hi:steps.
    #[arg(long)]
    scan: Option<Scan>,
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexMode {
    Price,
    ImpliedVol,
}

#[derive(Clone, Copy, ValueEnum)]
enum RecoveryMode {
    Density,
    Price,
    Fit,
}

#[derive(Subcommand)]
enum Command {
    /// Single-name knockout and no-knockout options along a running-to-upfront strike scan.
    Single {
        #[command(flatten)]
        common: Common,
    },
    /// Index options: prices, or implied PV vols from a quotes file.
    Index {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "price")]
        mode: IndexMode,
        /// CSV with columns strike,side,premium_bp.
        #[arg(long)]
        quotes: Option<PathBuf>,
    },
    /// Recovery densities, option prices, or a distribution fit.
    Recovery {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "density")]
        mode: RecoveryMode,
        /// One-column CSV of realised recoveries (fit mode).
        #[arg(long)]
        samples: Option<PathBuf>,
        /// Hold the mean at this value while fitting.
        #[arg(long)]
        fixed_mean: Option<f64>,
    },
    /// Joint default and recovery draws from the factor copula.
    CopulaSample {
        #[command(flatten)]
        common: Common,
    },
    /// Compare the closed forms with brute-force oracles; writes JSON.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Monte Carlo paths per oracle.
        #[arg(long, default_value_t = 1_000_000)]
        paths: usize,
    },
}

fn open_out(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| CliError::Write(format!("{}: {e}", p.display())))?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_csv<T: Serialize>(out: Option<&Path>, rows: &[T]) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(open_out(out)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Single { common } => {
            let cfg = config::load(&common.config)?;
            let rows = commands::single(&cfg, common.nodes, common.scan)?;
            write_csv(common.out.as_deref(), &rows)
        }
        Command::Index { common, mode, quotes } => {
            let cfg = config::load(&common.config)?;
            match mode {
                IndexMode::Price => write_csv(common.out.as_deref(), &commands::index_price(&cfg, common.scan)?),
                IndexMode::ImpliedVol => {
                    let q = quotes.ok_or_else(|| CliError::config("--mode implied-vol needs --quotes"))?;
                    write_csv(common.out.as_deref(), &commands::index_implied(&cfg, &q)?)
                }
            }
        }
        Command::Recovery {
            common,
            mode,
            samples,
            fixed_mean,
        } => match mode {
            RecoveryMode::Density => {
                let cfg = config::load(&common.config)?;
                let (header, rows) = commands::recovery_density(&cfg, common.scan)?;
                let mut w = csv::Writer::from_writer(open_out(common.out.as_deref())?);
                w.write_record(&header)?;
                for r in rows {
                    w.write_record(r.iter().map(|x| x.to_string()))?;
                }
                w.flush()?;
                Ok(())
            }
            RecoveryMode::Price => {
                let cfg = config::load(&common.config)?;
                write_csv(common.out.as_deref(), &commands::recovery_price(&cfg, common.scan)?)
            }
            RecoveryMode::Fit => {
                let cfg = config::load(&common.config)?;
                let s = samples.ok_or_else(|| CliError::config("--mode fit needs --samples"))?;
                write_csv(common.out.as_deref(), &[commands::recovery_fit(&cfg, &s, fixed_mean)?])
            }
        },
        Command::CopulaSample { common } => {
            let cfg = config::load(&common.config)?;
            write_csv(
                common.out.as_deref(),
                &commands::copula_sample(&cfg, common.nodes, common.seed)?,
            )
        }
        Command::Validate { common, paths } => {
            let cfg = config::load(&common.config)?;
            let reports = commands::validate(&cfg, common.nodes, common.seed, paths)?;
            let mut w = open_out(common.out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &reports).map_err(|e| match e.io_error_kind() {
                Some(kind) => std::io::Error::from(kind).into(),
                None => CliError::Write(e.to_string()),
            })?;
            writeln!(w)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) | Err(CliError::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cdsopt: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
