use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cavity_dimer_cli::config::{Cutoff, Mode, SweepConfig};
use cavity_dimer_cli::validate::{run_validate, Outcome};
use cavity_dimer_cli::{sweep, CliError, Table};
use clap::{Args, Parser, Subcommand};

/// Sweeps of the cavity-monitored two-well Bose gas. Results go to CSV
/// (`validate` writes a JSON report).
#[derive(Debug, Parser)]
#[command(name = "cavity-dimer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Observables at the cut times, with tunneling on and frozen.
    Trace,
    /// Closed-form frozen-tunneling photon spectrum and decoherence times.
    Quasi,
    /// Steady states over the detuning and pump grid.
    Steady,
    /// Relaxation time from the Liouvillian spectrum.
    Spectrum {
        /// Also write every eigenvalue to this CSV.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Invariant checks at the baseline parameters; exit code 1 on failure.
    Validate,
}

#[derive(Debug, Args)]
struct Overrides {
    /// JSON sweep configuration; omitted fields keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Lower detuning, in the grid's units.
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    #[arg(long, global = true)]
    delta_steps: Option<usize>,
    /// Pump amplitudes in Hz, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    #[arg(long, global = true)]
    fock_cutoff: Option<usize>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

impl Overrides {
    fn apply(&self, c: &mut SweepConfig) {
        if let Some(x) = self.delta_min {
            c.delta_grid.min = x;
        }
        if let Some(x) = self.delta_max {
            c.delta_grid.max = x;
        }
        if let Some(n) = self.delta_steps {
            c.delta_grid.steps = n;
        }
        if let Some(list) = &self.eta {
            c.eta_list_hz = Some(list.clone());
        }
        if let Some(n) = self.fock_cutoff {
            c.truncation.fock_cutoff = Cutoff::Fixed(n);
        }
        if self.jobs.is_some() {
            c.jobs = self.jobs;
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes the table, then reports failed grid points.
fn emit(table: Table, out: Option<&Path>) -> Result<(), CliError> {
    table.write_csv(sink(out)?)?;
    match table.failed_rows() {
        0 => Ok(()),
        failed => Err(CliError::PointFailures {
            failed,
            total: table.rows.len(),
        }),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut config = match &cli.overrides.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::default(),
    };
    cli.overrides.apply(&mut config);
    let mode = match &cli.command {
        Command::Trace => Mode::Trace,
        Command::Quasi => Mode::Quasi,
        Command::Steady => Mode::Steady,
        Command::Spectrum { dump } => {
            if dump.is_some() {
                config.spectrum_dump = dump.clone();
            }
            Mode::Spectrum
        }
        Command::Validate => Mode::Validate,
    };
    if let Some(m) = config.mode.filter(|m| *m != mode) {
        log::info!("config mode `{}` overridden by subcommand `{}`", m.name(), mode.name());
    }
    config.mode = Some(mode);
    config.validate()?;

    let out = cli.overrides.out.as_deref();
    match mode {
        Mode::Trace => emit(sweep::run_trace(&config)?, out),
        Mode::Quasi => emit(sweep::run_quasi(&config)?, out),
        Mode::Steady => emit(sweep::run_steady(&config)?, out),
        Mode::Spectrum => {
            let (table, dump) = sweep::run_spectrum(&config)?;
            if let (Some(d), Some(path)) = (dump, &config.spectrum_dump) {
                d.write_csv(sink(Some(path))?)?;
            }
            emit(table, out)
        }
        Mode::Validate => {
            let report = run_validate(&config)?;
            for c in &report.checks {
                let tag = match c.outcome {
                    Outcome::Pass => "PASS",
                    Outcome::Fail => "FAIL",
                    Outcome::Skipped => "SKIP",
                };
                let value = c.value.map(|v| format!(" {v:e}")).unwrap_or_default();
                let limit = c.threshold.map(|v| format!(" (limit {v:e})")).unwrap_or_default();
                eprintln!("{tag} η/κ={:.4} {}{value}{limit} {}", c.eta_over_kappa, c.name, c.detail);
            }
            let mut w = sink(out)?;
            serde_json::to_writer_pretty(&mut w, &report).map_err(io::Error::from)?;
            writeln!(w)?;
            w.flush()?;
            if report.all_passed() {
                Ok(())
            } else {
                Err(CliError::Validation {
                    failed: report.failed,
                    total: report.checks.len(),
                })
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(&e)
        }
    }
}
