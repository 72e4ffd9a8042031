mod config;
mod error;
mod output;
mod scenario;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tlsbath::validation::{validate_all, ValidationOptions};

use config::{Config, Format};
use error::CliError;
use output::{Cell, Metadata, Table};
use scenario::Scenario;

/// Effective rates, steady states and stability of a mode coupled to a
/// driven two-level-system bath.
#[derive(Parser, Debug)]
#[command(name = "tlsbath", version)]
struct Cli {
    /// TOML scenario configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration value, e.g. `--set tls.Omega_B=1e-5`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// All single-mode rates over the sweep.
    Rates,
    /// Run a named scenario.
    Sweep {
        #[arg(value_enum)]
        scenario: Scenario,
    },
    SteadyState,
    StabilityMap,
    Squeezing,
    Coherence,
    OracleValidate,
    /// Run the acceptance suite; exits with 3 unless every criterion passes.
    ValidateAll {
        #[arg(long, default_value_t = ValidationOptions::default().seed)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tlsbath: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.jobs == Some(0) {
        return Err(CliError::config("--jobs", "must be at least 1".into()));
    }
    let mut config = Config::load(cli.config.as_deref(), &cli.set)?;
    if let Some(f) = cli.format {
        config.output.format = f;
    }
    if let Some(p) = &cli.out {
        config.output.path = Some(p.display().to_string());
    }

    let scenario = match cli.command {
        Command::Rates => Scenario::Rates,
        Command::Sweep { scenario } => scenario,
        Command::SteadyState => Scenario::SteadyState,
        Command::StabilityMap => Scenario::StabilityMap,
        Command::Squeezing => Scenario::Squeezing,
        Command::Coherence => Scenario::Coherence,
        Command::OracleValidate => Scenario::OracleValidate,
        Command::ValidateAll { seed } => return validate(&config, seed),
    };
    let table = scenario::run(scenario, &config, cli.jobs)?;
    emit(&config, scenario.name(), &table)
}

fn validate(config: &Config, seed: u64) -> Result<(), CliError> {
    let opts = ValidationOptions {
        oracle_dim_cap: config.oracle.dim_cap,
        seed,
        ..ValidationOptions::default()
    };
    let reports = validate_all(&opts);
    let mut table = Table::new([
        "id",
        "name",
        "status",
        "measured",
        "tolerance",
        "runtime_s",
        "detail",
    ]);
    let stdout = io::stdout();
    let mut lines = stdout.lock();
    for r in &reports {
        writeln!(lines, "{}", r.line())?;
        let status = match &r.status {
            tlsbath::validation::Status::Skipped(reason) => format!("SKIP: {reason}"),
            s => s.to_string(),
        };
        table.push(vec![
            Cell::Int(r.id as i64),
            Cell::Text(r.name.to_string()),
            Cell::Text(status),
            Cell::Num(r.measured),
            Cell::Num(r.tolerance),
            Cell::Num(r.runtime.as_secs_f64()),
            Cell::Text(r.detail.clone()),
        ]);
    }
    drop(lines);
    if config.output.path.is_some() {
        emit(config, "validate-all", &table)?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::ValidationFailed { failed });
    }
    Ok(())
}

fn emit(config: &Config, scenario: &str, table: &Table) -> Result<(), CliError> {
    let meta = Metadata::now(scenario, config.to_toml());
    let sink: Box<dyn Write> = match &config.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match config.output.format {
        Format::Csv => output::write_csv(sink, &meta, table),
        Format::Json => output::write_json(sink, &meta, table),
    }
}
