//! `fockladder`: batch computations from a TOML scenario file.
//!
//! Exit codes: 0 on success, 1 on a configuration or computation error, 2 when a
//! requested tolerance check fails. Failures are reported as JSON on stderr.

mod commands;
mod config;
mod table;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::Options;
use config::{ScenarioConfig, SCHEMA_VERSION};
use table::{gnuplot_script, to_csv, to_json, Report};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Library(fockladder::Error),
    Unsupported(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
            CliError::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl From<fockladder::Error> for CliError {
    fn from(e: fockladder::Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Library(_) => "library",
            CliError::Unsupported(_) => "unsupported",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fockladder", version, about = "Spectral propagators and ladder reductions from a TOML scenario")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Density of the spectral measure on a grid and its first moments.
    Spectrum(Common),
    /// Propagator matrix elements over a time grid.
    Propagate(Common),
    /// Expectation values over a time grid.
    Expect(Common),
    /// Pseudo-vacua, reduced ladder coefficients and family pattern of multi-mode sectors.
    Reduce(Common),
    /// Parametric amplifier photon number: closed form against the two-mode oracle.
    Amplifier(Common),
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Compare against the truncated Fock-space oracle.
    #[arg(long)]
    oracle: bool,
    /// Oracle truncation (levels per mode).
    #[arg(long)]
    truncation: Option<usize>,
    /// Tolerance for the oracle comparison; overrides the scenario file.
    #[arg(long)]
    tol: Option<f64>,
    /// Also write a gnuplot script next to each CSV file (needs --out).
    #[arg(long)]
    gnuplot: bool,
}

fn run_command(name: &str, common: &Common) -> Result<(Report, ScenarioConfig), CliError> {
    let cfg = ScenarioConfig::load(&common.config)?;
    let opts = Options { oracle: common.oracle, truncation: common.truncation, tol: common.tol };
    let report = match name {
        "spectrum" => commands::spectrum(&cfg, &opts)?,
        "propagate" => commands::propagate(&cfg, &opts)?,
        "expect" => commands::expect(&cfg, &opts)?,
        "reduce" => commands::reduce(&cfg, &opts)?,
        "amplifier" => commands::amplifier(&cfg, &opts)?,
        _ => unreachable!("subcommand names are fixed"),
    };
    Ok((report, cfg))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Path of a secondary table: `<stem>.<table>.csv` beside the main output.
fn sibling(out: &Path, table: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{table}.{ext}"))
}

fn emit(report: &Report, cfg: &ScenarioConfig, common: &Common) -> Result<(), CliError> {
    let fmt = cfg.output.float_format;
    let csv_err = |e: csv::Error| CliError::Io(e.to_string());
    if common.gnuplot && (common.out.is_none() || common.format != Format::Csv) {
        return Err(CliError::Config("--gnuplot needs --out and CSV output".into()));
    }
    match (&common.out, common.format) {
        (None, Format::Json) => print!("{}", to_json(report)),
        (None, Format::Csv) => {
            let mut stdout = std::io::stdout().lock();
            for (i, t) in report.tables.iter().enumerate() {
                if i > 0 {
                    stdout.write_all(b"\r\n").map_err(|e| CliError::Io(e.to_string()))?;
                }
                stdout.write_all(to_csv(t, fmt).map_err(csv_err)?.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
        (Some(out), Format::Json) => write_file(out, &to_json(report))?,
        (Some(out), Format::Csv) => {
            for (i, t) in report.tables.iter().enumerate() {
                let path = if i == 0 { out.clone() } else { sibling(out, &t.name, "csv") };
                write_file(&path, &to_csv(t, fmt).map_err(csv_err)?)?;
                if common.gnuplot {
                    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    let script = path.with_extension("gp");
                    write_file(&script, &gnuplot_script(t, &name))?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Spectrum(c) => ("spectrum", c),
        Command::Propagate(c) => ("propagate", c),
        Command::Expect(c) => ("expect", c),
        Command::Reduce(c) => ("reduce", c),
        Command::Amplifier(c) => ("amplifier", c),
    };
    let result = run_command(name, common).and_then(|(report, cfg)| emit(&report, &cfg, common).map(|_| report));
    match result {
        Err(e) => {
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "status": "error",
                "error": { "kind": e.kind(), "message": e.to_string() },
            });
            eprintln!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
            ExitCode::from(1)
        }
        Ok(report) => {
            let failed = report.failed_checks();
            if failed.is_empty() {
                return ExitCode::SUCCESS;
            }
            let doc = json!({
                "schema_version": SCHEMA_VERSION,
                "command": name,
                "status": "tolerance_failed",
                "failed_checks": failed,
            });
            eprintln!("{}", serde_json::to_string_pretty(&doc).expect("report serializes"));
            ExitCode::from(2)
        }
    }
}
