//! Command-line front end used by the `decometry` binary.
//!
//! Every failure prints one line `error[<tag>]: <message>` to stderr.
//! Exit codes: 0 success, 1 a verify property failed, 2 validation or
//! usage error, 3 numerical failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::channels::DephasingChannel;
use crate::coherence::qfi_dephasing;
use crate::discord::{discord, OptimizerConfig};
use crate::error::Error;
use crate::io::{self, StateFile};
use crate::qstate::Unitary;
use crate::verify::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "decometry", version, about = "Coherence and discord as Fisher information under dephasing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// C_p(ρ) for each requested p.
    Coherence(CoherenceArgs),
    /// D_p^A(ρ_AB) for each requested p.
    Discord(DiscordArgs),
    /// Run the randomized property batteries.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    /// State JSON file.
    pub state: PathBuf,
    /// Dephasing strengths, comma separated.
    #[arg(long = "p", value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
    pub p: Vec<f64>,
    /// Unitary JSON file whose columns are the dephasing basis.
    #[arg(long)]
    pub basis_file: Option<PathBuf>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscordArgs {
    /// Bipartite state JSON file.
    pub state: PathBuf,
    #[arg(long = "p", value_delimiter = ',', num_args = 1.., required = true, allow_negative_numbers = true)]
    pub p: Vec<f64>,
    /// Local dimensions, overriding the file's `dims` field.
    #[arg(long, num_args = 2, value_names = ["DA", "DB"])]
    pub dims: Option<Vec<usize>>,
    /// Random starts besides the identity.
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    #[arg(long, env = "DECOMETRY_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the minimizing bases to this JSON file.
    #[arg(long)]
    pub emit_basis: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// coherence, discord, conversion, estimation or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, env = "DECOMETRY_SEED", default_value_t = 0)]
    pub seed: u64,
}

/// A failure with its exit code and stderr tag.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub tag: &'static str,
    pub message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, tag: "validation", message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, tag) = match &e {
            Error::Numerical(_) => (EXIT_NUMERICAL, "numerical"),
            Error::Io(_) => (EXIT_VALIDATION, "io"),
            Error::Json(_) => (EXIT_VALIDATION, "json"),
            _ => (EXIT_VALIDATION, "validation"),
        };
        Self { code, tag, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self { code: EXIT_VALIDATION, tag: "io", message: e.to_string() }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error[usage]: {line}");
            return EXIT_VALIDATION;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error[{}]: {}", e.tag, e.message.replace('\n', " "));
            e.code
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    match &cli.command {
        Command::Coherence(a) => cmd_coherence(a),
        Command::Discord(a) => cmd_discord(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn open_output(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn format_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.10}")
    }
}

pub fn cmd_coherence(a: &CoherenceArgs) -> Result<i32, CliError> {
    for &p in &a.p {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::validation(format!("p = {p} outside [0, 1]")));
        }
    }
    let rho = io::read_state(&a.state)?;
    let basis = match &a.basis_file {
        Some(path) => io::read_unitary(path)?,
        None => Unitary::identity(rho.dim()),
    };
    if basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(basis.dim(), rho.dim()).into());
    }
    let rows = a
        .p
        .iter()
        .map(|&p| {
            let r = qfi_dephasing(&rho, &DephasingChannel::new(p, basis.clone())?)?;
            Ok((p, r))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut w = open_output(a.csv.as_deref())?;
    w.write_record(["p", "value", "divergent", "dropped_terms"])?;
    for (p, r) in rows {
        let divergent = if r.is_divergent() { "1" } else { "0" };
        w.write_record([p.to_string(), format_value(r.value), divergent.to_string(), r.dropped_terms.to_string()])?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct BasisEntry {
    p: f64,
    basis: StateFile,
}

pub fn cmd_discord(a: &DiscordArgs) -> Result<i32, CliError> {
    for &p in &a.p {
        if p == 0.0 {
            return Err(CliError::validation("p=0 unsupported: discord needs p in (0, 1]"));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(CliError::validation(format!("p = {p} outside (0, 1]")));
        }
    }
    let dims = a.dims.as_ref().map(|d| (d[0], d[1]));
    let rho = io::read_bipartite(&a.state, dims)?;
    let cfg = OptimizerConfig::default().with_starts(a.starts).with_seed(a.seed);
    let results = a.p.iter().map(|&p| discord(&rho, p, &cfg)).collect::<Result<Vec<_>, Error>>()?;

    let mut w = open_output(a.csv.as_deref())?;
    w.write_record(["p", "value", "converged", "starts", "best_start"])?;
    for (p, r) in a.p.iter().zip(&results) {
        w.write_record([
            p.to_string(),
            format_value(r.value),
            u8::from(r.converged).to_string(),
            r.starts.to_string(),
            r.best_start.to_string(),
        ])?;
    }
    w.flush()?;

    if let Some(path) = &a.emit_basis {
        let entries: Vec<BasisEntry> = a
            .p
            .iter()
            .zip(&results)
            .map(|(&p, r)| BasisEntry { p, basis: StateFile::from_matrix(r.argmin_basis.matrix(), None) })
            .collect();
        std::fs::write(path, serde_json::to_string_pretty(&entries).map_err(Error::from)?)?;
    }

    if let Some(bad) = results.iter().find(|r| !r.value.is_finite()) {
        return Err(Error::Numerical(format!("discord optimizer returned {}", bad.value)).into());
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let suite: Suite = a.suite.parse()?;
    if a.samples == 0 {
        return Err(CliError::validation("--samples must be at least 1"));
    }
    let reports = run_suite(suite, a.samples, a.seed)?;
    let mut all = true;
    for report in &reports {
        println!("[{}]", report.suite);
        for prop in &report.properties {
            println!("{prop}");
        }
        all &= report.passed();
    }
    println!("{}", if all { "all properties hold" } else { "property violations found" });
    Ok(if all { EXIT_OK } else { EXIT_PROPERTY })
}
