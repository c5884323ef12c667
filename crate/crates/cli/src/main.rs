//! `ifslab`: command-line front end. Every run prints one JSON envelope (or
//! CSV with a commented header) carrying the resolved configuration.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 property violation.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ifslab::Rational;
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA: &str = "ifslab/1";
const MAX_LEVEL_VAR: &str = "IFSLAB_MAX_LEVEL";

#[derive(Parser, Debug)]
#[command(name = "ifslab", version, about = "Dimension, separation and geometry analyses of a linear-fractional IFS family")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct GlobalArgs {
    /// Family parameter, as "p/q" or an exact decimal.
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    pub t: Rational,
    /// Root-finding tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Report wall_time_ms as 0 so that repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Level dimensions d_n, distortion and dimension brackets.
    Dim(commands::DimArgs),
    /// Partition sums and finite-level pressure on a grid of exponents.
    Pressure(commands::PressureArgs),
    /// Exact overlap search and separation metrics per level.
    Separation(commands::SeparationArgs),
    /// Conjugacy, residue and relation-search certificates.
    Freeness(commands::FreenessArgs),
    /// Cylinder ordering lemmas and non-degeneracy certificates.
    Lemmas(commands::LemmasArgs),
    /// Box counting and the common-disjointness parameter search.
    Attractor(commands::AttractorArgs),
    /// Natural-measure statistics at the shared fixed point.
    Measure(commands::MeasureArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Dim(_) => "dim",
            Command::Pressure(_) => "pressure",
            Command::Separation(_) => "separation",
            Command::Freeness(_) => "freeness",
            Command::Lemmas(_) => "lemmas",
            Command::Attractor(_) => "attractor",
            Command::Measure(_) => "measure",
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Internal(String),
}

impl From<ifslab::Error> for Failure {
    fn from(e: ifslab::Error) -> Self {
        use ifslab::Error::*;
        match e {
            Numeric(_) | PropertyViolation(_) => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

/// Result of one subcommand before it is wrapped in the envelope.
pub struct Outcome {
    pub result: Value,
    pub csv: String,
    pub violations: Vec<String>,
}

pub struct Context {
    pub t: Rational,
    pub tol: f64,
    pub seed: u64,
    pub max_level: usize,
}

impl Context {
    pub fn cap(&self, what: &str, value: usize) -> Result<usize, Failure> {
        if value > self.max_level {
            Err(Failure::Usage(format!(
                "{what} = {value} exceeds the enumeration cap {} (set {MAX_LEVEL_VAR} to raise it)",
                self.max_level
            )))
        } else {
            Ok(value)
        }
    }
}

fn max_level() -> Result<usize, Failure> {
    match std::env::var(MAX_LEVEL_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("{MAX_LEVEL_VAR} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(ifslab::DEFAULT_MAX_LEVEL),
    }
}

fn render(cli: &Cli, ctx: &Context, outcome: Outcome, wall_time_ms: u64) -> Result<String, Failure> {
    let config = json!({
        "command": cli.command.name(),
        "global": cli.global,
        "options": serde_json::to_value(&cli.command)
            .map_err(|e| Failure::Internal(e.to_string()))?
            .get(cli.command.name())
            .cloned()
            .unwrap_or(Value::Null),
        "max_level": ctx.max_level,
    });
    Ok(match cli.global.format {
        Format::Json => {
            let envelope = json!({
                "schema": SCHEMA,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "command": cli.command.name(),
                "resolved_config": config,
                "wall_time_ms": wall_time_ms,
                "violations": outcome.violations,
                "result": outcome.result,
            });
            serde_json::to_string_pretty(&envelope).map_err(|e| Failure::Internal(e.to_string()))? + "\n"
        }
        Format::Csv => {
            let mut out = format!(
                "# schema={SCHEMA} tool_version={} wall_time_ms={wall_time_ms}\n# resolved_config={}\n",
                env!("CARGO_PKG_VERSION"),
                config
            );
            for v in &outcome.violations {
                out.push_str(&format!("# violation: {v}\n"));
            }
            out.push_str(&outcome.csv);
            out
        }
    })
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let start = Instant::now();
    if cli.global.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let ctx = Context {
        t: cli.global.t.clone(),
        tol: cli.global.tol,
        seed: cli.global.seed,
        max_level: max_level()?,
    };
    if !(ctx.tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    let outcome = match &cli.command {
        Command::Dim(a) => commands::dim(&ctx, a),
        Command::Pressure(a) => commands::pressure(&ctx, a),
        Command::Separation(a) => commands::separation(&ctx, a),
        Command::Freeness(a) => commands::freeness(&ctx, a),
        Command::Lemmas(a) => commands::lemmas(&ctx, a),
        Command::Attractor(a) => commands::attractor(&ctx, a),
        Command::Measure(a) => commands::measure(&ctx, a),
    }?;
    let violated = !outcome.violations.is_empty();
    let wall = if cli.global.reproducible { 0 } else { start.elapsed().as_millis() as u64 };
    Ok((render(cli, &ctx, outcome, wall)?, violated))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, violated) = match run(&cli) {
        Ok(v) => v,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("property violation: {msg}");
            return ExitCode::from(3);
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if violated {
        eprintln!("property violation: see \"violations\" in the output");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
