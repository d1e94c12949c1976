//! Command-line front end for the hyperstate library.

pub mod commands;
pub mod document;
pub mod dot;

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use commands::Command;
pub use document::{parse_document, HypergraphDocument};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl From<hyperstate::Error> for CliError {
    fn from(e: hyperstate::Error) -> Self {
        match e {
            hyperstate::Error::Domain(m) => CliError::Domain(m),
            b @ hyperstate::Error::Budget { .. } => CliError::Budget(b.to_string().trim_start_matches("budget exceeded: ").to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

/// Caps checked against an input document before any work is done.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BudgetCaps {
    pub nodes: Option<usize>,
    pub edges: Option<usize>,
}

impl std::str::FromStr for BudgetCaps {
    type Err = String;

    /// `12`, `nodes=12`, `edges=40` or `nodes=12,edges=40`.
    fn from_str(s: &str) -> Result<Self, String> {
        let mut caps = BudgetCaps::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, val) = part.split_once('=').unwrap_or(("nodes", part));
            let v: usize = val.parse().map_err(|_| format!("bad budget value `{val}`"))?;
            match key {
                "nodes" => caps.nodes = Some(v),
                "edges" => caps.edges = Some(v),
                _ => return Err(format!("unknown budget key `{key}`")),
            }
        }
        Ok(caps)
    }
}

impl BudgetCaps {
    pub fn check(&self, doc: &HypergraphDocument) -> Result<(), CliError> {
        if let Some(c) = self.nodes.filter(|&c| doc.n > c) {
            return Err(CliError::Budget(format!("document has {} nodes, cap {c}", doc.n)));
        }
        if let Some(c) = self.edges.filter(|&c| doc.edge_count() > c) {
            return Err(CliError::Budget(format!("document has {} edges, cap {c}", doc.edge_count())));
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "hyperstate", version, about = "Construct, rewrite and analyse hypergraph states")]
pub struct Cli {
    /// Seed for stochastic subcommands
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Numerical tolerance for verdicts
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Node/edge caps, e.g. `nodes=12,edges=64`
    #[arg(long, global = true)]
    pub budget: Option<BudgetCaps>,
    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

/// Global settings handed to every subcommand.
#[derive(Clone, Debug)]
pub struct Context {
    pub seed: u64,
    pub tolerance: f64,
    pub budget: BudgetCaps,
    input_hash: Option<String>,
}

impl Context {
    pub fn new(seed: u64, tolerance: f64, budget: BudgetCaps) -> Self {
        Context { seed, tolerance, budget, input_hash: None }
    }

    pub fn load(&mut self, path: &std::path::Path) -> Result<HypergraphDocument, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Domain(format!("cannot read {}: {e}", path.display())))?;
        self.input_hash = Some(format!("{:x}", Sha256::digest(&bytes)));
        let text = String::from_utf8(bytes).map_err(|_| CliError::Domain(format!("{} is not UTF-8", path.display())))?;
        let doc = parse_document(&text)?;
        self.budget.check(&doc)?;
        Ok(doc)
    }

    fn provenance(&self) -> Value {
        json!({
            "tool": "hyperstate",
            "version": env!("CARGO_PKG_VERSION"),
            "input_sha256": self.input_hash,
            "seed": self.seed,
        })
    }
}

/// Result of a subcommand. `body` is always available; CSV and DOT only where meaningful.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub body: Map<String, Value>,
    pub csv: Option<String>,
    pub dot: Option<String>,
    pub preferred: Option<Format>,
}

impl Report {
    pub fn with(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.body.insert(key.to_string(), v.into());
        self
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.body.insert(key.to_string(), v.into());
    }
}

/// Reported floats are rounded to 12 decimals so exact values print exactly.
pub fn num(x: f64) -> Value {
    let r = (x * 1e12).round() / 1e12;
    let r = if r == 0.0 { 0.0 } else { r };
    json!(if r.is_finite() { r } else { x })
}

fn flat_csv(body: &Map<String, Value>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let keys: Vec<&String> = body.keys().filter(|k| *k != "provenance").collect();
    let cell = |v: &Value| match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    w.write_record(keys.iter().map(|k| k.as_str())).map_err(|e| CliError::Domain(e.to_string()))?;
    w.write_record(keys.iter().map(|k| cell(&body[*k]))).map_err(|e| CliError::Domain(e.to_string()))?;
    String::from_utf8(w.into_inner().map_err(|e| CliError::Domain(e.to_string()))?).map_err(|e| CliError::Domain(e.to_string()))
}

pub fn render(report: Report, ctx: &Context, format: Option<Format>) -> Result<String, CliError> {
    let format = format.or(report.preferred).unwrap_or(Format::Json);
    match format {
        Format::Json => {
            let mut body = report.body;
            body.insert("provenance".into(), ctx.provenance());
            Ok(format!("{}\n", Value::Object(body)))
        }
        Format::Csv => match report.csv {
            Some(c) => Ok(c),
            None => flat_csv(&report.body),
        },
        Format::Dot => report.dot.ok_or_else(|| CliError::Usage("this subcommand has no DOT output".into())),
    }
}

pub fn configure_threads() {
    if let Some(n) = std::env::var("HYPERSTATE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses, runs and renders; the caller prints the output and maps errors to exit codes.
pub fn run(cli: Cli) -> Result<String, CliError> {
    let mut ctx = Context::new(cli.seed, cli.tolerance, cli.budget.unwrap_or_default());
    if !(cli.tolerance > 0.0) {
        return Err(CliError::Usage("--tolerance must be positive".into()));
    }
    let report = commands::execute(cli.command, &mut ctx)?;
    let text = render(report, &ctx, cli.format)?;
    if let Some(path) = cli.out {
        std::fs::write(&path, &text).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))?;
        return Ok(String::new());
    }
    Ok(text)
}
