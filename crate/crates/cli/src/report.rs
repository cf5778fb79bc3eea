//! JSON report envelope, CSV tables and exit codes.

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;
use entroscope::Error;
use serde::Serialize;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;

#[derive(Args, Clone, Debug, Default, Serialize)]
pub struct OutputArgs {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the per-n table as CSV.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

/// Rows of a CSV table: a header and stringly typed cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write(&self, path: &PathBuf) -> Result<(), Error> {
        let io = |e: csv::Error| Error::Parse(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
    }
}

/// What a command hands back to `main`.
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
    pub warnings: Vec<String>,
    /// The analysis ran, but a requested certificate could not be issued.
    pub certification_failed: bool,
}

impl Outcome {
    pub fn new(result: impl Serialize) -> Self {
        Outcome {
            result: serde_json::to_value(result).expect("reports serialize"),
            table: None,
            warnings: Vec::new(),
            certification_failed: false,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::NonConvergence { .. }
        | Error::NonPositive(_)
        | Error::HarmonicNotAccepted { .. } => EXIT_FAILURE,
        _ => EXIT_CONFIG,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::Nondeterministic { .. } => "nondeterministic",
        Error::NotStronglyConnected => "not_strongly_connected",
        Error::UnknownSymbol { .. } => "unknown_symbol",
        Error::EmptyForbiddenSet | Error::EmptyWord => "empty_forbidden_word",
        Error::DuplicateEdge { .. } => "duplicate_edge",
        Error::UnknownVertex(_) => "unknown_vertex",
        Error::Expansion { .. } => "expansion_failed",
        Error::Parse(_) => "parse",
        Error::ParameterOutOfRange(_) => "parameter_out_of_range",
        Error::InsufficientData(_) => "insufficient_data",
        Error::MissingConnK => "missing_conn_k",
        Error::MissingHarmonicValue(_) => "missing_harmonic_value",
        Error::HarmonicNotAccepted { .. } => "harmonic_not_accepted",
        Error::NonConvergence { .. } => "non_convergence",
        Error::NonPositive(_) => "non_positive",
        Error::InexactWeight(_) => "inexact_weight",
        Error::MissingWeight(_) => "missing_weight",
    }
}

pub fn error_document(command: &str, e: &Error) -> Value {
    json!({
        "tool": "entroscope",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "error": { "kind": error_kind(e), "message": e.to_string(), "exit_code": exit_code(e) },
    })
}

/// The full report. Keys are sorted and `generated_at_unix` is the only
/// field that differs between identical runs.
pub fn document(command: &str, config: Value, outcome: &Outcome) -> Value {
    let generated = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "tool": "entroscope",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config": config,
        "result": outcome.result,
        "warnings": outcome.warnings,
        "certification_failed": outcome.certification_failed,
        "generated_at_unix": generated,
    })
}

pub fn emit(doc: &Value, outcome: &Outcome, out: &OutputArgs) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(doc).expect("reports serialize");
    match &out.out {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{text}");
        }
    }
    if let (Some(path), Some(table)) = (&out.csv, &outcome.table) {
        table.write(path)?;
    }
    Ok(())
}
