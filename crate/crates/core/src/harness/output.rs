use std::fmt::Write as _;

use serde::Serialize;

use super::session::SessionOutcome;
use super::sweep::{CellSummary, SuccessRow};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Ndjson,
}

impl std::str::FromStr for Format {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "ndjson" | "jsonl" => Ok(Format::Ndjson),
            other => Err(crate::error::Error::InvalidConfig(format!(
                "unknown format `{other}`"
            ))),
        }
    }
}

fn f(v: f64) -> String {
    format!("{v:.6}")
}

fn opt_f(v: Option<f64>) -> String {
    v.map(f).unwrap_or_default()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Rows of a table that can be written as CSV.
pub trait CsvRow {
    const HEADER: &'static str;
    fn cells(&self) -> Vec<String>;
}

impl CsvRow for SessionOutcome {
    const HEADER: &'static str = "seed,rho,p_est,detected,n_reconciled,eve_fraction,leaked_count,space_log2,truncated,secure_after_partial,secure_after_moa";

    fn cells(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            f(self.rho),
            opt_f(self.p_est),
            self.detected.to_string(),
            self.n_reconciled.to_string(),
            opt_f(self.eve_fraction),
            opt(self.leaked_count),
            opt_f(self.space_log2),
            self.truncated.to_string(),
            opt_f(self.secure_after_partial),
            opt_f(self.secure_after_moa),
        ]
    }
}

impl CsvRow for SuccessRow {
    const HEADER: &'static str = "rho,seeds,undetected,success_rate";

    fn cells(&self) -> Vec<String> {
        vec![
            f(self.rho),
            self.seeds.to_string(),
            self.undetected.to_string(),
            f(self.success_rate),
        ]
    }
}

impl CsvRow for CellSummary {
    const HEADER: &'static str = "rho,p_bin,results,seeds_consumed,success_frequency,truncations,full_recoveries,mean_secure_after_partial,se_secure_after_partial,mean_secure_after_moa,se_secure_after_moa";

    fn cells(&self) -> Vec<String> {
        vec![
            f(self.rho),
            opt_f(self.p_bin),
            self.results.to_string(),
            self.seeds_consumed.to_string(),
            f(self.success_frequency),
            self.truncations.to_string(),
            self.full_recoveries.to_string(),
            opt_f(self.mean_secure_after_partial),
            opt_f(self.se_secure_after_partial),
            opt_f(self.mean_secure_after_moa),
            opt_f(self.se_secure_after_moa),
        ]
    }
}

pub fn to_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut out = String::from(R::HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.cells().join(","));
    }
    out
}

pub fn to_ndjson<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut out = String::new();
    for r in rows {
        let line = serde_json::to_string(r).map_err(|e| crate::error::Error::Io(e.to_string()))?;
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

pub fn render<R: CsvRow + Serialize>(rows: &[R], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(to_csv(rows)),
        Format::Ndjson => to_ndjson(rows),
    }
}
