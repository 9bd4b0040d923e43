use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use super::session::{run_session_to, Depth, SessionOutcome};
use crate::bb84::SessionConfig;
use crate::error::Result;
use crate::sieve::run_chunked;

/// Which seeds to run and which outcomes count as results.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub rho_values: Vec<f64>,
    pub seeds: Range<u64>,
    /// Inclusive reconciled-length window a session must land in.
    pub target_n: Option<(usize, usize)>,
    /// Results kept per cell.
    pub stop_after: usize,
    /// Split results into cells by `p_est` rounded to 3 decimals.
    pub bin_by_qber: bool,
    /// When non-empty, only these `p_est` bins (in thousandths) are collected,
    /// and the run stops early once all of them are full.
    pub p_bins_milli: Vec<u32>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        use crate::error::Error;
        if self.rho_values.is_empty() {
            return Err(Error::InvalidConfig("at least one rho value is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidConfig("seed range is empty".into()));
        }
        if self.stop_after == 0 {
            return Err(Error::InvalidConfig("stop_after must be at least 1".into()));
        }
        Ok(())
    }
}

/// `p_est` bin in thousandths.
pub fn qber_bin_milli(p: f64) -> u32 {
    (p * 1000.0).round() as u32
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessRow {
    pub rho: f64,
    pub seeds: u64,
    pub undetected: u64,
    pub success_rate: f64,
}

/// Fraction of sessions per `rho` whose QBER estimate stayed under the
/// threshold. Parallel over seeds; the result does not depend on `workers`.
pub fn sweep_success_rate(
    spec: &SweepSpec,
    template: &SessionConfig,
    workers: usize,
) -> Result<Vec<SuccessRow>> {
    spec.validate()?;
    spec.rho_values
        .iter()
        .map(|&rho| {
            let undetected = run_chunked(workers, || {
                spec.seeds
                    .clone()
                    .into_par_iter()
                    .map(|seed| {
                        let cfg = SessionConfig {
                            rho,
                            seed,
                            ..template.clone()
                        };
                        run_session_to(&cfg, Depth::Exchange).map(|r| !r.outcome.detected as u64)
                    })
                    .try_reduce(|| 0, |a, b| Ok(a + b))
            })?;
            let seeds = spec.seeds.end - spec.seeds.start;
            Ok(SuccessRow {
                rho,
                seeds,
                undetected,
                success_rate: undetected as f64 / seeds as f64,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub rho: f64,
    pub p_bin: Option<f64>,
    pub results: usize,
    /// Seeds from the start of the range up to the last one used in the cell.
    pub seeds_consumed: u64,
    pub success_frequency: f64,
    pub truncations: usize,
    pub full_recoveries: usize,
    pub mean_secure_after_partial: Option<f64>,
    pub se_secure_after_partial: Option<f64>,
    pub mean_secure_after_moa: Option<f64>,
    pub se_secure_after_moa: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    /// Accepted sessions, sorted by (rho, p_est, seed).
    pub outcomes: Vec<SessionOutcome>,
    pub cells: Vec<CellSummary>,
}

fn mean_se(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (Some(mean), None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (Some(mean), Some((var / n).sqrt()))
}

#[derive(Default)]
struct Cell {
    results: Vec<SessionOutcome>,
    truncations: usize,
    last_seed: Option<u64>,
}

const BATCH: u64 = 8192;

/// Screens seeds in order, keeps undetected sessions with a non-zero QBER
/// estimate and a reconciled length inside `target_n`, and aggregates them
/// per (rho, p_est bin) cell until each cell holds `stop_after` results.
///
/// Sessions run in parallel batches but are accepted strictly in seed
/// order, so the report is identical for any worker count.
pub fn run_attack_experiment(
    spec: &SweepSpec,
    template: &SessionConfig,
    depth: Depth,
    workers: usize,
) -> Result<ExperimentReport> {
    spec.validate()?;
    let mut outcomes = Vec::new();
    let mut cells_out = Vec::new();
    for &rho in &spec.rho_values {
        let mut cells: BTreeMap<Option<u32>, Cell> = BTreeMap::new();
        let full = |cells: &BTreeMap<Option<u32>, Cell>| {
            if !spec.bin_by_qber {
                return cells
                    .get(&None)
                    .is_some_and(|c| c.results.len() >= spec.stop_after);
            }
            !spec.p_bins_milli.is_empty()
                && spec.p_bins_milli.iter().all(|b| {
                    cells
                        .get(&Some(*b))
                        .is_some_and(|c| c.results.len() >= spec.stop_after)
                })
        };
        let mut start = spec.seeds.start;
        while start < spec.seeds.end && !full(&cells) {
            let end = (start + BATCH).min(spec.seeds.end);
            let batch: Vec<SessionOutcome> = run_chunked(workers, || {
                (start..end)
                    .into_par_iter()
                    .map(|seed| screen(template, rho, seed, spec, depth))
                    .filter_map(|r| r.transpose())
                    .collect::<Result<Vec<_>>>()
            })?;
            for out in batch {
                let key = spec.bin_by_qber.then(|| qber_bin_milli(out.p_est.unwrap_or(0.0)));
                if let Some(k) = key {
                    if !spec.p_bins_milli.is_empty() && !spec.p_bins_milli.contains(&k) {
                        continue;
                    }
                }
                let cell = cells.entry(key).or_default();
                if cell.results.len() >= spec.stop_after {
                    continue;
                }
                cell.last_seed = Some(out.seed);
                if out.truncated {
                    cell.truncations += 1;
                } else {
                    cell.results.push(out);
                }
            }
            start = end;
        }
        for (key, cell) in cells {
            let partial: Vec<f64> = cell
                .results
                .iter()
                .filter_map(|o| o.secure_after_partial)
                .collect();
            let moa: Vec<f64> = cell.results.iter().filter_map(|o| o.secure_after_moa).collect();
            let (mp, sp) = mean_se(&partial);
            let (mm, sm) = mean_se(&moa);
            let consumed = cell.last_seed.map_or(0, |s| s - spec.seeds.start + 1);
            cells_out.push(CellSummary {
                rho,
                p_bin: key.map(|k| k as f64 / 1000.0),
                results: cell.results.len(),
                seeds_consumed: consumed,
                success_frequency: if consumed == 0 {
                    0.0
                } else {
                    cell.results.len() as f64 / consumed as f64
                },
                truncations: cell.truncations,
                full_recoveries: cell.results.iter().filter(|o| o.space_log2 == Some(0.0)).count(),
                mean_secure_after_partial: mp,
                se_secure_after_partial: sp,
                mean_secure_after_moa: mm,
                se_secure_after_moa: sm,
            });
            outcomes.extend(cell.results);
        }
    }
    outcomes.sort_by(|a, b| {
        a.rho
            .total_cmp(&b.rho)
            .then(a.p_est.unwrap_or(0.0).total_cmp(&b.p_est.unwrap_or(0.0)))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(ExperimentReport {
        outcomes,
        cells: cells_out,
    })
}

/// Cheap exchange-only screen first; the deeper stages only run for seeds
/// that qualify.
fn screen(
    template: &SessionConfig,
    rho: f64,
    seed: u64,
    spec: &SweepSpec,
    depth: Depth,
) -> Result<Option<SessionOutcome>> {
    let cfg = SessionConfig {
        rho,
        seed,
        workers: 1,
        ..template.clone()
    };
    let quick = run_session_to(&cfg, Depth::Exchange)?.outcome;
    let n_ok = spec
        .target_n
        .is_none_or(|(lo, hi)| (lo..=hi).contains(&quick.n_reconciled));
    let qualifies = !quick.detected && quick.p_est.is_some_and(|p| p > 0.0) && n_ok;
    if !qualifies {
        return Ok(None);
    }
    if spec.bin_by_qber && !spec.p_bins_milli.is_empty() {
        let bin = qber_bin_milli(quick.p_est.unwrap_or(0.0));
        if !spec.p_bins_milli.contains(&bin) {
            return Ok(None);
        }
    }
    Ok(Some(run_session_to(&cfg, depth)?.outcome))
}
