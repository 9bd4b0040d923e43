use std::time::Instant;

use serde::Serialize;

use crate::bb84::{estimate_qber, generate_raw, sift, transmit, QberEstimate, SessionConfig, SiftedKeys};
use crate::bitcore::{seeded_permutation, BitKey, Permutation};
use crate::cascade::{block_schedule, run_cascade, Transcript};
use crate::error::{Error, Result};
use crate::intercept::{eve_sift, plan_interception, project_knowledge, EveKnowledge};
use crate::leakage::{secure_after_partial, LeakageReport};
use crate::sieve::{passive_attack, SieveOptions, SieveReport};

/// How far a session is carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Depth {
    /// Quantum exchange, sifting and QBER estimation.
    Exchange,
    /// Adds Cascade and the closed-form security ledger.
    Partial,
    /// Adds the keyspace sieve.
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SessionOutcome {
    pub seed: u64,
    pub rho: f64,
    /// Absent when the sifted key was too short to sample.
    pub p_est: Option<f64>,
    pub detected: bool,
    pub n_reconciled: usize,
    pub eve_fraction: Option<f64>,
    pub leaked_count: Option<usize>,
    pub space_log2: Option<f64>,
    pub truncated: bool,
    pub secure_after_partial: Option<f64>,
    pub secure_after_moa: Option<f64>,
    #[serde(skip)]
    pub runtime_ms: f64,
}

/// Everything a session produced, for callers that need more than the
/// outcome row.
#[derive(Clone, Debug)]
pub struct SessionRun {
    pub outcome: SessionOutcome,
    pub sifted: SiftedKeys,
    pub estimate: Option<QberEstimate>,
    pub knowledge: EveKnowledge,
    pub leakage: Option<LeakageReport>,
    pub transcript: Option<Transcript>,
    pub reconciled_bob: Option<BitKey>,
    pub sieve: Option<SieveReport>,
}

impl SessionRun {
    pub fn reconciled_alice(&self) -> Option<&BitKey> {
        self.estimate.as_ref().map(|e| &e.remaining_alice)
    }
}

/// Cascade permutations: identity for pass 1, then one seeded shuffle per pass.
pub fn session_permutations(cfg: &SessionConfig, n: usize, passes: usize) -> Vec<Permutation> {
    (0..passes)
        .map(|i| {
            if i == 0 {
                Permutation::identity(n)
            } else {
                seeded_permutation(n, cfg.pass_seed(i))
            }
        })
        .collect()
}

pub fn run_session(cfg: &SessionConfig) -> Result<SessionOutcome> {
    run_session_to(cfg, Depth::Full).map(|r| r.outcome)
}

pub fn run_session_to(cfg: &SessionConfig, depth: Depth) -> Result<SessionRun> {
    cfg.validate()?;
    let started = Instant::now();
    let plan = plan_interception(cfg);
    let record = transmit(&generate_raw(cfg), &plan, cfg)?;
    let sifted = sift(&record);
    let eve_raw = eve_sift(&record, &sifted);

    let mut outcome = SessionOutcome {
        seed: cfg.seed,
        rho: cfg.rho,
        p_est: None,
        detected: true,
        n_reconciled: 0,
        eve_fraction: None,
        leaked_count: None,
        space_log2: None,
        truncated: false,
        secure_after_partial: None,
        secure_after_moa: None,
        runtime_ms: 0.0,
    };
    let mut run = SessionRun {
        outcome: outcome.clone(),
        sifted,
        estimate: None,
        knowledge: EveKnowledge::default(),
        leakage: None,
        transcript: None,
        reconciled_bob: None,
        sieve: None,
    };

    let estimate = match estimate_qber(&run.sifted, cfg) {
        Ok(e) => e,
        Err(Error::EmptySample { .. }) => {
            run.outcome.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
            return Ok(run);
        }
        Err(e) => return Err(e),
    };
    outcome.p_est = Some(estimate.p_est);
    outcome.detected = estimate.detected;
    outcome.n_reconciled = estimate.remaining_alice.len();
    let knowledge = project_knowledge(&eve_raw, &estimate);

    if !estimate.detected && depth >= Depth::Partial {
        let n = estimate.remaining_alice.len();
        let fraction = knowledge.known_fraction(n);
        let known = knowledge.known_bits.len();
        outcome.eve_fraction = Some(fraction);
        match block_schedule(estimate.p_est, n, cfg.passes, cfg.k1) {
            Ok(schedule) => {
                let perms = session_permutations(cfg, n, schedule.passes());
                let (bob, transcript) = run_cascade(
                    &estimate.remaining_alice,
                    &estimate.remaining_bob,
                    &schedule,
                    &perms,
                )?;
                let report =
                    LeakageReport::new(n, estimate.p_est, &schedule, &transcript.corrections_per_pass);
                outcome.leaked_count = Some(transcript.leaked_count());
                outcome.secure_after_partial = Some(secure_after_partial(report.cascade_bound, fraction));
                if depth == Depth::Full {
                    let opts = SieveOptions {
                        max_candidates: cfg.max_candidates,
                        chunk_size: cfg.chunk_size,
                        workers: cfg.workers,
                    };
                    match passive_attack(&transcript, &knowledge.known_pairs(), &opts) {
                        Ok(report) => {
                            outcome.space_log2 = report.candidates.log2_space();
                            outcome.secure_after_moa = outcome.space_log2;
                            run.sieve = Some(report);
                        }
                        Err(Error::SearchSpaceExceeded { .. } | Error::KeyTooLong { .. }) => {
                            outcome.truncated = true;
                        }
                        Err(e) => return Err(e),
                    }
                }
                run.leakage = Some(report);
                run.transcript = Some(transcript);
                run.reconciled_bob = Some(bob);
            }
            // nothing to reconcile: no disclosures, only Eve's own bits count
            Err(Error::ZeroQber) | Err(Error::InvalidConfig(_)) => {
                outcome.leaked_count = Some(0);
                outcome.secure_after_partial = Some(secure_after_partial(n as f64, fraction));
                if depth == Depth::Full {
                    let log2 = (n - known) as f64;
                    outcome.space_log2 = Some(log2);
                    outcome.secure_after_moa = Some(log2);
                }
                run.reconciled_bob = Some(estimate.remaining_bob.clone());
            }
            Err(e) => return Err(e),
        }
    }

    outcome.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    run.outcome = outcome;
    run.estimate = Some(estimate);
    run.knowledge = knowledge;
    Ok(run)
}
