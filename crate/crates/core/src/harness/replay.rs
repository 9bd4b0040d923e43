use std::collections::BTreeSet;
use std::path::Path;

use serde::Deserialize;

use crate::bitcore::{BitKey, Permutation};
use crate::cascade::{block_schedule, run_cascade, Transcript};
use crate::error::{Error, Result};
use crate::sieve::{passive_attack, CandidateSet, SieveOptions};

/// A hand-checkable Cascade run with its expected results.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub alice: String,
    pub bob: String,
    pub k1: usize,
    pub passes: usize,
    /// Gather orders for pass 2 onwards; pass 1 is always the identity.
    #[serde(default)]
    pub permutations: Vec<Vec<usize>>,
    /// `[id, bit]` pairs known to the eavesdropper before the sieve.
    #[serde(default)]
    pub known: Vec<(usize, u8)>,
    #[serde(default)]
    pub expect: Expectations,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    pub reconciled: Option<String>,
    pub leaked: Option<usize>,
    pub corrections: Option<Vec<usize>>,
    pub valid_keys: Option<Vec<String>>,
    pub space: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub field: &'static str,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug)]
pub struct ReplayReport {
    pub name: String,
    pub transcript: Transcript,
    pub reconciled: BitKey,
    pub candidates: CandidateSet,
    pub mismatches: Vec<Mismatch>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn parse_fixture(text: &str) -> Result<Fixture> {
    toml::from_str(text).map_err(|e| Error::InvalidConfig(e.message().to_string()))
}

pub fn load_fixture(path: &Path) -> Result<Fixture> {
    parse_fixture(&std::fs::read_to_string(path)?)
}

/// Runs the fixture through Cascade and the sieve and compares every
/// expectation it states.
pub fn replay(name: &str, fx: &Fixture) -> Result<ReplayReport> {
    let alice = BitKey::parse(&fx.alice)?;
    let bob = BitKey::parse(&fx.bob)?;
    let n = alice.len();
    let schedule = block_schedule(0.0, n, fx.passes, Some(fx.k1))?;
    let mut perms = vec![Permutation::identity(n)];
    for order in &fx.permutations {
        perms.push(Permutation::new(order.clone())?);
    }
    let (reconciled, transcript) = run_cascade(&alice, &bob, &schedule, &perms)?;
    let candidates = passive_attack(&transcript, &fx.known, &SieveOptions::default())?.candidates;

    let mut mismatches = Vec::new();
    let mut check = |field: &'static str, expected: String, actual: String| {
        if expected != actual {
            mismatches.push(Mismatch {
                field,
                expected,
                actual,
            });
        }
    };
    let e = &fx.expect;
    if let Some(r) = &e.reconciled {
        check("reconciled", r.clone(), reconciled.to_string());
    }
    if let Some(l) = e.leaked {
        check("leaked", l.to_string(), transcript.leaked_count().to_string());
    }
    if let Some(c) = &e.corrections {
        check(
            "corrections",
            format!("{c:?}"),
            format!("{:?}", transcript.corrections_per_pass),
        );
    }
    if let Some(keys) = &e.valid_keys {
        let want: BTreeSet<&str> = keys.iter().map(String::as_str).collect();
        let got = candidates.bitstrings();
        let got: BTreeSet<&str> = got.iter().map(String::as_str).collect();
        check("valid_keys", join(&want), join(&got));
    }
    if let Some(s) = e.space {
        check("space", s.to_string(), candidates.space().to_string());
    }
    Ok(ReplayReport {
        name: name.to_string(),
        transcript,
        reconciled,
        candidates,
        mismatches,
    })
}

fn join(set: &BTreeSet<&str>) -> String {
    set.iter().copied().collect::<Vec<_>>().join(",")
}
