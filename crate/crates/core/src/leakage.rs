//! Closed-form leakage bounds and secure-bit bookkeeping.

use serde::{Deserialize, Serialize};

use crate::cascade::BlockSchedule;

/// `h(p) = -p log2 p - (1-p) log2 (1-p)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Minimum leakage for reconciling `n` bits over a BSC(p).
pub fn l_min(n: usize, p: f64) -> f64 {
    n as f64 * binary_entropy(p)
}

pub fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Worst-case disclosures: every top block of every pass plus
/// `ceil(log2 k_i)` per correction made in a block of pass `i`.
pub fn l_max(n: usize, schedule: &BlockSchedule, corrections_per_pass: &[usize]) -> usize {
    schedule
        .sizes
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let e = corrections_per_pass.get(i).copied().unwrap_or(0);
            n.div_ceil(k) + e * ceil_log2(k)
        })
        .sum()
}

/// Upper bound on the bits leaked per pass-1 block after `omega` passes:
///
/// `2 + a * c + sum_{l=2..omega} 2^-(l-1) (k1 p - a) c`
///
/// with `a = (1 - (1 - 2p)^k1) / 2` and `c = ceil(log2 k1)`.
pub fn per_block_bound(omega: usize, p: f64, k1: usize) -> f64 {
    let a = (1.0 - (1.0 - 2.0 * p).powi(k1 as i32)) / 2.0;
    let c = ceil_log2(k1) as f64;
    let later: f64 = (2..=omega)
        .map(|l| 0.5f64.powi(l as i32 - 1) * (k1 as f64 * p - a) * c)
        .sum();
    2.0 + a * c + later
}

/// `n - m * I(omega)` with `m = ceil(n / k1)` pass-1 blocks.
pub fn cascade_bound(n: usize, omega: usize, p: f64, k1: usize) -> f64 {
    n as f64 - n.div_ceil(k1) as f64 * per_block_bound(omega, p, k1)
}

/// Secure bits left after the active phase: the share of the key Eve
/// intercepted is removed from Cascade's bound, `bound * (1 - eve_fraction)`.
pub fn secure_after_partial(cascade_bound: f64, eve_fraction: f64) -> f64 {
    cascade_bound * (1.0 - eve_fraction)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub l_max: usize,
    pub l_min: f64,
    pub per_block_bound: f64,
    /// Pass-1 blocks.
    pub m: usize,
    pub cascade_bound: f64,
    pub max_security: f64,
}

impl LeakageReport {
    pub fn new(n: usize, p: f64, schedule: &BlockSchedule, corrections_per_pass: &[usize]) -> Self {
        let k1 = schedule.k1();
        let omega = schedule.passes();
        let per_block = per_block_bound(omega, p, k1);
        let m = n.div_ceil(k1);
        let l_min = l_min(n, p);
        LeakageReport {
            l_max: l_max(n, schedule, corrections_per_pass),
            l_min,
            per_block_bound: per_block,
            m,
            cascade_bound: n as f64 - m as f64 * per_block,
            max_security: n as f64 - l_min,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityLedger {
    pub n: usize,
    pub eve_fraction: f64,
    pub secure_after_partial: f64,
    /// `log2` of the sieve's final candidate count.
    pub secure_after_moa: Option<f64>,
}

/// Size of a search space `2^log2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSize {
    pub log2: usize,
}

impl SpaceSize {
    pub fn exact(self) -> Option<u64> {
        (self.log2 <= 63).then(|| 1u64 << self.log2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpaceLaws {
    /// `2^(n - l)` after pass 1, `l` the pass-1 disclosures.
    pub pass1: SpaceSize,
    /// `2^(n - u)` after Cascade, `u` the GF(2) rank of all constraints.
    pub cascade: SpaceSize,
}

pub fn search_space_laws(n: usize, l: usize, u: usize) -> SearchSpaceLaws {
    SearchSpaceLaws {
        pass1: SpaceSize {
            log2: n.saturating_sub(l),
        },
        cascade: SpaceSize {
            log2: n.saturating_sub(u),
        },
    }
}
