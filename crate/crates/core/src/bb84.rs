//! Idealised BB84 exchange, sifting and QBER estimation.

use serde::{Deserialize, Serialize};

use crate::bitcore::{derive_seed, BitKey, SimRng};
use crate::error::{Error, Result};
use crate::intercept::InterceptPlan;

/// Sub-stream identifiers; every random choice in a session draws from
/// `SimRng::stream(seed, <stream>)`.
pub(crate) mod stream {
    pub const ALICE_BITS: u64 = 1;
    pub const ALICE_BASES: u64 = 2;
    pub const BOB_BASES: u64 = 3;
    pub const INTERCEPT: u64 = 4;
    pub const EVE_BASES: u64 = 5;
    pub const MEASURE: u64 = 6;
    pub const SAMPLE: u64 = 7;
    pub const PASS: u64 = 100;
}

/// Every knob of one simulated session. Defaults follow the reference
/// operating point: 317 raw bits, unbiased bases, noiseless detectors, a 37%
/// QBER sample, an 11% abort threshold and three Cascade passes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    pub raw_len: usize,
    pub basis_bias_delta: f64,
    pub eve_basis_bias_delta: f64,
    pub detector_noise: f64,
    pub sample_rate: f64,
    pub qber_threshold: f64,
    pub passes: usize,
    pub rho: f64,
    pub seed: u64,
    /// Per-pass permutation seeds; missing entries are derived from `seed`.
    pub pass_seeds: Vec<u64>,
    /// Explicit initial block size, bypassing `0.73 / p`.
    pub k1: Option<usize>,
    pub max_candidates: u64,
    pub chunk_size: usize,
    /// Sieve worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            raw_len: 317,
            basis_bias_delta: 0.5,
            eve_basis_bias_delta: 0.5,
            detector_noise: 0.0,
            sample_rate: 0.37,
            qber_threshold: 0.11,
            passes: 3,
            rho: 0.0,
            seed: 0,
            pass_seeds: Vec::new(),
            k1: None,
            max_candidates: 1 << 26,
            chunk_size: 4096,
            workers: 0,
        }
    }
}

impl SessionConfig {
    /// Reduced profile whose reconciled keys (about 30 bits) fit the sieve.
    pub fn desk() -> Self {
        SessionConfig {
            raw_len: 96,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("basis_bias_delta", self.basis_bias_delta),
            ("eve_basis_bias_delta", self.eve_basis_bias_delta),
            ("detector_noise", self.detector_noise),
            ("sample_rate", self.sample_rate),
            ("qber_threshold", self.qber_threshold),
            ("rho", self.rho),
        ];
        for (name, v) in probs {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        if self.detector_noise != 0.0 {
            return Err(Error::InvalidConfig(
                "detector_noise must be 0: only the noiseless channel is simulated".into(),
            ));
        }
        if self.raw_len == 0 {
            return Err(Error::InvalidConfig("raw_len must be at least 1".into()));
        }
        if self.passes == 0 {
            return Err(Error::InvalidConfig("passes must be at least 1".into()));
        }
        if self.max_candidates == 0 {
            return Err(Error::InvalidConfig("max_candidates must be at least 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidConfig("chunk_size must be at least 1".into()));
        }
        if self.k1 == Some(0) {
            return Err(Error::InvalidConfig("k1 must be at least 1".into()));
        }
        Ok(())
    }

    /// Permutation seed for pass `pass` (0-based).
    pub fn pass_seed(&self, pass: usize) -> u64 {
        self.pass_seeds
            .get(pass)
            .copied()
            .unwrap_or_else(|| derive_seed(self.seed, stream::PASS + pass as u64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Basis {
    fn draw(rng: &mut SimRng, rectilinear_prob: f64) -> Self {
        if rng.bernoulli(rectilinear_prob) {
            Basis::Rectilinear
        } else {
            Basis::Diagonal
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangeRecord {
    pub alice_bits: Vec<u8>,
    pub alice_bases: Vec<Basis>,
    pub bob_bases: Vec<Basis>,
    /// Empty until `transmit` has run.
    pub bob_bits: Vec<u8>,
    pub eve_intercepted: Vec<bool>,
    pub eve_bases: Vec<Option<Basis>>,
    pub eve_bits: Vec<Option<u8>>,
}

impl ExchangeRecord {
    pub fn raw_len(&self) -> usize {
        self.alice_bits.len()
    }

    pub fn is_transmitted(&self) -> bool {
        self.bob_bits.len() == self.alice_bits.len()
    }
}

/// Alice's bits and both parties' basis choices.
pub fn generate_raw(cfg: &SessionConfig) -> ExchangeRecord {
    let n = cfg.raw_len;
    let mut bits = SimRng::stream(cfg.seed, stream::ALICE_BITS);
    let mut a_bases = SimRng::stream(cfg.seed, stream::ALICE_BASES);
    let mut b_bases = SimRng::stream(cfg.seed, stream::BOB_BASES);
    ExchangeRecord {
        alice_bits: (0..n).map(|_| bits.bit()).collect(),
        alice_bases: (0..n)
            .map(|_| Basis::draw(&mut a_bases, cfg.basis_bias_delta))
            .collect(),
        bob_bases: (0..n)
            .map(|_| Basis::draw(&mut b_bases, cfg.basis_bias_delta))
            .collect(),
        bob_bits: Vec::new(),
        eve_intercepted: vec![false; n],
        eve_bases: vec![None; n],
        eve_bits: vec![None; n],
    }
}

/// Sends every qubit through the (possibly intercepted) noiseless channel.
///
/// A measurement in the preparation basis returns the prepared bit; any
/// other measurement returns a uniform bit. Intercepted qubits are measured
/// by Eve and re-prepared in her basis before Bob measures.
pub fn transmit(
    record: &ExchangeRecord,
    plan: &InterceptPlan,
    cfg: &SessionConfig,
) -> Result<ExchangeRecord> {
    let n = record.raw_len();
    if plan.mask.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: plan.mask.len(),
        });
    }
    if cfg.detector_noise != 0.0 {
        return Err(Error::InvalidConfig(
            "detector_noise must be 0: only the noiseless channel is simulated".into(),
        ));
    }
    let mut eve_rng = SimRng::stream(cfg.seed, stream::EVE_BASES);
    let mut outcomes = SimRng::stream(cfg.seed, stream::MEASURE);
    let mut out = record.clone();
    out.bob_bits = Vec::with_capacity(n);
    for i in 0..n {
        // fixed draw count per position keeps streams aligned across plans
        let eve_basis = Basis::draw(&mut eve_rng, cfg.eve_basis_bias_delta);
        let eve_coin = outcomes.bit();
        let bob_coin = outcomes.bit();

        let (sent_bit, sent_basis) = if plan.mask[i] {
            let eve_bit = if eve_basis == record.alice_bases[i] {
                record.alice_bits[i]
            } else {
                eve_coin
            };
            out.eve_intercepted[i] = true;
            out.eve_bases[i] = Some(eve_basis);
            out.eve_bits[i] = Some(eve_bit);
            (eve_bit, eve_basis)
        } else {
            out.eve_intercepted[i] = false;
            out.eve_bases[i] = None;
            out.eve_bits[i] = None;
            (record.alice_bits[i], record.alice_bases[i])
        };
        out.bob_bits.push(if record.bob_bases[i] == sent_basis {
            sent_bit
        } else {
            bob_coin
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiftedKeys {
    pub alice: BitKey,
    pub bob: BitKey,
    /// Raw index of every sifted bit, strictly increasing.
    pub kept_positions: Vec<usize>,
}

impl SiftedKeys {
    pub fn len(&self) -> usize {
        self.alice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alice.is_empty()
    }
}

pub fn sift(record: &ExchangeRecord) -> SiftedKeys {
    assert!(record.is_transmitted(), "sift requires a transmitted record");
    let kept_positions: Vec<usize> = (0..record.raw_len())
        .filter(|&i| record.alice_bases[i] == record.bob_bases[i])
        .collect();
    let alice: Vec<u8> = kept_positions.iter().map(|&i| record.alice_bits[i]).collect();
    let bob: Vec<u8> = kept_positions.iter().map(|&i| record.bob_bits[i]).collect();
    SiftedKeys {
        alice: BitKey::from_bits(&alice),
        bob: BitKey::from_bits(&bob),
        kept_positions,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QberEstimate {
    pub p_est: f64,
    pub mismatches: usize,
    /// Sifted indices sacrificed for the estimate, ascending.
    pub sample_positions: Vec<usize>,
    /// Sifted index of every bit that survives into reconciliation.
    pub remaining_positions: Vec<usize>,
    pub detected: bool,
    pub remaining_alice: BitKey,
    pub remaining_bob: BitKey,
}

/// `round(rate * m)` with halves rounded up.
pub fn sample_size(rate: f64, m: usize) -> usize {
    ((rate * m as f64 + 0.5).floor() as usize).min(m)
}

/// Sacrifices a uniform sample of the sifted keys (positions announced by
/// Alice) and compares it. The survivors are renumbered `0..r`.
pub fn estimate_qber(sifted: &SiftedKeys, cfg: &SessionConfig) -> Result<QberEstimate> {
    let m = sifted.len();
    let count = sample_size(cfg.sample_rate, m);
    if count == 0 {
        return Err(Error::EmptySample { sifted: m });
    }
    let mut rng = SimRng::stream(cfg.seed, stream::SAMPLE);
    let mut idx: Vec<usize> = (0..m).collect();
    for i in 0..count {
        let j = i + rng.below(m - i);
        idx.swap(i, j);
    }
    let mut sample_positions = idx[..count].to_vec();
    sample_positions.sort_unstable();

    let mut in_sample = vec![false; m];
    for &i in &sample_positions {
        in_sample[i] = true;
    }
    let mismatches = sample_positions
        .iter()
        .filter(|&&i| sifted.alice.get(i) != sifted.bob.get(i))
        .count();
    let p_est = mismatches as f64 / count as f64;

    let remaining_positions: Vec<usize> = (0..m).filter(|&i| !in_sample[i]).collect();
    let pick = |key: &BitKey| -> BitKey {
        let bits: Vec<u8> = remaining_positions.iter().map(|&i| key.get(i)).collect();
        BitKey::from_bits(&bits)
    };
    Ok(QberEstimate {
        p_est,
        mismatches,
        detected: p_est >= cfg.qber_threshold,
        remaining_alice: pick(&sifted.alice),
        remaining_bob: pick(&sifted.bob),
        sample_positions,
        remaining_positions,
    })
}
