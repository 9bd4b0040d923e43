//! Eve's active phase: partial interception, her own sifting, and the bits
//! she knows with certainty.

use std::collections::{BTreeMap, BTreeSet};

use crate::bb84::{stream, ExchangeRecord, QberEstimate, SessionConfig, SiftedKeys};
use crate::bitcore::SimRng;

#[derive(Clone, Debug, PartialEq)]
pub struct InterceptPlan {
    pub mask: Vec<bool>,
    pub rho: f64,
}

impl InterceptPlan {
    pub fn density(&self) -> f64 {
        if self.mask.is_empty() {
            return 0.0;
        }
        self.mask.iter().filter(|&&m| m).count() as f64 / self.mask.len() as f64
    }
}

/// Each raw position is intercepted independently with probability `rho`.
pub fn plan_interception(cfg: &SessionConfig) -> InterceptPlan {
    let mut rng = SimRng::stream(cfg.seed, stream::INTERCEPT);
    InterceptPlan {
        mask: (0..cfg.raw_len).map(|_| rng.bernoulli(cfg.rho)).collect(),
        rho: cfg.rho,
    }
}

/// What Eve holds about a key, indexed by that key's bit IDs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EveKnowledge {
    pub known_bits: BTreeMap<usize, u8>,
    /// Intercepted in the wrong basis: Eve caused a possible error here but
    /// learned nothing about the bit.
    pub suspect_positions: BTreeSet<usize>,
}

impl EveKnowledge {
    pub fn is_empty(&self) -> bool {
        self.known_bits.is_empty() && self.suspect_positions.is_empty()
    }

    pub fn known_fraction(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.known_bits.len() as f64 / n as f64
        }
    }

    /// `(id, bit)` pairs in ascending ID order.
    pub fn known_pairs(&self) -> Vec<(usize, u8)> {
        self.known_bits.iter().map(|(&i, &b)| (i, b)).collect()
    }
}

/// Once bases are announced Eve keeps the sifted positions she measured in
/// Alice's basis; the rest of her interceptions become suspects.
pub fn eve_sift(record: &ExchangeRecord, sifted: &SiftedKeys) -> EveKnowledge {
    let mut k = EveKnowledge::default();
    for (id, &raw) in sifted.kept_positions.iter().enumerate() {
        if !record.eve_intercepted[raw] {
            continue;
        }
        match (record.eve_bases[raw], record.eve_bits[raw]) {
            (Some(basis), Some(bit)) if basis == record.alice_bases[raw] => {
                k.known_bits.insert(id, bit);
            }
            _ => {
                k.suspect_positions.insert(id);
            }
        }
    }
    k
}

/// Drops the positions sacrificed to QBER estimation and renumbers the rest
/// into the reconciled-key ID space.
pub fn project_knowledge(knowledge: &EveKnowledge, estimate: &QberEstimate) -> EveKnowledge {
    let mut out = EveKnowledge::default();
    for (new_id, old_id) in estimate.remaining_positions.iter().enumerate() {
        if let Some(&b) = knowledge.known_bits.get(old_id) {
            out.known_bits.insert(new_id, b);
        }
        if knowledge.suspect_positions.contains(old_id) {
            out.suspect_positions.insert(new_id);
        }
    }
    out
}
