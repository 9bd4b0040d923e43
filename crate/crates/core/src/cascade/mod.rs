//! Cascade reconciliation with a record of every parity Alice discloses.
//!
//! Pass 1 runs on the unpermuted keys; every later pass uses its own gather
//! permutation and doubles the block size (capped at half the key). A block
//! whose parities differ is bisected by Binary, which always reveals the
//! parity of the left half (the larger half when the length is odd). In
//! passes after the first, every correction starts a look-back over the
//! blocks of earlier passes that contain the corrected bit.
//!
//! Bit IDs in the transcript are positions in the key handed to
//! [`run_cascade`].

mod transcript;

use std::collections::BTreeSet;

use crate::bitcore::{BitKey, Permutation};
use crate::error::{Error, Result};

pub use transcript::{Origin, ParityConstraint, Transcript};

/// Block-size constant of the initial block size `k1 = ceil(0.73 / p)`.
pub const K1_CONSTANT: f64 = 0.73;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSchedule {
    /// Block size of each pass.
    pub sizes: Vec<usize>,
    pub k1_override: Option<usize>,
}

impl BlockSchedule {
    pub fn passes(&self) -> usize {
        self.sizes.len()
    }

    pub fn k1(&self) -> usize {
        self.sizes[0]
    }

    /// Number of top blocks (remainder included) in pass `pass`.
    pub fn top_blocks(&self, n: usize, pass: usize) -> usize {
        n.div_ceil(self.sizes[pass])
    }
}

/// `k1 = ceil(0.73 / p)` (or the override), doubling per pass, every size
/// capped at `floor(n / 2)`.
pub fn block_schedule(
    p_est: f64,
    n: usize,
    passes: usize,
    k1_override: Option<usize>,
) -> Result<BlockSchedule> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "cannot schedule Cascade on a {n}-bit key"
        )));
    }
    if passes == 0 {
        return Err(Error::InvalidConfig("passes must be at least 1".into()));
    }
    let k1 = match k1_override {
        Some(0) => return Err(Error::InvalidConfig("k1 must be at least 1".into())),
        Some(k) => k,
        None if p_est <= 0.0 => return Err(Error::ZeroQber),
        None => {
            let k = (K1_CONSTANT / p_est).ceil();
            if k.is_finite() && k < usize::MAX as f64 {
                k as usize
            } else {
                usize::MAX
            }
        }
    };
    let cap = n / 2;
    let mut sizes = Vec::with_capacity(passes);
    let mut k = k1.min(cap);
    for _ in 0..passes {
        sizes.push(k);
        k = k.saturating_mul(2).min(cap);
    }
    Ok(BlockSchedule { sizes, k1_override })
}

/// Bisects `block` (positions, in protocol order) to find and flip one of
/// Bob's errors. `disclose` receives each left sub-block with Alice's parity
/// of it. Returns the corrected position.
pub fn run_binary(
    alice: &BitKey,
    bob: &mut BitKey,
    block: &[usize],
    mut disclose: impl FnMut(&[usize], u8),
) -> Result<usize> {
    if block.is_empty() || alice.parity_at(block) == bob.parity_at(block) {
        return Err(Error::EvenErrorBlock);
    }
    let mut cur = block;
    while cur.len() > 1 {
        let (left, right) = cur.split_at(cur.len().div_ceil(2));
        let a = alice.parity_at(left);
        disclose(left, a);
        cur = if bob.parity_at(left) != a { left } else { right };
    }
    bob.flip(cur[0]);
    Ok(cur[0])
}

struct Pass {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    alice_parity: Vec<u8>,
}

struct Run<'a> {
    alice: &'a BitKey,
    bob: BitKey,
    passes: Vec<Pass>,
    transcript: Transcript,
}

impl Run<'_> {
    fn mismatched(&self, pass: usize, block: usize) -> bool {
        let p = &self.passes[pass];
        self.bob.parity_at(&p.blocks[block]) != p.alice_parity[block]
    }

    fn binary(&mut self, pass: usize, block: usize, origin: Origin) -> Result<usize> {
        let positions = self.passes[pass].blocks[block].clone();
        let transcript = &mut self.transcript;
        let corrected = run_binary(self.alice, &mut self.bob, &positions, |half, parity| {
            transcript.disclose(pass, block, origin, half, parity);
        })?;
        self.transcript.corrections_per_pass[pass] += 1;
        Ok(corrected)
    }

    /// Work list ordered by (pass, block size, block index).
    fn look_back(&mut self, current: usize, corrected: usize) -> Result<()> {
        let mut work: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        self.enqueue(&mut work, current, corrected);
        while let Some((pass, _, block)) = work.pop_first() {
            if self.mismatched(pass, block) {
                let fixed = self.binary(pass, block, Origin::Lookback)?;
                self.enqueue(&mut work, current, fixed);
            }
        }
        Ok(())
    }

    fn enqueue(&self, work: &mut BTreeSet<(usize, usize, usize)>, current: usize, pos: usize) {
        for (pass, p) in self.passes.iter().enumerate().take(current) {
            let b = p.block_of[pos];
            work.insert((pass, p.blocks[b].len(), b));
        }
    }
}

/// Reconciles `bob` towards `alice`. Returns Bob's corrected key and the
/// transcript of Alice's disclosures.
pub fn run_cascade(
    alice: &BitKey,
    bob: &BitKey,
    schedule: &BlockSchedule,
    permutations: &[Permutation],
) -> Result<(BitKey, Transcript)> {
    let n = alice.len();
    if bob.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: bob.len(),
        });
    }
    if permutations.len() != schedule.passes() {
        return Err(Error::ScheduleMismatch {
            passes: schedule.passes(),
            permutations: permutations.len(),
        });
    }
    for p in permutations {
        if p.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: p.len(),
            });
        }
    }
    if !permutations[0].is_identity() {
        return Err(Error::InvalidPermutation(
            "the first pass must use the identity permutation".into(),
        ));
    }

    let mut run = Run {
        alice,
        bob: bob.clone(),
        passes: Vec::with_capacity(schedule.passes()),
        transcript: Transcript::new(n, schedule.clone(), permutations.to_vec()),
    };

    for (pass, perm) in permutations.iter().enumerate() {
        let k = schedule.sizes[pass];
        let blocks: Vec<Vec<usize>> = perm.order().chunks(k).map(<[usize]>::to_vec).collect();
        let mut block_of = vec![0; n];
        for (b, block) in blocks.iter().enumerate() {
            for &pos in block {
                block_of[pos] = b;
            }
        }
        let alice_parity: Vec<u8> = blocks.iter().map(|b| alice.parity_at(b)).collect();
        for (b, block) in blocks.iter().enumerate() {
            run.transcript
                .disclose(pass, b, Origin::Top, block, alice_parity[b]);
        }
        run.passes.push(Pass {
            blocks,
            block_of,
            alice_parity,
        });

        for b in 0..run.passes[pass].blocks.len() {
            if !run.mismatched(pass, b) {
                continue;
            }
            let corrected = run.binary(pass, b, Origin::Binary)?;
            if pass > 0 {
                run.look_back(pass, corrected)?;
            }
        }
    }

    let mut transcript = run.transcript;
    transcript.residual_errors = run.bob.hamming(alice);
    Ok((run.bob, transcript))
}
