//! Eve's passive phase: rebuild the set of reconciled keys consistent with
//! every parity Cascade disclosed and every bit Eve already holds.
//!
//! Pass-1 blocks are searched independently against a codebook of all
//! block patterns, their survivors are combined into pass-1 candidates, and
//! those candidates are filtered in parallel chunks against the constraints
//! of the later passes. Candidates are packed `u64`s with bit ID 0 as the
//! most significant of `n` bits, so numeric order is bit-string order.

mod codebook;

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::bitcore::{gf2_rank, BitKey, Gf2Matrix};
use crate::cascade::{ParityConstraint, Transcript};
use crate::error::{Error, Result};

pub use codebook::{build_codebook, canonical_checks, BlockCodebook, MAX_CODEBOOK_WIDTH};

/// Longest key the packed candidate representation holds.
pub const MAX_SIEVE_BITS: usize = 63;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub n: usize,
    /// Ascending, distinct.
    pub keys: Vec<u64>,
    /// Set when the search was abandoned; `keys` is then empty.
    pub truncated: bool,
}

impl CandidateSet {
    pub fn truncated(n: usize) -> Self {
        CandidateSet {
            n,
            keys: Vec::new(),
            truncated: true,
        }
    }

    /// Search-space size S.
    pub fn space(&self) -> usize {
        self.keys.len()
    }

    pub fn log2_space(&self) -> Option<f64> {
        (!self.truncated && !self.keys.is_empty()).then(|| (self.keys.len() as f64).log2())
    }

    pub fn contains(&self, key: &BitKey) -> bool {
        key.len() == self.n
            && key
                .to_packed_msb()
                .is_some_and(|v| self.keys.binary_search(&v).is_ok())
    }

    pub fn bitstrings(&self) -> Vec<String> {
        self.keys
            .iter()
            .map(|&v| BitKey::from_packed_msb(v, self.n).to_string())
            .collect()
    }

    /// Summary record followed by one bit string per candidate.
    pub fn to_text(&self) -> String {
        let log2 = self
            .log2_space()
            .map_or_else(|| "none".to_string(), |l| format!("{l:.6}"));
        let mut s = format!(
            "# n={} space={} log2={} truncated={}\n",
            self.n,
            self.space(),
            log2,
            self.truncated as u8
        );
        for b in self.bitstrings() {
            writeln!(s, "{b}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        let field = |name: &str| -> Result<&str> {
            header
                .split_whitespace()
                .find_map(|f| f.strip_prefix(name)?.strip_prefix('='))
                .ok_or(Error::Parse {
                    line: 1,
                    msg: format!("summary record lacks {name}"),
                })
        };
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: msg.into(),
        };
        let n: usize = field("n")?.parse().map_err(|_| bad("bad n"))?;
        let truncated = field("truncated")? == "1";
        let mut keys = Vec::new();
        for (i, line) in lines.enumerate() {
            let key = BitKey::parse(line).map_err(|_| Error::Parse {
                line: i + 2,
                msg: "bad candidate".into(),
            })?;
            if key.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: key.len(),
                });
            }
            keys.push(key.to_packed_msb().ok_or(Error::KeyTooLong {
                n,
                max: MAX_SIEVE_BITS,
            })?);
        }
        Ok(CandidateSet { n, keys, truncated })
    }
}

/// Patterns of the pass-1 block starting at `block_start` that satisfy
/// every constraint and every known bit.
///
/// Constraints on canonical sub-blocks become a single masked compare on
/// the parity block; any other constraint is evaluated as a masked XOR.
/// All conditions are applied together in one sweep of the codebook.
/// `eve_bits` holds `(offset, bit)` pairs relative to the block.
pub fn filter_block(
    codebook: &BlockCodebook,
    block_start: usize,
    constraints: &[&ParityConstraint],
    eve_bits: &[(usize, u8)],
) -> Result<Vec<u32>> {
    let k = codebook.k;
    let (mut pmask, mut pval) = (0u32, 0u32);
    let mut extra: Vec<(u32, u32)> = Vec::new();
    for c in constraints {
        let offsets: Vec<usize> = c
            .bit_ids
            .iter()
            .map(|&id| {
                id.checked_sub(block_start)
                    .filter(|&o| o < k)
                    .ok_or_else(|| Error::InvalidConfig(format!("bit {id} lies outside the block")))
            })
            .collect::<Result<_>>()?;
        let contiguous = offsets.windows(2).all(|w| w[1] == w[0] + 1);
        let range = offsets[0]..offsets[offsets.len() - 1] + 1;
        match codebook.check_index(&range).filter(|_| contiguous) {
            Some(j) => {
                let bit = 1u32 << (k - 1 - j);
                let want = (c.parity as u32 & 1) << (k - 1 - j);
                if pmask & bit != 0 && pval & bit != want {
                    return Ok(Vec::new());
                }
                pmask |= bit;
                pval |= want;
            }
            None => extra.push((codebook::offset_mask(k, offsets), c.parity as u32 & 1)),
        }
    }
    let (mut kmask, mut kval) = (0u32, 0u32);
    for &(o, b) in eve_bits {
        if o >= k {
            return Err(Error::InvalidConfig(format!(
                "known offset {o} outside width {k}"
            )));
        }
        let bit = 1u32 << (k - 1 - o);
        if kmask & bit != 0 && (kval & bit != 0) != (b == 1) {
            return Ok(Vec::new());
        }
        kmask |= bit;
        if b == 1 {
            kval |= bit;
        }
    }
    Ok(codebook
        .blocks
        .iter()
        .zip(&codebook.parity_blocks)
        .filter(|&(&blk, &pb)| {
            pb & pmask == pval
                && blk & kmask == kval
                && extra.iter().all(|&(m, v)| (blk & m).count_ones() & 1 == v)
        })
        .map(|(&blk, _)| blk)
        .collect())
}

/// Cartesian product of per-block survivors, block 0 most significant.
pub fn combine(lists: &[Vec<u32>], widths: &[usize], max_candidates: u64) -> Result<CandidateSet> {
    let n: usize = widths.iter().sum();
    if n > MAX_SIEVE_BITS {
        return Err(Error::KeyTooLong {
            n,
            max: MAX_SIEVE_BITS,
        });
    }
    if lists.len() != widths.len() {
        return Err(Error::LengthMismatch {
            expected: widths.len(),
            actual: lists.len(),
        });
    }
    if lists.iter().any(Vec::is_empty) {
        return Ok(CandidateSet {
            n,
            keys: Vec::new(),
            truncated: false,
        });
    }
    let log2: f64 = lists.iter().map(|l| (l.len() as f64).log2()).sum();
    let product = lists
        .iter()
        .try_fold(1u64, |acc, l| acc.checked_mul(l.len() as u64));
    match product {
        Some(p) if p <= max_candidates => {}
        _ => {
            return Err(Error::SearchSpaceExceeded {
                log2,
                cap: max_candidates,
            })
        }
    }
    let mut keys = vec![0u64];
    for (list, &w) in lists.iter().zip(widths) {
        let mut next = Vec::with_capacity(keys.len() * list.len());
        for &prefix in &keys {
            next.extend(list.iter().map(|&v| (prefix << w) | v as u64));
        }
        keys = next;
    }
    Ok(CandidateSet {
        n,
        keys,
        truncated: false,
    })
}

/// Parity check over packed candidates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PackedCheck {
    mask: u64,
    parity: u32,
}

fn pack(n: usize, c: &ParityConstraint) -> PackedCheck {
    PackedCheck {
        mask: c.bit_ids.iter().fold(0u64, |m, &id| m | 1 << (n - 1 - id)),
        parity: c.parity as u32 & 1,
    }
}

pub(crate) fn run_chunked<R: Send>(workers: usize, job: impl FnOnce() -> R + Send) -> R {
    match workers {
        0 => job(),
        w => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("failed to start sieve worker pool")
            .install(job),
    }
}

fn filter_packed(
    candidates: &CandidateSet,
    checks: &[PackedCheck],
    chunk_size: usize,
    workers: usize,
) -> CandidateSet {
    let mut checks = checks.to_vec();
    checks.sort_unstable();
    checks.dedup();
    let keep = |&key: &u64| checks.iter().all(|c| (key & c.mask).count_ones() & 1 == c.parity);
    let chunk = chunk_size.max(1);
    let keys: Vec<u64> = if workers == 1 {
        candidates
            .keys
            .chunks(chunk)
            .flat_map(|c| c.iter().copied().filter(|k| keep(k)))
            .collect()
    } else {
        let parts: Vec<Vec<u64>> = run_chunked(workers, || {
            candidates
                .keys
                .par_chunks(chunk)
                .map(|c| c.iter().copied().filter(|k| keep(k)).collect())
                .collect()
        });
        parts.concat()
    };
    let mut out = CandidateSet {
        n: candidates.n,
        keys,
        truncated: candidates.truncated,
    };
    out.keys.sort_unstable();
    out.keys.dedup();
    out
}

/// Keeps the candidates that satisfy every constraint disclosed after pass 1.
/// Results are merged in chunk order and do not depend on `chunk_size` or
/// `workers` (0 selects every available core).
pub fn filter_candidates(
    candidates: &CandidateSet,
    transcript: &Transcript,
    chunk_size: usize,
    workers: usize,
) -> Result<CandidateSet> {
    if transcript.n != candidates.n {
        return Err(Error::LengthMismatch {
            expected: candidates.n,
            actual: transcript.n,
        });
    }
    let checks: Vec<PackedCheck> = transcript
        .constraints
        .iter()
        .filter(|c| c.pass_idx > 0)
        .map(|c| pack(candidates.n, c))
        .collect();
    Ok(filter_packed(candidates, &checks, chunk_size, workers))
}

/// `log2` of the search space by linear algebra: `n - rank` of the system
/// holding every disclosed parity plus one unit row per known bit.
pub fn oracle_search_space(transcript: &Transcript, eve_bits: &[(usize, u8)], n: usize) -> Result<usize> {
    let mut m = Gf2Matrix::new(n);
    for c in &transcript.constraints {
        m.push_columns(&c.bit_ids, c.parity);
    }
    for &(id, b) in eve_bits {
        m.push_columns(&[id], b);
    }
    Ok(n - gf2_rank(&m)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveOptions {
    pub max_candidates: u64,
    pub chunk_size: usize,
    pub workers: usize,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            max_candidates: 1 << 26,
            chunk_size: 4096,
            workers: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SieveReport {
    pub candidates: CandidateSet,
    /// Surviving candidates after each pass.
    pub space_per_pass: Vec<usize>,
}

/// Full passive phase on a transcript and the known `(id, bit)` pairs.
pub fn passive_attack(
    transcript: &Transcript,
    eve_bits: &[(usize, u8)],
    opts: &SieveOptions,
) -> Result<SieveReport> {
    let n = transcript.n;
    if n > MAX_SIEVE_BITS {
        return Err(Error::KeyTooLong {
            n,
            max: MAX_SIEVE_BITS,
        });
    }
    let k1 = transcript.schedule.k1();
    let starts: Vec<usize> = (0..n).step_by(k1).collect();
    let widths: Vec<usize> = starts.iter().map(|&s| k1.min(n - s)).collect();
    let full = build_codebook(k1)?;
    let remainder = match widths.last() {
        Some(&w) if w != k1 => Some(build_codebook(w)?),
        _ => None,
    };

    let pass1: Vec<&ParityConstraint> = transcript.constraints_in_pass(0).collect();
    let lists: Vec<Vec<u32>> = run_chunked(opts.workers, || {
        starts
            .par_iter()
            .zip(&widths)
            .enumerate()
            .map(|(b, (&start, &w))| {
                let cb = if w == k1 {
                    &full
                } else {
                    remainder.as_ref().unwrap()
                };
                let cons: Vec<&ParityConstraint> =
                    pass1.iter().copied().filter(|c| c.block_idx == b).collect();
                let known: Vec<(usize, u8)> = eve_bits
                    .iter()
                    .filter(|&&(id, _)| id >= start && id < start + w)
                    .map(|&(id, bit)| (id - start, bit))
                    .collect();
                filter_block(cb, start, &cons, &known)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut candidates = combine(&lists, &widths, opts.max_candidates)?;
    let mut space_per_pass = vec![candidates.space()];
    for pass in 1..transcript.schedule.passes() {
        let checks: Vec<PackedCheck> = transcript.constraints_in_pass(pass).map(|c| pack(n, c)).collect();
        candidates = filter_packed(&candidates, &checks, opts.chunk_size, opts.workers);
        space_per_pass.push(candidates.space());
    }
    Ok(SieveReport {
        candidates,
        space_per_pass,
    })
}
