use std::ops::Range;

use crate::error::{Error, Result};

/// Widest block for which a full codebook may be built (2^20 entries).
pub const MAX_CODEBOOK_WIDTH: usize = 20;

/// Every width-`k` block paired with its parity block.
///
/// The `k` canonical checks are the parities Binary can reveal on a block:
/// the whole block plus, recursively, the left half of every sub-block
/// (left gets the extra bit on odd lengths). Each check is identified by its
/// final offset, and parity-block bit `j` holds the parity of the check
/// ending at offset `j`. Blocks and parity blocks are stored with offset 0
/// as the most significant of the `k` bits.
#[derive(Clone, Debug)]
pub struct BlockCodebook {
    pub k: usize,
    pub blocks: Vec<u32>,
    pub parity_blocks: Vec<u32>,
    checks: Vec<Range<usize>>,
}

fn collect_checks(range: Range<usize>, out: &mut Vec<Range<usize>>) {
    let len = range.len();
    if len <= 1 {
        return;
    }
    let mid = range.start + len.div_ceil(2);
    out.push(range.start..mid);
    collect_checks(range.start..mid, out);
    collect_checks(mid..range.end, out);
}

/// Canonical checks of a width-`k` block, ordered by final offset.
pub fn canonical_checks(k: usize) -> Vec<Range<usize>> {
    let mut checks = Vec::with_capacity(k);
    checks.push(0..k);
    collect_checks(0..k, &mut checks);
    checks.sort_by_key(|r| r.end);
    checks
}

/// Mask over a width-`k` block (offset 0 most significant).
#[inline]
pub(crate) fn offset_mask(k: usize, offsets: impl IntoIterator<Item = usize>) -> u32 {
    offsets.into_iter().fold(0u32, |m, o| m | 1 << (k - 1 - o))
}

pub fn build_codebook(k: usize) -> Result<BlockCodebook> {
    if k == 0 || k > MAX_CODEBOOK_WIDTH {
        return Err(Error::WidthTooLarge {
            width: k,
            max: MAX_CODEBOOK_WIDTH,
        });
    }
    let checks = canonical_checks(k);
    debug_assert_eq!(checks.len(), k);
    let masks: Vec<u32> = checks.iter().map(|r| offset_mask(k, r.clone())).collect();
    let blocks: Vec<u32> = (0..1u32 << k).collect();
    let parity_blocks = blocks
        .iter()
        .map(|&b| {
            masks
                .iter()
                .enumerate()
                .fold(0u32, |pb, (j, &m)| pb | ((b & m).count_ones() & 1) << (k - 1 - j))
        })
        .collect();
    Ok(BlockCodebook {
        k,
        blocks,
        parity_blocks,
        checks,
    })
}

impl BlockCodebook {
    pub fn checks(&self) -> &[Range<usize>] {
        &self.checks
    }

    /// Parity-block index of the canonical check covering `range`, if any.
    pub fn check_index(&self, range: &Range<usize>) -> Option<usize> {
        let j = range.end.checked_sub(1)?;
        (self.checks.get(j)? == range).then_some(j)
    }

    /// Renders pattern `v` as `[b0 b1 ...]`.
    pub fn format(&self, v: u32) -> String {
        let bits: Vec<String> = (0..self.k)
            .map(|o| ((v >> (self.k - 1 - o)) & 1).to_string())
            .collect();
        format!("[{}]", bits.join(" "))
    }
}
