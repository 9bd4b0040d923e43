//! Bit sequences with stable identifiers, seeded randomness, permutations
//! and GF(2) linear algebra.

mod gf2;
mod key;
mod perm;
mod rng;

pub use gf2::{gf2_rank, Gf2Matrix};
pub use key::BitKey;
pub use perm::{apply_permutation, seeded_permutation, Permutation};
pub use rng::{derive_seed, splitmix64, SimRng};

/// XOR of all bits; 0 for an empty sequence.
pub fn parity(bits: &[u8]) -> u8 {
    bits.iter().fold(0, |acc, &b| acc ^ (b & 1))
}

/// Parity of a packed word sequence.
#[inline]
pub fn parity_words(words: &[u64]) -> u8 {
    (words.iter().map(|w| w.count_ones()).sum::<u32>() & 1) as u8
}
