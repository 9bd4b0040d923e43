use std::fmt;

use crate::error::{Error, Result};

/// Fixed-length bit sequence; every position also carries the identifier of
/// the bit it held before any permutation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitKey {
    words: Vec<u64>,
    len: usize,
    ids: Vec<usize>,
}

impl BitKey {
    pub fn zeros(len: usize) -> Self {
        BitKey {
            words: vec![0; len.div_ceil(64)],
            len,
            ids: (0..len).collect(),
        }
    }

    /// Builds a key from 0/1 values with identifiers `0..len`.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut key = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            key.set(i, b);
        }
        key
    }

    pub fn with_ids(bits: &[u8], ids: Vec<usize>) -> Result<Self> {
        if ids.len() != bits.len() {
            return Err(Error::LengthMismatch {
                expected: bits.len(),
                actual: ids.len(),
            });
        }
        let mut key = Self::from_bits(bits);
        key.ids = ids;
        Ok(key)
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse {
                    line: 0,
                    msg: format!("unexpected character {other:?} in bit string"),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self::from_bits(&bits))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, pos: usize) -> u8 {
        debug_assert!(pos < self.len);
        ((self.words[pos / 64] >> (pos % 64)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, pos: usize, bit: u8) {
        debug_assert!(pos < self.len);
        let mask = 1u64 << (pos % 64);
        if bit & 1 == 1 {
            self.words[pos / 64] |= mask;
        } else {
            self.words[pos / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, pos: usize) {
        self.words[pos / 64] ^= 1u64 << (pos % 64);
    }

    #[inline]
    pub fn id(&self, pos: usize) -> usize {
        self.ids[pos]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Packed storage, bit `i` of the sequence in word `i / 64`, bit `i % 64`.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn parity(&self) -> u8 {
        super::parity_words(&self.words)
    }

    /// XOR of the bits at the given positions.
    pub fn parity_at(&self, positions: &[usize]) -> u8 {
        positions.iter().fold(0, |acc, &p| acc ^ self.get(p))
    }

    pub fn hamming(&self, other: &BitKey) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Positions at which the two keys differ.
    pub fn diff_positions(&self, other: &BitKey) -> Vec<usize> {
        (0..self.len.min(other.len))
            .filter(|&i| self.get(i) != other.get(i))
            .collect()
    }

    /// Key as an integer with position 0 in the most significant place, so
    /// integer order equals lexicographic bit-string order.
    pub fn to_packed_msb(&self) -> Option<u64> {
        if self.len > 64 {
            return None;
        }
        Some((0..self.len).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64))
    }

    pub fn from_packed_msb(value: u64, len: usize) -> Self {
        let bits: Vec<u8> = (0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect();
        Self::from_bits(&bits)
    }
}

impl fmt::Display for BitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}
