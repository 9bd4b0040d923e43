use crate::error::{Error, Result};

use super::{BitKey, SimRng};

/// Gather-form permutation: position `j` of the permuted key holds the
/// element at original index `order[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!(
                    "index {i} is out of range or repeated"
                )));
            }
        }
        Ok(Permutation { order })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(j, &i)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.order.len()];
        for (j, &i) in self.order.iter().enumerate() {
            inv[i] = j;
        }
        Permutation { order: inv }
    }
}

pub fn apply_permutation(key: &BitKey, perm: &Permutation) -> Result<BitKey> {
    if perm.len() != key.len() {
        return Err(Error::LengthMismatch {
            expected: key.len(),
            actual: perm.len(),
        });
    }
    let bits: Vec<u8> = perm.order.iter().map(|&i| key.get(i)).collect();
    let ids: Vec<usize> = perm.order.iter().map(|&i| key.id(i)).collect();
    BitKey::with_ids(&bits, ids)
}

/// Fisher-Yates shuffle of `0..n` driven by `SimRng::new(seed)`: for `i`
/// from `n-1` down to 1, swap `i` with `below(i + 1)`.
pub fn seeded_permutation(n: usize, seed: u64) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SimRng::new(seed);
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        order.swap(i, j);
    }
    Permutation { order }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SECOND_PASS_ORDER: [usize; 16] = [15, 1, 5, 13, 8, 11, 0, 2, 7, 6, 4, 9, 14, 12, 10, 3];

    #[test]
    fn identity_leaves_key_unchanged() {
        let key = BitKey::parse("1111000011110000").unwrap();
        let out = apply_permutation(&key, &Permutation::identity(16)).unwrap();
        assert_eq!(out, key);
    }

    #[test]
    fn explicit_permutation_gathers_ids() {
        let key = BitKey::parse("1111000011110000").unwrap();
        let perm = Permutation::new(SECOND_PASS_ORDER.to_vec()).unwrap();
        let out = apply_permutation(&key, &perm).unwrap();
        assert_eq!(out.ids(), &SECOND_PASS_ORDER);
        for (j, &i) in SECOND_PASS_ORDER.iter().enumerate() {
            assert_eq!(out.get(j), key.get(i));
        }
        let back = apply_permutation(&out, &perm.inverse()).unwrap();
        assert_eq!(back, key);
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        let key = BitKey::zeros(3);
        assert!(apply_permutation(&key, &Permutation::identity(4)).is_err());
    }

    #[test]
    fn seeded_permutation_is_deterministic() {
        assert_eq!(seeded_permutation(1, 99).order(), &[0]);
        assert_eq!(seeded_permutation(16, 5), seeded_permutation(16, 5));
        let differing = (0..100u64)
            .filter(|&s| seeded_permutation(16, s) != seeded_permutation(16, s + 1000))
            .count();
        assert_eq!(differing, 100);
    }

    proptest! {
        #[test]
        fn permutation_preserves_id_bit_pairs(bits in prop::collection::vec(0u8..2, 1..80), seed: u64) {
            let key = BitKey::from_bits(&bits);
            let perm = seeded_permutation(bits.len(), seed);
            let out = apply_permutation(&key, &perm).unwrap();
            let mut before: Vec<(usize, u8)> = (0..key.len()).map(|i| (key.id(i), key.get(i))).collect();
            let mut after: Vec<(usize, u8)> = (0..out.len()).map(|i| (out.id(i), out.get(i))).collect();
            before.sort();
            after.sort();
            prop_assert_eq!(before, after);
            prop_assert_eq!(apply_permutation(&out, &perm.inverse()).unwrap(), key);
        }
    }
}
