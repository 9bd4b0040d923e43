use crate::error::{Error, Result};

/// Dense GF(2) system: one packed row per constraint plus its right-hand side.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Gf2Matrix {
    width: usize,
    rows: Vec<Vec<u64>>,
    rhs: Vec<u8>,
}

impl Gf2Matrix {
    pub fn new(width: usize) -> Self {
        Gf2Matrix {
            width,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// Appends the row with ones at `columns`.
    pub fn push_columns(&mut self, columns: &[usize], rhs: u8) {
        let mut row = vec![0u64; self.width.div_ceil(64)];
        for &c in columns {
            assert!(c < self.width, "column {c} outside width {}", self.width);
            row[c / 64] ^= 1u64 << (c % 64);
        }
        self.rows.push(row);
        self.rhs.push(rhs & 1);
    }

    /// Appends a row given as 0/1 entries.
    pub fn push_dense(&mut self, entries: &[u8], rhs: u8) {
        let cols: Vec<usize> = entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e & 1 == 1)
            .map(|(i, _)| i)
            .collect();
        self.push_columns(&cols, rhs);
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        ((self.rows[row][col / 64] >> (col % 64)) & 1) as u8
    }
}

/// Rank over GF(2) by Gaussian elimination.
///
/// Fails with `InconsistentSystem` when some row combination reduces to
/// `0 = 1`.
pub fn gf2_rank(m: &Gf2Matrix) -> Result<usize> {
    let words = m.width.div_ceil(64);
    let mut rows: Vec<(Vec<u64>, u8)> = m.rows.iter().cloned().zip(m.rhs.iter().copied()).collect();
    let mut rank = 0;
    for col in 0..m.width {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].0[w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let (prow, prhs) = &head[rank];
        for (row, rhs) in tail.iter_mut() {
            if row[w] & bit != 0 {
                for k in w..words {
                    row[k] ^= prow[k];
                }
                *rhs ^= prhs;
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|(_, rhs)| *rhs == 1) {
        return Err(Error::InconsistentSystem);
    }
    Ok(rank)
}
