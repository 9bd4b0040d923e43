use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BlockSchedule;
use crate::bitcore::Permutation;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Parity of a whole top block.
    Top,
    /// Left-half parity inside Binary on a mismatched top block.
    Binary,
    /// Left-half parity inside Binary started by look-back.
    Lookback,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Top => "top",
            Origin::Binary => "binary",
            Origin::Lookback => "lookback",
        }
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "top" => Ok(Origin::Top),
            "binary" => Ok(Origin::Binary),
            "lookback" => Ok(Origin::Lookback),
            other => Err(Error::Parse {
                line: 0,
                msg: format!("unknown constraint origin {other:?}"),
            }),
        }
    }
}

/// One parity Alice disclosed: `XOR(key[bit_ids]) == parity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityConstraint {
    pub pass_idx: usize,
    pub block_idx: usize,
    /// Ascending, distinct.
    pub bit_ids: Vec<usize>,
    pub parity: u8,
    pub origin: Origin,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub n: usize,
    pub schedule: BlockSchedule,
    pub permutations: Vec<Permutation>,
    pub constraints: Vec<ParityConstraint>,
    /// Final bit (in protocol order) of every compared block or sub-block.
    pub parity_bit_ids: BTreeSet<usize>,
    /// Binary corrections made inside blocks of each pass, look-back included.
    pub corrections_per_pass: Vec<usize>,
    pub residual_errors: usize,
}

impl Transcript {
    pub fn new(n: usize, schedule: BlockSchedule, permutations: Vec<Permutation>) -> Self {
        let passes = schedule.passes();
        Transcript {
            n,
            schedule,
            permutations,
            constraints: Vec::new(),
            parity_bit_ids: BTreeSet::new(),
            corrections_per_pass: vec![0; passes],
            residual_errors: 0,
        }
    }

    /// Number of disclosed parity bits.
    pub fn leaked_count(&self) -> usize {
        self.constraints.len()
    }

    pub(crate) fn disclose(
        &mut self,
        pass: usize,
        block: usize,
        origin: Origin,
        positions: &[usize],
        parity: u8,
    ) {
        if let Some(&last) = positions.last() {
            self.parity_bit_ids.insert(last);
        }
        let mut bit_ids = positions.to_vec();
        bit_ids.sort_unstable();
        self.constraints.push(ParityConstraint {
            pass_idx: pass,
            block_idx: block,
            bit_ids,
            parity,
            origin,
        });
    }

    pub fn constraints_in_pass(&self, pass: usize) -> impl Iterator<Item = &ParityConstraint> {
        self.constraints.iter().filter(move |c| c.pass_idx == pass)
    }

    /// Line-oriented, tab-separated text form. See the repository README for
    /// the record layout.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let join =
            |v: &mut dyn Iterator<Item = usize>| v.map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        s.push_str("#paritylab-transcript\t1\n");
        writeln!(s, "n\t{}", self.n).unwrap();
        writeln!(s, "schedule\t{}", join(&mut self.schedule.sizes.iter().copied())).unwrap();
        if let Some(k1) = self.schedule.k1_override {
            writeln!(s, "k1_override\t{k1}").unwrap();
        }
        for (i, p) in self.permutations.iter().enumerate() {
            writeln!(s, "perm\t{i}\t{}", join(&mut p.order().iter().copied())).unwrap();
        }
        for c in &self.constraints {
            writeln!(
                s,
                "c\t{}\t{}\t{}\t{}\t{}",
                c.pass_idx,
                c.block_idx,
                c.origin.as_str(),
                c.parity,
                join(&mut c.bit_ids.iter().copied())
            )
            .unwrap();
        }
        writeln!(
            s,
            "corrections\t{}",
            join(&mut self.corrections_per_pass.iter().copied())
        )
        .unwrap();
        writeln!(
            s,
            "parity_bits\t{}",
            join(&mut self.parity_bit_ids.iter().copied())
        )
        .unwrap();
        writeln!(s, "residual\t{}", self.residual_errors).unwrap();
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "#paritylab-transcript\t1")) => {}
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    msg: "missing transcript header".into(),
                })
            }
        }
        let mut n = None;
        let mut sizes = Vec::new();
        let mut k1_override = None;
        let mut permutations = Vec::new();
        let mut constraints = Vec::new();
        let mut corrections = Vec::new();
        let mut parity_bit_ids = BTreeSet::new();
        let mut residual = 0;

        for (i, line) in lines {
            let lineno = i + 1;
            let err = |msg: &str| Error::Parse {
                line: lineno,
                msg: msg.to_string(),
            };
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("bad integer {s:?}")));
            let list = |s: &str| -> Result<Vec<usize>> {
                if s.is_empty() {
                    return Ok(Vec::new());
                }
                s.split(',').map(num).collect()
            };
            match (fields[0], fields.len()) {
                ("n", 2) => n = Some(num(fields[1])?),
                ("schedule", 2) => sizes = list(fields[1])?,
                ("k1_override", 2) => k1_override = Some(num(fields[1])?),
                ("perm", 3) => {
                    if num(fields[1])? != permutations.len() {
                        return Err(err("permutations out of order"));
                    }
                    permutations.push(Permutation::new(list(fields[2])?)?);
                }
                ("c", 6) => {
                    let parity = num(fields[4])?;
                    if parity > 1 {
                        return Err(err("parity must be 0 or 1"));
                    }
                    let bit_ids = list(fields[5])?;
                    if bit_ids.is_empty() || bit_ids.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(err("bit ids must be non-empty and strictly ascending"));
                    }
                    constraints.push(ParityConstraint {
                        pass_idx: num(fields[1])?,
                        block_idx: num(fields[2])?,
                        origin: fields[3].parse().map_err(|_| err("unknown origin"))?,
                        parity: parity as u8,
                        bit_ids,
                    });
                }
                ("corrections", 2) => corrections = list(fields[1])?,
                ("parity_bits", 2) => parity_bit_ids = list(fields[1])?.into_iter().collect(),
                ("residual", 2) => residual = num(fields[1])?,
                _ => return Err(err(&format!("unrecognised record {:?}", fields[0]))),
            }
        }
        let n = n.ok_or(Error::Parse {
            line: 0,
            msg: "missing n record".into(),
        })?;
        if sizes.is_empty() || sizes.len() != permutations.len() {
            return Err(Error::ScheduleMismatch {
                passes: sizes.len(),
                permutations: permutations.len(),
            });
        }
        if permutations.iter().any(|p| p.len() != n)
            || constraints
                .iter()
                .any(|c| c.bit_ids.iter().any(|&b| b >= n) || c.pass_idx >= sizes.len())
        {
            return Err(Error::Parse {
                line: 0,
                msg: "record references a bit or pass outside the key".into(),
            });
        }
        if corrections.is_empty() {
            corrections = vec![0; sizes.len()];
        }
        Ok(Transcript {
            n,
            schedule: BlockSchedule { sizes, k1_override },
            permutations,
            constraints,
            parity_bit_ids,
            corrections_per_pass: corrections,
            residual_errors: residual,
        })
    }
}
