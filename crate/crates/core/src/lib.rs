//! Seed-driven simulation of partial intercept-resend eavesdropping on BB84
//! followed by Cascade reconciliation, together with the parity-leakage
//! keyspace sieve an eavesdropper runs on the reconciliation transcript.

pub mod bb84;
pub mod bitcore;
pub mod cascade;
pub mod error;
pub mod harness;
pub mod intercept;
pub mod leakage;
pub mod sieve;

pub use bb84::{Basis, ExchangeRecord, QberEstimate, SessionConfig, SiftedKeys};
pub use bitcore::{BitKey, Gf2Matrix, Permutation, SimRng};
pub use cascade::{BlockSchedule, Origin, ParityConstraint, Transcript};
pub use error::{Error, Result};
pub use intercept::{EveKnowledge, InterceptPlan};
pub use sieve::CandidateSet;
