//! A fixed AIR proving that published membership outputs agree with a
//! committed lookup table, together with its prover and verifier.
//!
//! The same column layout serves every strategy; only the payload columns
//! differ between boolean tables (one bit per cell) and distance-aware tables
//! (four vertex distances plus the bilinear interpolation gadget).

mod air;
mod fri;
mod proof;
mod prover;
mod trace;
mod verifier;


pub use air::{Air, MAG_BITS, PAYLOAD_BOUND, PUB_I, PUB_J, PUB_OUT, PUB_PAYLOAD, REM_BITS, TRACE_ONE, TRACE_SCALE_BITS};
pub use proof::{decode_proof, encode_proof, read_proof, write_proof, QueryOpening, StarkProof, PROOF_MAGIC, PROOF_VERSION};
pub use prover::prove;
pub use trace::{build_trace, trace_payload, PublicRow, PublicStatement, TraceTable, ZoneQuery};
pub use verifier::{verify, verify_with_stats, Rejection, VerifyStats};

use thiserror::Error;

use crate::commit::MerkleError;
use crate::discretize::{StrategyKind, TableError};
use crate::field::{FieldElement, FieldError};

pub const DEFAULT_BLOWUP: usize = 8;
pub const DEFAULT_QUERY_COUNT: usize = 32;
pub const DEFAULT_FINAL_DEGREE: usize = 8;
/// Smallest trace length; keeps the LDE domain larger than the query count.
pub const MIN_ROWS: usize = 8;
/// Upper bound on trace length accepted from untrusted proofs.
pub const MAX_ROWS: usize = 1 << 20;

/// Shift of the low-degree-extension coset.
pub(crate) const LDE_SHIFT: FieldElement = crate::field::MULTIPLICATIVE_GENERATOR;
pub(crate) const PROTOCOL_LABEL: &[u8] = b"geostark-membership-v1";

#[derive(Debug, Error)]
pub enum StarkError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{count} queries exceed {rows} trace rows")]
    TooManyQueries { count: usize, rows: usize },
    #[error("at least one query is required")]
    NoQueries,
    #[error("trace violates constraint {constraint} on row {row}")]
    Unsatisfied { row: usize, constraint: String },
    #[error("trace shape does not match the configuration: {0}")]
    Shape(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Merkle(#[from] MerkleError),
    #[error("malformed proof file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parameters of one AIR instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AirConfig {
    pub strategy: StrategyKind,
    pub r: u32,
    pub rows: usize,
    pub blowup: usize,
    pub fri_query_count: usize,
    pub trace_scale_bits: u32,
    pub fri_final_degree: usize,
}

impl AirConfig {
    /// Default parameters with the smallest trace that holds `query_count` rows.
    pub fn new(strategy: StrategyKind, r: u32, query_count: usize) -> Self {
        Self {
            strategy: strategy.quantized(),
            r,
            rows: query_count.max(1).next_power_of_two().max(MIN_ROWS),
            blowup: DEFAULT_BLOWUP,
            fri_query_count: DEFAULT_QUERY_COUNT,
            trace_scale_bits: TRACE_SCALE_BITS,
            fri_final_degree: DEFAULT_FINAL_DEGREE,
        }
    }

    pub fn validate(&self) -> Result<(), StarkError> {
        let bad = |msg: String| Err(StarkError::Config(msg));
        if self.r < 2 || !self.r.is_power_of_two() {
            return bad(format!("resolution {} is not a power of two >= 2", self.r));
        }
        if !self.rows.is_power_of_two() || self.rows < MIN_ROWS || self.rows > MAX_ROWS {
            return bad(format!("rows {} must be a power of two in [{MIN_ROWS}, {MAX_ROWS}]", self.rows));
        }
        if !self.blowup.is_power_of_two() || self.blowup < 2 {
            return bad(format!("blowup {} must be a power of two >= 2", self.blowup));
        }
        if (self.rows as u64) * (self.blowup as u64) > 1u64 << 32 {
            return bad("rows * blowup exceeds 2^32".into());
        }
        if self.trace_scale_bits != TRACE_SCALE_BITS {
            return bad(format!("trace scale must be 2^{TRACE_SCALE_BITS}"));
        }
        if !self.fri_final_degree.is_power_of_two() {
            return bad(format!("final degree {} must be a power of two", self.fri_final_degree));
        }
        if self.fri_query_count == 0 || self.fri_query_count > self.lde_size() {
            return bad(format!("query count {} out of range", self.fri_query_count));
        }
        if let StrategyKind::Voting { tau } = self.strategy {
            if !(tau > 0.0 && tau <= 1.0) {
                return bad(format!("voting threshold {tau} out of range"));
            }
        }
        Ok(())
    }

    pub fn lde_size(&self) -> usize {
        self.rows * self.blowup
    }

    /// Number of factor-2 FRI folds down to the final polynomial.
    pub fn fri_folds(&self) -> usize {
        if self.rows > self.fri_final_degree {
            (self.rows / self.fri_final_degree).trailing_zeros() as usize
        } else {
            0
        }
    }

    pub fn air(&self) -> Air {
        Air::new(self)
    }
}

/// A constraint's description and algebraic degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintInfo {
    pub name: String,
    pub degree: usize,
}

/// The constraint list of the AIR in evaluation order.
pub fn constraint_set(cfg: &AirConfig) -> Vec<ConstraintInfo> {
    let air = cfg.air();
    air.constraint_names()
        .into_iter()
        .zip(air.constraint_degrees())
        .map(|(name, degree)| ConstraintInfo { name, degree })
        .collect()
}

/// Depth of a Merkle tree over `leaves` leaves.
pub(crate) fn tree_depth(leaves: usize) -> usize {
    leaves.max(2).next_power_of_two().trailing_zeros() as usize
}
