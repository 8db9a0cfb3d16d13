//! Zone-membership checks from precomputed spatial lookup tables, with a
//! STARK prover and verifier over a fixed per-row AIR.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: exact containment, signed distance and clipping.
//! * [`discretize`]: center-point, voting and signed-distance tables over an
//!   `r x r` grid, plus proof-free classification and accuracy evaluation.
//! * [`field`]: Goldilocks arithmetic, NTT and fixed-point encoding.
//! * [`commit`]: SHA-256 Merkle trees and the Fiat–Shamir transcript.
//! * [`stark`]: trace construction, constraint system, prover and verifier.
//! * [`harness`]: GeoJSON ingestion, synthetic corpus, sweeps and reports.

pub mod commit;
pub mod discretize;
pub mod field;
pub mod geometry;
pub mod harness;
pub mod stark;

pub use discretize::{GridSpec, StrategyKind, TableBundle};
pub use field::FieldElement;
pub use geometry::{BoundingBox, Category, Point2D, ZonePolygon, ZoneSet};
pub use stark::{AirConfig, StarkProof};
