//! SHA-256 Merkle commitments and the Fiat–Shamir transcript.

mod merkle;
mod transcript;

pub use merkle::{merkle_build, merkle_open, merkle_verify, Digest, MerkleError, MerklePath, MerkleTree};
pub use transcript::{ChallengeMode, Transcript};
