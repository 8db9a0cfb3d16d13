//! Randomized tampering of honest proofs.

use std::collections::BTreeMap;
use std::fmt;

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

use crate::commit::MerkleTree;
use crate::discretize::{build_table, GridSpec, StrategyKind};
use crate::field::{FieldElement, MODULUS};
use crate::geometry::ZoneSet;
use crate::stark::{build_trace, prove, verify, AirConfig, StarkProof, ZoneQuery};

use super::sample::QuerySample;
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MutationClass {
    /// Flip one claimed output bit.
    OutputFlip,
    /// Replace one table opening with a genuine opening of another leaf.
    PayloadSwap,
    /// Change one value in an opened trace row.
    TraceCellPerturbation,
    /// Change one value in an opened FRI layer pair.
    FriLayerTamper,
    /// Change one out-of-domain evaluation.
    OodValueTamper,
}

impl MutationClass {
    pub const ALL: [MutationClass; 5] = [
        MutationClass::OutputFlip,
        MutationClass::PayloadSwap,
        MutationClass::TraceCellPerturbation,
        MutationClass::FriLayerTamper,
        MutationClass::OodValueTamper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MutationClass::OutputFlip => "output-flip",
            MutationClass::PayloadSwap => "payload-swap",
            MutationClass::TraceCellPerturbation => "trace-cell",
            MutationClass::FriLayerTamper => "fri-layer",
            MutationClass::OodValueTamper => "ood-value",
        }
    }
}

impl fmt::Display for MutationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn nonzero(rng: &mut Pcg64) -> FieldElement {
    FieldElement::new(rng.random_range(1..MODULUS))
}

/// Adds a random nonzero offset to the field element stored at `slot`.
fn bump_value(payload: &mut [u8], slot: usize, rng: &mut Pcg64) {
    let bytes: [u8; 8] = payload[slot * 8..slot * 8 + 8].try_into().expect("8 bytes");
    let v = FieldElement::from_le_bytes(bytes).unwrap_or(FieldElement::ZERO) + nonzero(rng);
    payload[slot * 8..slot * 8 + 8].copy_from_slice(&v.to_le_bytes());
}

/// Applies one random mutation of the given class. `table` is the tree the
/// proof's lookups were opened from.
pub fn mutate(proof: &StarkProof, class: MutationClass, table: &MerkleTree, rng: &mut Pcg64) -> StarkProof {
    let mut bad = proof.clone();
    match class {
        MutationClass::OutputFlip => {
            let k = rng.random_range(0..bad.statement.rows.len());
            bad.statement.rows[k].out ^= true;
        }
        MutationClass::PayloadSwap => {
            let k = rng.random_range(0..bad.statement.rows.len());
            let row = &mut bad.statement.rows[k];
            let slot = rng.random_range(0..row.openings.len());
            let current = row.openings[slot].leaf_index;
            let mut other = rng.random_range(0..table.len());
            while other == current {
                other = rng.random_range(0..table.len());
            }
            row.openings[slot] = table.open(other).expect("index in range");
        }
        MutationClass::TraceCellPerturbation => {
            let q = rng.random_range(0..bad.queries.len());
            let payload = &mut bad.queries[q].trace.payload;
            let slot = rng.random_range(0..payload.len() / 8);
            bump_value(payload, slot, rng);
        }
        MutationClass::FriLayerTamper => {
            let q = rng.random_range(0..bad.queries.len());
            let layers = &mut bad.queries[q].layers;
            if layers.is_empty() {
                let c = rng.random_range(0..bad.fri_final.len().max(1));
                match bad.fri_final.get_mut(c) {
                    Some(v) => *v += nonzero(rng),
                    None => bad.fri_final.push(nonzero(rng)),
                }
            } else {
                let t = rng.random_range(0..layers.len());
                bump_value(&mut layers[t].payload, rng.random_range(0..2), rng);
            }
        }
        MutationClass::OodValueTamper => {
            let c = rng.random_range(0..=bad.ood_trace.len());
            let delta = nonzero(rng);
            match bad.ood_trace.get_mut(c) {
                Some(v) => *v += delta,
                None => bad.ood_composition += delta,
            }
        }
    }
    bad
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmokeResult {
    pub class: MutationClass,
    pub trials: usize,
    pub rejected: usize,
    /// Rejection code counts.
    pub reasons: BTreeMap<String, usize>,
}

/// For each trial, proves a fresh random batch (strategies in rotation) and
/// checks that every mutation class is rejected.
pub fn run_soundness_smoke(
    zones: &ZoneSet,
    r: u32,
    batch: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<SmokeResult>, HarnessError> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let strategies = StrategyKind::all();
    let mut bundles = Vec::new();
    for s in strategies {
        let bundle = build_table(zones, &GridSpec::new(zones.bbox(), r)?, s)?;
        let tree = bundle.table.commit_tree()?;
        bundles.push((bundle, tree));
    }
    let mut results: Vec<SmokeResult> = MutationClass::ALL
        .iter()
        .map(|&class| SmokeResult {
            class,
            trials: 0,
            rejected: 0,
            reasons: BTreeMap::new(),
        })
        .collect();
    for trial in 0..trials {
        let (bundle, tree) = &bundles[trial % bundles.len()];
        let sample = QuerySample::draw(&zones.bbox(), batch, rng.random());
        let queries: Vec<ZoneQuery> = sample
            .points
            .iter()
            .map(|p| ZoneQuery::new(*p, rng.random_range(0..zones.len())))
            .collect();
        let cfg = AirConfig::new(bundle.strategy, r, batch);
        let (trace, statement) = build_trace(&queries, bundle, &cfg)?;
        let proof = prove(&trace, &statement, &cfg)?;
        verify(&proof).map_err(|reason| HarnessError::Rejected {
            strategy: bundle.strategy.name().into(),
            r,
            reason,
        })?;
        for res in results.iter_mut() {
            let bad = mutate(&proof, res.class, tree, &mut rng);
            res.trials += 1;
            if let Err(reason) = verify(&bad) {
                res.rejected += 1;
                *res.reasons.entry(reason.code().to_string()).or_insert(0) += 1;
            }
        }
    }
    Ok(results)
}
