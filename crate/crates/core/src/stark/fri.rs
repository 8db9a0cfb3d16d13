//! Factor-2 FRI over a multiplicative coset.
//!
//! Layer `t` lives on a coset of size `N >> t`; its leaves pair the values at
//! `x` and `-x`, i.e. positions `k` and `k + n/2`, so one opening serves one fold.

use rayon::prelude::*;

use crate::commit::{MerkleTree, Transcript};
use crate::field::{batch_inverse, intt, EvaluationDomain, FieldElement as F};

use super::StarkError;

pub(crate) struct FriCommitment {
    pub trees: Vec<MerkleTree>,
    pub final_coeffs: Vec<F>,
}

/// One fold: `(f(x) + f(-x))/2 + gamma (f(x) - f(-x))/(2x)`, given `1/(2x)`.
pub(crate) fn fold_pair(lo: F, hi: F, gamma: F, inv_two_x: F, inv_two: F) -> F {
    (lo + hi) * inv_two + gamma * (lo - hi) * inv_two_x
}

pub(crate) fn inv_two() -> F {
    F::TWO.inverse().expect("2 is invertible")
}

fn layer_leaves(evals: &[F]) -> Vec<u8> {
    let half = evals.len() / 2;
    let mut data = Vec::with_capacity(evals.len() * 8);
    for k in 0..half {
        data.extend_from_slice(&evals[k].to_le_bytes());
        data.extend_from_slice(&evals[k + half].to_le_bytes());
    }
    data
}

pub(crate) fn commit(
    mut evals: Vec<F>,
    mut domain: EvaluationDomain,
    folds: usize,
    final_degree: usize,
    transcript: &mut Transcript,
) -> Result<FriCommitment, StarkError> {
    let half_inv = inv_two();
    let mut trees = Vec::with_capacity(folds);
    for _ in 0..folds {
        let tree = MerkleTree::from_chunks(layer_leaves(&evals), 16)?;
        transcript.absorb(b"fri-layer", tree.root().as_bytes());
        trees.push(tree);
        let gamma = transcript.challenge_field();

        let half = evals.len() / 2;
        let two_x: Vec<F> = domain.elements()[..half].iter().map(|x| *x * F::TWO).collect();
        let inv = batch_inverse(&two_x)?;
        evals = (0..half)
            .into_par_iter()
            .map(|k| fold_pair(evals[k], evals[k + half], gamma, inv[k], half_inv))
            .collect();
        domain = EvaluationDomain::coset(half, domain.shift().square())?;
    }
    let mut final_coeffs = intt(&evals, &domain)?;
    debug_assert!(final_coeffs[final_degree.min(final_coeffs.len())..].iter().all(|c| c.is_zero()));
    final_coeffs.truncate(final_degree);
    transcript.absorb_field(b"fri-final", &final_coeffs);
    Ok(FriCommitment { trees, final_coeffs })
}

/// Position of an LDE index within layer `t` and the leaf pairing it.
pub(crate) fn layer_position(index: usize, lde_size: usize, layer: usize) -> (usize, usize) {
    let n = lde_size >> layer;
    let pos = index % n;
    (pos, pos % (n / 2))
}
