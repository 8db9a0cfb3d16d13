use thiserror::Error;

use crate::commit::{MerklePath, Transcript};
use crate::field::{batch_inverse, horner, EvaluationDomain, FieldElement as F};

use super::air::{PUB_OUT, PUB_PAYLOAD};
use super::proof::{statement_bytes, StarkProof};
use super::prover::draw_ood_point;
use super::trace::{expected_leaves, trace_payload, PublicStatement};
use super::{fri, Air, AirConfig, LDE_SHIFT, PROTOCOL_LABEL};

/// Why a proof was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Rejection {
    #[error("BAD_LOOKUP_PATH: {0}")]
    BadLookupPath(String),
    #[error("OOD_MISMATCH: {0}")]
    OodMismatch(String),
    #[error("FRI_FOLD_MISMATCH: {0}")]
    FriFoldMismatch(String),
    #[error("DEGREE_EXCEEDED: {0}")]
    DegreeExceeded(String),
    #[error("BAD_TRACE_OPENING: {0}")]
    BadTraceOpening(String),
    #[error("MALFORMED: {0}")]
    Malformed(String),
}

impl Rejection {
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::BadLookupPath(_) => "BAD_LOOKUP_PATH",
            Rejection::OodMismatch(_) => "OOD_MISMATCH",
            Rejection::FriFoldMismatch(_) => "FRI_FOLD_MISMATCH",
            Rejection::DegreeExceeded(_) => "DEGREE_EXCEEDED",
            Rejection::BadTraceOpening(_) => "BAD_TRACE_OPENING",
            Rejection::Malformed(_) => "MALFORMED",
        }
    }
}

/// Work performed by an accepting verification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VerifyStats {
    /// Table openings checked against the table root.
    pub lookup_paths: usize,
    /// Trace, composition and FRI layer openings checked.
    pub query_paths: usize,
}

pub fn verify(proof: &StarkProof) -> Result<(), Rejection> {
    verify_with_stats(proof).map(|_| ())
}

fn read_fields(payload: &[u8], count: usize) -> Option<Vec<F>> {
    if payload.len() != count * 8 {
        return None;
    }
    payload
        .chunks_exact(8)
        .map(|c| F::from_le_bytes(c.try_into().expect("8 bytes")).ok())
        .collect()
}

fn check_path(path: &MerklePath, index: usize, root: &crate::commit::Digest, values: usize) -> Option<Vec<F>> {
    if path.leaf_index != index || !path.verify(root) {
        return None;
    }
    read_fields(&path.payload, values)
}

/// Authenticates every table opening and rebuilds the public columns,
/// padded to `rows` by repeating the last row.
fn public_columns(st: &PublicStatement, air: &Air, cfg: &AirConfig) -> Result<Vec<Vec<F>>, Rejection> {
    let mut cols = vec![Vec::with_capacity(cfg.rows); air.public_width()];
    for (k, row) in st.rows.iter().enumerate() {
        if row.zone >= st.zone_count || row.i >= cfg.r || row.j >= cfg.r {
            return Err(Rejection::BadLookupPath(format!("row {k}: cell or zone out of range")));
        }
        if row.openings.len() != air.openings_per_row() {
            return Err(Rejection::Malformed(format!("row {k}: wrong number of table openings")));
        }
        let expected = expected_leaves(&cfg.strategy, cfg.r, row.zone, row.i, row.j);
        let mut values = vec![F::new(row.i as u64), F::new(row.j as u64), F::from(row.out)];
        for (c, (path, idx)) in row.openings.iter().zip(expected).enumerate() {
            let v = check_path(path, idx, &st.table_root, 1)
                .ok_or_else(|| Rejection::BadLookupPath(format!("row {k}, opening {c}")))?[0];
            values.push(if air.distance_aware {
                F::from_i64(trace_payload(v.to_i128()))
            } else {
                v
            });
        }
        debug_assert_eq!(values.len(), PUB_PAYLOAD + air.openings_per_row());
        debug_assert!(PUB_OUT < PUB_PAYLOAD);
        for (col, v) in cols.iter_mut().zip(values) {
            col.push(v);
        }
    }
    for col in &mut cols {
        let last = *col.last().expect("statement has rows");
        col.resize(cfg.rows, last);
    }
    Ok(cols)
}

/// Lagrange weights of the trace subgroup at `z` (barycentric form).
fn lagrange_at(domain: &EvaluationDomain, z: F) -> Result<Vec<F>, Rejection> {
    let xs = domain.elements();
    let diffs: Vec<F> = xs.iter().map(|x| z - *x).collect();
    let inv = batch_inverse(&diffs).map_err(|_| Rejection::OodMismatch("point lies on the trace domain".into()))?;
    let n_inv = F::new(domain.size() as u64).inverse().expect("nonzero size");
    let scale = domain.vanishing_at(z) * n_inv;
    Ok(xs.iter().zip(inv).map(|(x, d)| scale * *x * d).collect())
}

pub fn verify_with_stats(proof: &StarkProof) -> Result<VerifyStats, Rejection> {
    let st = &proof.statement;
    let cfg = st.config;
    cfg.validate().map_err(|e| Rejection::Malformed(e.to_string()))?;
    let air = cfg.air();
    if st.rows.is_empty() || st.rows.len() > cfg.rows {
        return Err(Rejection::Malformed(format!("{} statement rows for {} trace rows", st.rows.len(), cfg.rows)));
    }
    if proof.ood_trace.len() != air.witness_width {
        return Err(Rejection::Malformed("wrong number of out-of-domain values".into()));
    }
    let mut stats = VerifyStats::default();

    let public = public_columns(st, &air, &cfg)?;
    stats.lookup_paths = st.rows.len() * air.openings_per_row();

    let mut transcript = Transcript::new(PROTOCOL_LABEL);
    transcript.absorb(b"statement", &statement_bytes(st));
    transcript.absorb(b"trace-root", proof.trace_root.as_bytes());
    let alphas: Vec<F> = (0..air.constraint_count()).map(|_| transcript.challenge_field()).collect();
    transcript.absorb(b"composition-root", proof.composition_root.as_bytes());
    let z = draw_ood_point(&mut transcript, &cfg);
    if proof.ood_point != z {
        return Err(Rejection::OodMismatch("out-of-domain point differs from the transcript".into()));
    }
    transcript.absorb_field(b"ood-trace", &proof.ood_trace);
    transcript.absorb_field(b"ood-composition", &[proof.ood_composition]);
    let betas: Vec<F> = (0..=air.witness_width).map(|_| transcript.challenge_field()).collect();

    let trace_domain = EvaluationDomain::new(cfg.rows).map_err(|e| Rejection::Malformed(e.to_string()))?;
    let weights = lagrange_at(&trace_domain, z)?;
    let public_z: Vec<F> = public
        .iter()
        .map(|col| col.iter().zip(&weights).map(|(y, w)| *y * *w).sum())
        .collect();
    let mut scratch = Vec::new();
    let lhs = air.combine(&proof.ood_trace, &public_z, &alphas, &mut scratch);
    if lhs != proof.ood_composition * trace_domain.vanishing_at(z) {
        return Err(Rejection::OodMismatch("constraint identity fails at the out-of-domain point".into()));
    }

    let folds = cfg.fri_folds();
    if proof.fri_roots.len() < folds {
        return Err(Rejection::DegreeExceeded(format!(
            "{} FRI layers, {folds} needed for the degree bound",
            proof.fri_roots.len()
        )));
    }
    if proof.fri_roots.len() > folds {
        return Err(Rejection::Malformed("too many FRI layers".into()));
    }
    if proof.fri_final.len() > cfg.fri_final_degree {
        return Err(Rejection::DegreeExceeded(format!(
            "final polynomial has {} coefficients, at most {} allowed",
            proof.fri_final.len(),
            cfg.fri_final_degree
        )));
    }
    if proof.queries.len() != cfg.fri_query_count {
        return Err(Rejection::Malformed("wrong number of query openings".into()));
    }
    let gammas: Vec<F> = proof
        .fri_roots
        .iter()
        .map(|root| {
            transcript.absorb(b"fri-layer", root.as_bytes());
            transcript.challenge_field()
        })
        .collect();
    transcript.absorb_field(b"fri-final", &proof.fri_final);
    let big = cfg.lde_size();
    let indices = transcript.challenge_indices(cfg.fri_query_count, big);

    let lde = EvaluationDomain::coset(big, LDE_SHIFT).map_err(|e| Rejection::Malformed(e.to_string()))?;
    let inv_two = fri::inv_two();
    for (q, (&idx, opening)) in indices.iter().zip(&proof.queries).enumerate() {
        if opening.layers.len() != folds {
            return Err(Rejection::Malformed(format!("query {q}: wrong number of FRI openings")));
        }
        let row = check_path(&opening.trace, idx, &proof.trace_root, air.witness_width)
            .ok_or_else(|| Rejection::BadTraceOpening(format!("query {q}: trace row {idx}")))?;
        let comp = check_path(&opening.composition, idx, &proof.composition_root, 1)
            .ok_or_else(|| Rejection::BadTraceOpening(format!("query {q}: composition value {idx}")))?[0];

        let x = lde.element(idx);
        let inv = (x - z).inverse().map_err(|_| Rejection::OodMismatch("point lies on the LDE coset".into()))?;
        let mut acc = betas[air.witness_width] * (comp - proof.ood_composition);
        for (c, v) in row.iter().enumerate() {
            acc += betas[c] * (*v - proof.ood_trace[c]);
        }
        let mut current = acc * inv;

        let mut shift = lde.shift();
        let mut gen = lde.generator();
        for (t, path) in opening.layers.iter().enumerate() {
            let (pos, pair) = fri::layer_position(idx, big, t);
            let half = (big >> t) / 2;
            let pair_vals = check_path(path, pair, &proof.fri_roots[t], 2)
                .ok_or_else(|| Rejection::FriFoldMismatch(format!("query {q}: layer {t} opening")))?;
            let (lo, hi) = (pair_vals[0], pair_vals[1]);
            if current != if pos < half { lo } else { hi } {
                return Err(Rejection::FriFoldMismatch(format!("query {q}: layer {t} value")));
            }
            let two_x = F::TWO * shift * gen.pow(pair as u64);
            current = fri::fold_pair(lo, hi, gammas[t], two_x.inverse().expect("coset element"), inv_two);
            shift = shift.square();
            gen = gen.square();
        }
        let last_pos = idx % (big >> folds);
        if horner(&proof.fri_final, shift * gen.pow(last_pos as u64)) != current {
            return Err(Rejection::FriFoldMismatch(format!("query {q}: final polynomial")));
        }
        stats.query_paths += 2 + folds;
    }
    Ok(stats)
}
