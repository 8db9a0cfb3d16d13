use rayon::prelude::*;

use crate::commit::{MerkleTree, Transcript};
use crate::field::{batch_inverse, horner, intt, ntt, EvaluationDomain, FieldElement as F};

use super::proof::{statement_bytes, QueryOpening, StarkProof};
use super::trace::{PublicStatement, TraceTable};
use super::{fri, AirConfig, StarkError, LDE_SHIFT, PROTOCOL_LABEL};

/// Interpolates each column over the trace domain and evaluates it on the
/// LDE coset. Returns `(coefficients, lde)` per column.
fn extend_columns(
    columns: &[Vec<F>],
    trace_domain: &EvaluationDomain,
    lde_domain: &EvaluationDomain,
) -> Result<(Vec<Vec<F>>, Vec<Vec<F>>), StarkError> {
    let pairs = columns
        .par_iter()
        .map(|col| {
            let coeffs = intt(col, trace_domain)?;
            let mut padded = coeffs.clone();
            padded.resize(lde_domain.size(), F::ZERO);
            Ok((coeffs, ntt(&padded, lde_domain)?))
        })
        .collect::<Result<Vec<_>, StarkError>>()?;
    Ok(pairs.into_iter().unzip())
}

/// Draws the out-of-domain point, skipping values on the trace subgroup or
/// the LDE coset.
pub(crate) fn draw_ood_point(transcript: &mut Transcript, cfg: &AirConfig) -> F {
    let shift_pow = LDE_SHIFT.pow(cfg.lde_size() as u64);
    loop {
        let z = transcript.challenge_field();
        if !z.is_zero() && z.pow(cfg.rows as u64) != F::ONE && z.pow(cfg.lde_size() as u64) != shift_pow {
            return z;
        }
    }
}

/// Inverses of `x^rows - 1` over the LDE coset, which repeat with period `blowup`.
pub(crate) fn vanishing_inverses(cfg: &AirConfig, lde_domain: &EvaluationDomain) -> Result<Vec<F>, StarkError> {
    let n = cfg.rows as u64;
    let base = lde_domain.shift().pow(n);
    let step = lde_domain.generator().pow(n);
    let mut vals = Vec::with_capacity(cfg.blowup);
    let mut acc = base;
    for _ in 0..cfg.blowup {
        vals.push(acc - F::ONE);
        acc *= step;
    }
    Ok(batch_inverse(&vals)?)
}

fn row_bytes(columns: &[Vec<F>], len: usize) -> Vec<u8> {
    let width = columns.len() * 8;
    let mut data = vec![0u8; len * width];
    data.par_chunks_mut(width).enumerate().for_each(|(k, chunk)| {
        for (c, col) in columns.iter().enumerate() {
            chunk[c * 8..c * 8 + 8].copy_from_slice(&col[k].to_le_bytes());
        }
    });
    data
}

/// Produces a proof that the trace satisfies the AIR. Refuses traces that
/// violate any constraint.
pub fn prove(trace: &TraceTable, statement: &PublicStatement, cfg: &AirConfig) -> Result<StarkProof, StarkError> {
    cfg.validate()?;
    let air = cfg.air();
    if trace.air != air || trace.rows() != cfg.rows {
        return Err(StarkError::Shape("trace layout differs from the configuration".into()));
    }
    if statement.config != *cfg || statement.rows.len() != trace.real_rows {
        return Err(StarkError::Shape("statement does not describe this trace".into()));
    }
    trace.check()?;

    let n = cfg.rows;
    let big = cfg.lde_size();
    let trace_domain = EvaluationDomain::new(n)?;
    let lde_domain = EvaluationDomain::coset(big, LDE_SHIFT)?;

    let (w_coeffs, w_lde) = extend_columns(&trace.witness, &trace_domain, &lde_domain)?;
    let (_, p_lde) = extend_columns(&trace.public, &trace_domain, &lde_domain)?;

    let trace_tree = MerkleTree::from_chunks(row_bytes(&w_lde, big), air.witness_width * 8)?;
    let mut transcript = Transcript::new(PROTOCOL_LABEL);
    transcript.absorb(b"statement", &statement_bytes(statement));
    transcript.absorb(b"trace-root", trace_tree.root().as_bytes());
    let alphas: Vec<F> = (0..air.constraint_count()).map(|_| transcript.challenge_field()).collect();

    let zh_inv = vanishing_inverses(cfg, &lde_domain)?;
    let comp_evals: Vec<F> = (0..big)
        .into_par_iter()
        .map_init(
            || (vec![F::ZERO; w_lde.len()], vec![F::ZERO; p_lde.len()], Vec::new()),
            |(w, p, scratch), k| {
                for (dst, col) in w.iter_mut().zip(&w_lde) {
                    *dst = col[k];
                }
                for (dst, col) in p.iter_mut().zip(&p_lde) {
                    *dst = col[k];
                }
                air.combine(w, p, &alphas, scratch) * zh_inv[k % cfg.blowup]
            },
        )
        .collect();
    let comp_coeffs = intt(&comp_evals, &lde_domain)?;
    if comp_coeffs[n..].iter().any(|c| !c.is_zero()) {
        return Err(StarkError::Shape("composition polynomial exceeds the degree bound".into()));
    }
    let comp_bytes: Vec<u8> = comp_evals.iter().flat_map(|v| v.to_le_bytes()).collect();
    let comp_tree = MerkleTree::from_chunks(comp_bytes, 8)?;
    transcript.absorb(b"composition-root", comp_tree.root().as_bytes());

    let z = draw_ood_point(&mut transcript, cfg);
    let ood_trace: Vec<F> = w_coeffs.iter().map(|c| horner(c, z)).collect();
    let ood_composition = horner(&comp_coeffs[..n], z);
    transcript.absorb_field(b"ood-trace", &ood_trace);
    transcript.absorb_field(b"ood-composition", &[ood_composition]);
    let betas: Vec<F> = (0..=air.witness_width).map(|_| transcript.challenge_field()).collect();

    let xs = lde_domain.elements();
    let shifted: Vec<F> = xs.iter().map(|x| *x - z).collect();
    let inv = batch_inverse(&shifted)?;
    let deep: Vec<F> = (0..big)
        .into_par_iter()
        .map(|k| {
            let mut acc = betas[air.witness_width] * (comp_evals[k] - ood_composition);
            for (c, col) in w_lde.iter().enumerate() {
                acc += betas[c] * (col[k] - ood_trace[c]);
            }
            acc * inv[k]
        })
        .collect();

    let fri = fri::commit(deep, lde_domain, cfg.fri_folds(), cfg.fri_final_degree, &mut transcript)?;
    let indices = transcript.challenge_indices(cfg.fri_query_count, big);
    let queries = indices
        .par_iter()
        .map(|&idx| {
            let layers = fri
                .trees
                .iter()
                .enumerate()
                .map(|(t, tree)| tree.open(fri::layer_position(idx, big, t).1))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QueryOpening {
                trace: trace_tree.open(idx)?,
                composition: comp_tree.open(idx)?,
                layers,
            })
        })
        .collect::<Result<Vec<_>, StarkError>>()?;

    Ok(StarkProof {
        statement: statement.clone(),
        trace_root: trace_tree.root(),
        composition_root: comp_tree.root(),
        ood_point: z,
        ood_trace,
        ood_composition,
        fri_roots: fri.trees.iter().map(MerkleTree::root).collect(),
        fri_final: fri.final_coeffs,
        queries,
    })
}
