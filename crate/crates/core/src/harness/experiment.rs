use std::time::Instant;

use log::info;
use rayon::prelude::*;

use crate::discretize::{accuracy_with_truth, build_table, exact_membership, GridSpec, StrategyKind, TableBundle};
use crate::geometry::ZoneSet;
use crate::stark::{build_trace, prove, verify, AirConfig, StarkProof, ZoneQuery};

use super::report::{now_ms, sort_rows, ReportRow};
use super::sample::QuerySample;
use super::HarnessError;

/// Builds every `(strategy, r)` table and scores it on the shared sample.
pub fn run_accuracy_sweep(
    zones: &ZoneSet,
    strategies: &[StrategyKind],
    resolutions: &[u32],
    sample: &QuerySample,
) -> Result<Vec<ReportRow>, HarnessError> {
    let truth = exact_membership(zones, &sample.points);
    let cells: Vec<(StrategyKind, u32)> = strategies
        .iter()
        .flat_map(|s| resolutions.iter().map(move |r| (*s, *r)))
        .collect();
    let mut rows = cells
        .par_iter()
        .map(|(strategy, r)| {
            let grid = GridSpec::new(zones.bbox(), *r)?;
            let bundle = build_table(zones, &grid, *strategy)?;
            let mut row = ReportRow::new(strategy, *r);
            row.accuracy = Some(accuracy_with_truth(&bundle, &sample.points, &truth)?);
            row.timestamp_ms = now_ms();
            Ok(row)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    sort_rows(&mut rows);
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    /// Queries proven per batch.
    pub batch: usize,
    /// Discarded runs before measuring.
    pub warmup: usize,
    /// Measured runs averaged into each timing.
    pub runs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            batch: 64,
            warmup: 1,
            runs: 3,
        }
    }
}

/// A benchmark cell together with the last proof it produced.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub row: ReportRow,
    pub proof: StarkProof,
    pub prove_runs_ms: Vec<f64>,
    pub verify_runs_ms: Vec<f64>,
}

/// The first `batch` sample points, query `k` tested against zone `k mod m`.
pub fn query_batch(sample: &QuerySample, zone_count: usize, batch: usize) -> Vec<ZoneQuery> {
    sample
        .points
        .iter()
        .take(batch)
        .enumerate()
        .map(|(k, p)| ZoneQuery::new(*p, k % zone_count))
        .collect()
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Proving time covers committing the table, building the trace and proving.
fn prove_once(queries: &[ZoneQuery], bundle: &TableBundle, cfg: &AirConfig) -> Result<(StarkProof, f64), HarnessError> {
    let start = Instant::now();
    let (trace, statement) = build_trace(queries, bundle, cfg)?;
    let proof = prove(&trace, &statement, cfg)?;
    Ok((proof, ms(start)))
}

fn verify_once(proof: &StarkProof, strategy: &StrategyKind, r: u32) -> Result<f64, HarnessError> {
    let start = Instant::now();
    verify(proof).map_err(|reason| HarnessError::Rejected {
        strategy: strategy.name().into(),
        r,
        reason,
    })?;
    Ok(ms(start))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Times proving and verification for every `(strategy, r)` cell. Cells
/// run one after another so measurements do not compete for cores.
pub fn run_proof_bench(
    zones: &ZoneSet,
    strategies: &[StrategyKind],
    resolutions: &[u32],
    sample: &QuerySample,
    bench: &BenchConfig,
) -> Result<Vec<BenchCell>, HarnessError> {
    if bench.runs == 0 || bench.batch == 0 {
        return Err(HarnessError::Input("benchmark needs at least one run and one query".into()));
    }
    let truth = exact_membership(zones, &sample.points);
    let queries = query_batch(sample, zones.len(), bench.batch);
    let mut cells = Vec::new();
    for strategy in strategies {
        for &r in resolutions {
            let grid = GridSpec::new(zones.bbox(), r)?;
            let bundle = build_table(zones, &grid, *strategy)?;
            let cfg = AirConfig::new(*strategy, r, queries.len());
            for _ in 0..bench.warmup {
                let (proof, _) = prove_once(&queries, &bundle, &cfg)?;
                verify_once(&proof, strategy, r)?;
            }
            let mut prove_runs = Vec::with_capacity(bench.runs);
            let mut verify_runs = Vec::with_capacity(bench.runs);
            let mut last = None;
            for _ in 0..bench.runs {
                let (proof, t) = prove_once(&queries, &bundle, &cfg)?;
                prove_runs.push(t);
                verify_runs.push(verify_once(&proof, strategy, r)?);
                last = Some(proof);
            }
            let proof = last.expect("at least one run");
            let mut row = ReportRow::new(strategy, r);
            row.accuracy = Some(accuracy_with_truth(&bundle, &sample.points, &truth)?);
            row.prove_ms = Some(mean(&prove_runs));
            row.verify_ms = Some(mean(&verify_runs));
            row.proof_bytes = Some(proof.size_bytes());
            row.trace_rows = Some(cfg.rows);
            row.timestamp_ms = now_ms();
            info!(
                "{} r={r}: prove {:.1} ms, verify {:.2} ms, {} bytes",
                strategy.name(),
                mean(&prove_runs),
                mean(&verify_runs),
                proof.size_bytes()
            );
            cells.push(BenchCell {
                row,
                proof,
                prove_runs_ms: prove_runs,
                verify_runs_ms: verify_runs,
            });
        }
    }
    Ok(cells)
}
