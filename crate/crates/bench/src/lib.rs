//! Shared fixtures for the criterion benchmarks.

use geostark_core::discretize::{build_table, GridSpec, StrategyKind, TableBundle};
use geostark_core::harness::{query_batch, synth_corpus, QuerySample};
use geostark_core::stark::{build_trace, prove, AirConfig, StarkProof, ZoneQuery};
use geostark_core::ZoneSet;

pub const SEED: u64 = 42;

pub fn corpus() -> ZoneSet {
    synth_corpus(SEED)
}

pub fn table(zones: &ZoneSet, strategy: StrategyKind, r: u32) -> TableBundle {
    build_table(zones, &GridSpec::new(zones.bbox(), r).expect("valid grid"), strategy).expect("table builds")
}

pub fn queries(zones: &ZoneSet, batch: usize) -> Vec<ZoneQuery> {
    let sample = QuerySample::draw(&zones.bbox(), batch, SEED);
    query_batch(&sample, zones.len(), batch)
}

pub fn proof(bundle: &TableBundle, queries: &[ZoneQuery]) -> StarkProof {
    let cfg = AirConfig::new(bundle.strategy, bundle.grid().r(), queries.len());
    let (trace, statement) = build_trace(queries, bundle, &cfg).expect("queries inside the region");
    prove(&trace, &statement, &cfg).expect("honest trace")
}
