//! Data ingestion, experiment orchestration and report output.

mod experiment;
mod geojson;
mod report;
mod sample;
mod soundness;
mod synth;
mod zset;

#[cfg(test)]
mod tests;

pub use experiment::{query_batch, run_accuracy_sweep, run_proof_bench, BenchCell, BenchConfig};
pub use geojson::{export_geojson, frame_of, ingest, parse_geojson, GeoFrame};
pub use report::{emit_report, rows_from_csv, rows_to_csv, sort_rows, ReportRow};
pub use sample::{read_queries, write_queries, QueryRecord, QuerySample, DEFAULT_SAMPLE_COUNT};
pub use soundness::{mutate, run_soundness_smoke, MutationClass, SmokeResult};
pub use synth::{
    corpus_bbox, synth_corpus, BUILDING_SIDE_M, CORPUS_BUILDINGS, CORPUS_ORIGIN, CORPUS_PARKS, CORPUS_ROADS,
    CORPUS_SIDE_M, PARK_EXTENT_M, PARK_VERTICES, ROAD_LENGTH_M, ROAD_WIDTH_M,
};
pub use zset::{decode_zones, encode_zones, load_zones, write_zones, ZONES_MAGIC, ZONES_VERSION};

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::discretize::TableError;
use crate::geometry::GeometryError;
use crate::stark::{Rejection, StarkError};

/// Default resolution list of the accuracy sweep.
pub const SWEEP_RESOLUTIONS: [u32; 9] = [2, 3, 4, 8, 16, 32, 64, 128, 256];

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("GeoJSON: {0}")]
    Parse(String),
    #[error("invalid features:\n  {}", .0.join("\n  "))]
    InvalidFeatures(Vec<String>),
    #[error("no zones remain inside the region box")]
    EmptyZoneSet,
    #[error("malformed file: {0}")]
    Format(String),
    #[error("{0}")]
    Input(String),
    #[error("report has no rows")]
    EmptyReport,
    #[error("{strategy} r={r}: proof rejected: {reason}")]
    Rejected { strategy: String, r: u32, reason: Rejection },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Stark(#[from] StarkError),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, e: csv::Error) -> Self {
        HarnessError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>, HarnessError> {
    std::fs::read(path).map_err(|e| HarnessError::io(path, e))
}

pub(crate) fn write_file(path: &Path, data: &[u8]) -> Result<(), HarnessError> {
    std::fs::write(path, data).map_err(|e| HarnessError::io(path, e))
}
