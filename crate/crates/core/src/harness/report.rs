use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::discretize::StrategyKind;

use super::{write_file, HarnessError};

/// One `(strategy, r)` cell of an experiment. Missing measurements stay empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub strategy: String,
    pub r: u32,
    pub accuracy: Option<f64>,
    pub prove_ms: Option<f64>,
    pub verify_ms: Option<f64>,
    pub proof_bytes: Option<usize>,
    pub trace_rows: Option<usize>,
    /// Unix milliseconds when the cell finished; kept out of the CSV.
    #[serde(skip)]
    pub timestamp_ms: u64,
}

impl ReportRow {
    pub fn new(strategy: &StrategyKind, r: u32) -> Self {
        Self {
            strategy: strategy.name().to_string(),
            r,
            accuracy: None,
            prove_ms: None,
            verify_ms: None,
            proof_bytes: None,
            trace_rows: None,
            timestamp_ms: now_ms(),
        }
    }

    fn rank(&self) -> u8 {
        StrategyKind::from_str(&self.strategy).map_or(u8::MAX, |s| s.rank())
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

/// Canonical order: strategy rank, then ascending resolution.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| a.rank().cmp(&b.rank()).then(a.strategy.cmp(&b.strategy)).then(a.r.cmp(&b.r)));
}

pub fn rows_to_csv(rows: &[ReportRow]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::csv(Path::new("<memory>"), e))?;
    }
    w.into_inner().map_err(|e| HarnessError::Format(e.to_string()))
}

pub fn rows_from_csv(data: &[u8]) -> Result<Vec<ReportRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(data);
    r.deserialize()
        .map(|rec| rec.map_err(|e| HarnessError::csv(Path::new("<memory>"), e)))
        .collect()
}

#[derive(Serialize)]
struct JsonRow<'a> {
    #[serde(flatten)]
    row: &'a ReportRow,
    timestamp_ms: u64,
}

/// Writes the CSV report and a JSON mirror next to it (same stem, `.json`).
/// Returns the JSON path. Nothing is written for an empty report.
pub fn emit_report(rows: &[ReportRow], csv_path: &Path) -> Result<PathBuf, HarnessError> {
    if rows.is_empty() {
        return Err(HarnessError::EmptyReport);
    }
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let json_path = csv_path.with_extension("json");
    let doc = serde_json::json!({
        "generated_ms": now_ms(),
        "rows": sorted.iter().map(|row| JsonRow { row, timestamp_ms: row.timestamp_ms }).collect::<Vec<_>>(),
    });
    let csv = rows_to_csv(&sorted)?;
    let json = serde_json::to_vec_pretty(&doc)?;
    write_file(csv_path, &csv)?;
    write_file(&json_path, &json)?;
    Ok(json_path)
}
