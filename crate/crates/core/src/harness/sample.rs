use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundingBox, Point2D};

use super::HarnessError;

pub const DEFAULT_SAMPLE_COUNT: usize = 4000;

/// Query points drawn uniformly over a box by a seeded PCG-64 generator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuerySample {
    pub seed: u64,
    pub points: Vec<Point2D>,
}

impl QuerySample {
    pub fn draw(bbox: &BoundingBox, count: usize, seed: u64) -> Self {
        let mut rng = Pcg64::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                let x = rng.random_range(bbox.xmin..=bbox.xmax);
                let y = rng.random_range(bbox.ymin..=bbox.ymax);
                Point2D::new(x, y)
            })
            .collect();
        Self { seed, points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One line of a query file: a point and the id of the zone it is tested against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub x: f64,
    pub y: f64,
    pub zone: String,
}

pub fn write_queries(path: &Path, records: &[QueryRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| HarnessError::csv(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_queries(path: &Path) -> Result<Vec<QueryRecord>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    r.deserialize().map(|rec| rec.map_err(|e| HarnessError::csv(path, e))).collect()
}
