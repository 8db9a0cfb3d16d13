//! Lookup-table encodings of a zone set over a uniform `r x r` grid and the
//! proof-free reference path that answers membership queries from them.
//!
//! Boolean tables (center-point and voting) hold one bit per cell. The
//! distance-aware table holds a fixed-point signed distance at each of the
//! `(r+1) x (r+1)` grid vertices; queries interpolate the four vertices of
//! their cell bilinearly and read membership off the sign.

mod file;

pub use file::{read_table, write_table, TABLE_MAGIC, TABLE_VERSION};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::commit::{Digest, MerkleError, MerkleTree};
use crate::field::{FieldElement, FixedPoint};
use crate::geometry::{contains, intersection_area, signed_distance, BoundingBox, Point2D, ZoneSet};

/// Storage scale of signed distances, `S = 2^32`.
pub const SDF_SCALE_BITS: u32 = 32;

/// Signed distances are clamped to `±SDF_CLAMP_METERS` before encoding.
pub const SDF_CLAMP_METERS: f64 = ((1u64 << 30) - 1) as f64;

pub const DEFAULT_TAU: f64 = 0.5;

/// Fixed-point scale of the voting threshold in table files.
pub(crate) const TAU_SCALE: f64 = 4_294_967_296.0;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("grid resolution must be at least 2, got {0}")]
    Resolution(u32),
    #[error("voting threshold must lie in (0, 1], got {0}")]
    Tau(f64),
    #[error("point ({x}, {y}) lies outside the grid bounding box")]
    OutOfBounds { x: f64, y: f64 },
    #[error("zone index {index} out of range for {count} zones")]
    ZoneIndex { index: usize, count: usize },
    #[error("strategy {expected} expected, table holds {actual}")]
    StrategyMismatch { expected: String, actual: String },
    #[error("malformed table file: {0}")]
    Format(String),
    #[error("table commitment mismatch: footer {footer}, recomputed {computed}")]
    Commitment { footer: Digest, computed: Digest },
    #[error(transparent)]
    Merkle(#[from] MerkleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A uniform `r x r` subdivision of the bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    bbox: BoundingBox,
    r: u32,
}

impl GridSpec {
    pub fn new(bbox: BoundingBox, r: u32) -> Result<Self, TableError> {
        if r < 2 {
            return Err(TableError::Resolution(r));
        }
        Ok(Self { bbox, r })
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn cell_w(&self) -> f64 {
        self.bbox.width() / self.r as f64
    }

    pub fn cell_h(&self) -> f64 {
        self.bbox.height() / self.r as f64
    }

    pub fn cell_count(&self) -> usize {
        (self.r as usize).pow(2)
    }

    pub fn vertex_count(&self) -> usize {
        (self.r as usize + 1).pow(2)
    }

    pub fn cell_center(&self, c: CellCoord) -> Point2D {
        Point2D::new(
            self.bbox.xmin + (c.i as f64 + 0.5) * self.cell_w(),
            self.bbox.ymin + (c.j as f64 + 0.5) * self.cell_h(),
        )
    }

    pub fn cell_rect(&self, c: CellCoord) -> BoundingBox {
        let (w, h) = (self.cell_w(), self.cell_h());
        BoundingBox {
            xmin: self.bbox.xmin + c.i as f64 * w,
            xmax: self.bbox.xmin + (c.i + 1) as f64 * w,
            ymin: self.bbox.ymin + c.j as f64 * h,
            ymax: self.bbox.ymin + (c.j + 1) as f64 * h,
        }
    }

    /// Grid vertex `(i, j)` for `0 <= i, j <= r`.
    pub fn vertex(&self, i: u32, j: u32) -> Point2D {
        Point2D::new(
            self.bbox.xmin + i as f64 * self.cell_w(),
            self.bbox.ymin + j as f64 * self.cell_h(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellCoord {
    pub i: u32,
    pub j: u32,
}

/// Position of a query inside its cell, each coordinate in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOffset {
    pub u: f64,
    pub v: f64,
}

fn locate_axis(offset: f64, cell: f64, r: u32) -> (u32, f64) {
    let scaled = offset / cell;
    let idx = (scaled.floor().max(0.0) as u32).min(r - 1);
    (idx, (scaled - idx as f64).clamp(0.0, 1.0))
}

/// Maps a point to its cell and in-cell offset. Points on the far edge of
/// the box land in the last cell with offset 1.
pub fn locate(grid: &GridSpec, p: &Point2D) -> Result<(CellCoord, LocalOffset), TableError> {
    if !p.is_finite() || !grid.bbox.contains(p) {
        return Err(TableError::OutOfBounds { x: p.x, y: p.y });
    }
    let (i, u) = locate_axis(p.x - grid.bbox.xmin, grid.cell_w(), grid.r);
    let (j, v) = locate_axis(p.y - grid.bbox.ymin, grid.cell_h(), grid.r);
    Ok((CellCoord { i, j }, LocalOffset { u, v }))
}

/// Which payload a table stores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    CenterPoint,
    Voting { tau: f64 },
    DistanceAware,
}

impl StrategyKind {
    pub fn voting() -> Self {
        StrategyKind::Voting { tau: DEFAULT_TAU }
    }

    pub fn tag(&self) -> u8 {
        match self {
            StrategyKind::CenterPoint => 0,
            StrategyKind::Voting { .. } => 1,
            StrategyKind::DistanceAware => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::CenterPoint => "center",
            StrategyKind::Voting { .. } => "voting",
            StrategyKind::DistanceAware => "sdf",
        }
    }

    pub fn is_boolean(&self) -> bool {
        !matches!(self, StrategyKind::DistanceAware)
    }

    /// Canonical order used when sorting report rows.
    pub fn rank(&self) -> u8 {
        self.tag()
    }

    /// Rounds a voting threshold to the `2^-32` grid used by table files, so
    /// a table read back from disk carries the exact threshold it was built with.
    pub fn quantized(self) -> Self {
        match self {
            StrategyKind::Voting { tau } => StrategyKind::Voting {
                tau: (tau * TAU_SCALE).round() / TAU_SCALE,
            },
            other => other,
        }
    }

    pub fn all() -> [StrategyKind; 3] {
        [StrategyKind::CenterPoint, StrategyKind::voting(), StrategyKind::DistanceAware]
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "center" | "center-point" | "centerpoint" => Ok(StrategyKind::CenterPoint),
            "voting" | "vote" => Ok(StrategyKind::voting()),
            "sdf" | "distance" | "distance-aware" => Ok(StrategyKind::DistanceAware),
            other => Err(format!("unknown strategy {other:?} (expected center, voting or sdf)")),
        }
    }
}

/// One bit per cell and zone, stored row-major as `bits[zone][j * r + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoolTable {
    pub grid: GridSpec,
    pub zone_ids: Vec<String>,
    pub bits: Vec<Vec<bool>>,
}

impl BoolTable {
    pub fn bit(&self, zone: usize, c: CellCoord) -> bool {
        self.bits[zone][(c.j * self.grid.r + c.i) as usize]
    }
}

/// Signed distances at grid vertices, `values[zone][j * (r + 1) + i]`, in
/// fixed point at scale `2^32`.
#[derive(Debug, Clone, PartialEq)]
pub struct SdfTable {
    pub grid: GridSpec,
    pub zone_ids: Vec<String>,
    pub values: Vec<Vec<FixedPoint>>,
}

impl SdfTable {
    pub fn value(&self, zone: usize, i: u32, j: u32) -> FixedPoint {
        self.values[zone][(j * (self.grid.r + 1) + i) as usize]
    }

    /// Corner values `(d00, d10, d01, d11)` of cell `c`.
    pub fn corners(&self, zone: usize, c: CellCoord) -> [FixedPoint; 4] {
        [
            self.value(zone, c.i, c.j),
            self.value(zone, c.i + 1, c.j),
            self.value(zone, c.i, c.j + 1),
            self.value(zone, c.i + 1, c.j + 1),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LookupTable {
    Bool(BoolTable),
    Sdf(SdfTable),
}

impl LookupTable {
    pub fn grid(&self) -> &GridSpec {
        match self {
            LookupTable::Bool(t) => &t.grid,
            LookupTable::Sdf(t) => &t.grid,
        }
    }

    pub fn zone_ids(&self) -> &[String] {
        match self {
            LookupTable::Bool(t) => &t.zone_ids,
            LookupTable::Sdf(t) => &t.zone_ids,
        }
    }

    pub fn zone_count(&self) -> usize {
        self.zone_ids().len()
    }

    /// Entries per zone: `r^2` cells or `(r+1)^2` vertices.
    pub fn entries_per_zone(&self) -> usize {
        match self {
            LookupTable::Bool(t) => t.grid.cell_count(),
            LookupTable::Sdf(t) => t.grid.vertex_count(),
        }
    }

    /// Side length of the per-zone entry grid (`r` or `r + 1`).
    pub fn side(&self) -> u32 {
        match self {
            LookupTable::Bool(t) => t.grid.r,
            LookupTable::Sdf(t) => t.grid.r + 1,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.zone_count() * self.entries_per_zone()
    }

    /// Flat position of entry `(zone, i, j)` in `(zone, j, i)` row-major order.
    pub fn leaf_index(&self, zone: usize, i: u32, j: u32) -> usize {
        let side = self.side() as usize;
        zone * self.entries_per_zone() + j as usize * side + i as usize
    }

    /// Field encoding of the entry at a flat leaf index.
    pub fn leaf_value(&self, index: usize) -> FieldElement {
        let per = self.entries_per_zone();
        let (zone, k) = (index / per, index % per);
        match self {
            LookupTable::Bool(t) => FieldElement::from(t.bits[zone][k]),
            LookupTable::Sdf(t) => t.values[zone][k].to_field(),
        }
    }

    /// Canonical serialization: every entry as a little-endian `u64`.
    pub fn leaf_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.leaf_count() * 8);
        match self {
            LookupTable::Bool(t) => {
                for zone in &t.bits {
                    for &b in zone {
                        out.extend_from_slice(&(b as u64).to_le_bytes());
                    }
                }
            }
            LookupTable::Sdf(t) => {
                for zone in &t.values {
                    for v in zone {
                        out.extend_from_slice(&v.to_field().to_le_bytes());
                    }
                }
            }
        }
        out
    }

    pub fn commit_tree(&self) -> Result<MerkleTree, TableError> {
        Ok(MerkleTree::from_chunks(self.leaf_bytes(), 8)?)
    }
}

/// A built table with its strategy and Merkle commitment.
#[derive(Debug, Clone, PartialEq)]
pub struct TableBundle {
    pub strategy: StrategyKind,
    pub table: LookupTable,
    pub commitment_root: Digest,
}

impl TableBundle {
    pub fn new(strategy: StrategyKind, table: LookupTable) -> Result<Self, TableError> {
        let commitment_root = table.commit_tree()?.root();
        Ok(Self {
            strategy,
            table,
            commitment_root,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.table.grid()
    }

    pub fn zone_count(&self) -> usize {
        self.table.zone_count()
    }
}

pub fn build_center_table(zones: &ZoneSet, grid: &GridSpec) -> BoolTable {
    let r = grid.r;
    let bits = zones
        .zones()
        .par_iter()
        .map(|zone| {
            (0..r)
                .flat_map(|j| (0..r).map(move |i| CellCoord { i, j }))
                .map(|c| contains(zone, &grid.cell_center(c)))
                .collect()
        })
        .collect();
    BoolTable {
        grid: *grid,
        zone_ids: zones.ids(),
        bits,
    }
}

/// Sets a bit when the zone covers at least `tau` of the cell's area.
pub fn build_voting_table(zones: &ZoneSet, grid: &GridSpec, tau: f64) -> Result<BoolTable, TableError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(TableError::Tau(tau));
    }
    let r = grid.r;
    let bits = zones
        .zones()
        .par_iter()
        .map(|zone| {
            let zb = zone.bbox();
            (0..r)
                .flat_map(|j| (0..r).map(move |i| CellCoord { i, j }))
                .map(|c| {
                    let cell = grid.cell_rect(c);
                    cell.intersects(&zb) && intersection_area(zone, &cell) / cell.area() >= tau
                })
                .collect()
        })
        .collect();
    Ok(BoolTable {
        grid: *grid,
        zone_ids: zones.ids(),
        bits,
    })
}

pub fn encode_distance(d: f64) -> FixedPoint {
    FixedPoint::from_f64(d.clamp(-SDF_CLAMP_METERS, SDF_CLAMP_METERS), SDF_SCALE_BITS)
        .expect("clamped distances fit the fixed-point range")
}

pub fn build_sdf_table(zones: &ZoneSet, grid: &GridSpec) -> SdfTable {
    let side = grid.r + 1;
    let values = zones
        .zones()
        .par_iter()
        .map(|zone| {
            (0..side)
                .flat_map(|j| (0..side).map(move |i| (i, j)))
                .map(|(i, j)| encode_distance(signed_distance(zone, &grid.vertex(i, j))))
                .collect()
        })
        .collect();
    SdfTable {
        grid: *grid,
        zone_ids: zones.ids(),
        values,
    }
}

/// Builds the table for `strategy` and commits to it.
pub fn build_table(zones: &ZoneSet, grid: &GridSpec, strategy: StrategyKind) -> Result<TableBundle, TableError> {
    let strategy = strategy.quantized();
    let table = match strategy {
        StrategyKind::CenterPoint => LookupTable::Bool(build_center_table(zones, grid)),
        StrategyKind::Voting { tau } => LookupTable::Bool(build_voting_table(zones, grid, tau)?),
        StrategyKind::DistanceAware => LookupTable::Sdf(build_sdf_table(zones, grid)),
    };
    TableBundle::new(strategy, table)
}

/// `(1-u)(1-v) d00 + u(1-v) d10 + (1-u)v d01 + uv d11`.
pub fn interpolate_bilinear(d00: f64, d10: f64, d01: f64, d11: f64, u: f64, v: f64) -> f64 {
    (1.0 - u) * (1.0 - v) * d00 + u * (1.0 - v) * d10 + (1.0 - u) * v * d01 + u * v * d11
}

/// Membership decision for one zone read from the table alone.
pub fn classify(bundle: &TableBundle, p: &Point2D, zone_index: usize) -> Result<bool, TableError> {
    let count = bundle.zone_count();
    if zone_index >= count {
        return Err(TableError::ZoneIndex { index: zone_index, count });
    }
    let (cell, off) = locate(bundle.grid(), p)?;
    Ok(match &bundle.table {
        LookupTable::Bool(t) => t.bit(zone_index, cell),
        LookupTable::Sdf(t) => {
            let [d00, d10, d01, d11] = t.corners(zone_index, cell).map(FixedPoint::to_f64);
            interpolate_bilinear(d00, d10, d01, d11, off.u, off.v) <= 0.0
        }
    })
}

/// Exact containment of every query in every zone, `truth[query][zone]`.
pub fn exact_membership(zones: &ZoneSet, queries: &[Point2D]) -> Vec<Vec<bool>> {
    queries
        .par_iter()
        .map(|p| zones.zones().iter().map(|z| contains(z, p)).collect())
        .collect()
}

/// Multi-zone exact-match accuracy against precomputed ground truth.
pub fn accuracy_with_truth(bundle: &TableBundle, queries: &[Point2D], truth: &[Vec<bool>]) -> Result<f64, TableError> {
    if queries.is_empty() {
        return Err(TableError::Format("accuracy needs at least one query".into()));
    }
    let correct = queries
        .par_iter()
        .zip(truth.par_iter())
        .map(|(p, expected)| -> Result<bool, TableError> {
            for (zone, &want) in expected.iter().enumerate() {
                if classify(bundle, p, zone)? != want {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>, _>>()?
        .into_iter()
        .filter(|&ok| ok)
        .count();
    Ok(correct as f64 / queries.len() as f64)
}

/// Fraction of queries whose decisions match exact containment for every zone.
pub fn accuracy_eval(zones: &ZoneSet, bundle: &TableBundle, queries: &[Point2D]) -> Result<f64, TableError> {
    let truth = exact_membership(zones, queries);
    accuracy_with_truth(bundle, queries, &truth)
}
