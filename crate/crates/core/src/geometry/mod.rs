//! Planar geometry kernel: zone polygons, exact containment, signed
//! distance to zone boundaries and cell/polygon intersection areas.
//!
//! Coordinates are projected meters. A point within [`EDGE_TOLERANCE`] of a
//! boundary edge counts as inside its zone.

mod clip;
mod predicates;
mod projection;

pub use clip::{clip_polygon_to_rect, intersection_area};
pub use predicates::{contains, segment_distance, segments_intersect, signed_distance};
pub use projection::{project_lonlat, unproject, EARTH_RADIUS_M};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Distance below which a point is considered to lie on an edge.
pub const EDGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("ring needs at least 3 distinct vertices, got {0}")]
    TooFewVertices(usize),
    #[error("ring has repeated consecutive vertex at position {0}")]
    RepeatedVertex(usize),
    #[error("ring has zero signed area")]
    ZeroArea,
    #[error("ring contains a non-finite coordinate")]
    NonFinite,
    #[error("ring is self-intersecting (edges {0} and {1})")]
    SelfIntersecting(usize, usize),
    #[error("hole {0} is not inside the exterior ring")]
    HoleOutside(usize),
    #[error("degenerate bounding box [{xmin}, {xmax}] x [{ymin}, {ymax}]")]
    DegenerateBox { xmin: f64, xmax: f64, ymin: f64, ymax: f64 },
    #[error("zone set must contain at least one zone")]
    EmptyZoneSet,
    #[error("zone {zone} has a vertex outside the bounding box")]
    OutsideBox { zone: String },
    #[error("latitude {0} outside the supported range of +/-85 degrees")]
    LatitudeRange(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point2D {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned rectangle `[xmin, xmax] x [ymin, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl BoundingBox {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self, GeometryError> {
        let all_finite = [xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite());
        if !all_finite || xmin >= xmax || ymin >= ymax {
            return Err(GeometryError::DegenerateBox { xmin, xmax, ymin, ymax });
        }
        Ok(Self { xmin, xmax, ymin, ymax })
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    /// Grown by `margin` on every side.
    pub fn expanded(&self, margin: f64) -> Self {
        Self {
            xmin: self.xmin - margin,
            xmax: self.xmax + margin,
            ymin: self.ymin - margin,
            ymax: self.ymax + margin,
        }
    }

    pub fn intersects(&self, other: &BoundingBox) -> bool {
        self.xmin <= other.xmax && other.xmin <= self.xmax && self.ymin <= other.ymax && other.ymin <= self.ymax
    }

    fn of_points(points: &[Point2D]) -> Self {
        let mut b = Self {
            xmin: f64::INFINITY,
            xmax: f64::NEG_INFINITY,
            ymin: f64::INFINITY,
            ymax: f64::NEG_INFINITY,
        };
        for p in points {
            b.xmin = b.xmin.min(p.x);
            b.xmax = b.xmax.max(p.x);
            b.ymin = b.ymin.min(p.y);
            b.ymax = b.ymax.max(p.y);
        }
        b
    }
}

impl FromStr for BoundingBox {
    type Err = String;

    /// Parses `"xmin,ymin,xmax,ymax"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("bad bbox component {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        match parts.as_slice() {
            [xmin, ymin, xmax, ymax] => Self::new(*xmin, *ymin, *xmax, *ymax).map_err(|e| e.to_string()),
            _ => Err(format!("expected 4 comma-separated values, got {}", parts.len())),
        }
    }
}

/// Closed polygonal ring; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    vertices: Vec<Point2D>,
}

impl Ring {
    pub fn new(vertices: Vec<Point2D>) -> Result<Self, GeometryError> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        let n = vertices.len();
        if let Some(k) = (0..n).find(|&k| vertices[k] == vertices[(k + 1) % n]) {
            return Err(GeometryError::RepeatedVertex(k));
        }
        let ring = Self { vertices };
        if ring.signed_area() == 0.0 {
            return Err(GeometryError::ZeroArea);
        }
        Ok(ring)
    }

    /// Drops an explicit closing vertex and consecutive duplicates, then validates.
    pub fn cleaned(mut vertices: Vec<Point2D>) -> Result<Self, GeometryError> {
        vertices.dedup();
        while vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point2D] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edges as `(start, end)` pairs, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point2D, Point2D)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Shoelace area; positive for counter-clockwise rings.
    pub fn signed_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > 0.0
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Self { vertices }
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::of_points(&self.vertices)
    }

    /// Returns the first pair of crossing or touching non-adjacent edges.
    pub fn find_self_intersection(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        let edge = |k: usize| (self.vertices[k], self.vertices[(k + 1) % n]);
        for a in 0..n {
            let (p1, p2) = edge(a);
            // adjacent edges may only share their common vertex
            let (_, next) = edge((a + 1) % n);
            if folds_back(p1, p2, next) {
                return Some((a, (a + 1) % n));
            }
            for b in (a + 2)..n {
                if a == 0 && b == n - 1 {
                    continue;
                }
                let (q1, q2) = edge(b);
                if segments_intersect(p1, p2, q1, q2) {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// True if `b -> c` folds back over `a -> b` (a zero-width spike).
fn folds_back(a: Point2D, b: Point2D, c: Point2D) -> bool {
    let cross = (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x);
    let dot = (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y);
    cross == 0.0 && dot < 0.0
}

pub(crate) fn shoelace(vertices: &[Point2D]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for k in 0..n {
        let a = vertices[k];
        let b = vertices[(k + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

/// Semantic zone category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Building,
    Park,
    Residential,
    Road,
    Campus,
    Commercial,
    Industrial,
    Water,
    Other,
}

impl Category {
    pub const ALL: [Category; 9] = [
        Category::Building,
        Category::Park,
        Category::Residential,
        Category::Road,
        Category::Campus,
        Category::Commercial,
        Category::Industrial,
        Category::Water,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Building => "building",
            Category::Park => "park",
            Category::Residential => "residential",
            Category::Road => "road",
            Category::Campus => "campus",
            Category::Commercial => "commercial",
            Category::Industrial => "industrial",
            Category::Water => "water",
            Category::Other => "other",
        }
    }

    pub fn tag(self) -> u8 {
        Self::ALL.iter().position(|c| *c == self).expect("listed") as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.get(tag as usize).copied()
    }

    /// Lenient mapping from OSM-style tags; unknown values become `Other`.
    pub fn parse_lenient(s: &str) -> Self {
        match s.trim().to_ascii_lowercase().as_str() {
            "building" | "buildings" => Category::Building,
            "park" | "parks" | "garden" | "leisure" => Category::Park,
            "residential" => Category::Residential,
            "road" | "roads" | "highway" | "street" => Category::Road,
            "campus" | "campuses" | "university" | "school" => Category::Campus,
            "commercial" | "retail" => Category::Commercial,
            "industrial" => Category::Industrial,
            "water" | "waterway" => Category::Water,
            _ => Category::Other,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A zone: one exterior ring (counter-clockwise) and any number of holes
/// (clockwise).
#[derive(Debug, Clone, PartialEq)]
pub struct ZonePolygon {
    pub id: String,
    pub category: Category,
    exterior: Ring,
    holes: Vec<Ring>,
    bbox: BoundingBox,
}

impl ZonePolygon {
    /// Normalizes orientation and rejects self-intersecting rings or holes
    /// that escape the exterior.
    pub fn new(id: impl Into<String>, category: Category, exterior: Ring, holes: Vec<Ring>) -> Result<Self, GeometryError> {
        for ring in std::iter::once(&exterior).chain(&holes) {
            if let Some((a, b)) = ring.find_self_intersection() {
                return Err(GeometryError::SelfIntersecting(a, b));
            }
        }
        Self::assemble(id.into(), category, exterior, holes)
    }

    /// Like [`ZonePolygon::new`] but skips the self-intersection scan. Used
    /// for rings produced by clipping an already validated zone, which may
    /// touch themselves along the clip rectangle.
    pub(crate) fn from_clipped(id: String, category: Category, exterior: Ring, holes: Vec<Ring>) -> Result<Self, GeometryError> {
        Self::assemble(id, category, exterior, holes)
    }

    fn assemble(id: String, category: Category, exterior: Ring, holes: Vec<Ring>) -> Result<Self, GeometryError> {
        let exterior = if exterior.is_ccw() { exterior } else { exterior.reversed() };
        let shell = Self {
            id: id.clone(),
            category,
            bbox: exterior.bbox(),
            exterior: exterior.clone(),
            holes: Vec::new(),
        };
        let mut normalized = Vec::with_capacity(holes.len());
        for (k, hole) in holes.into_iter().enumerate() {
            if !hole.vertices().iter().all(|v| contains(&shell, v)) {
                return Err(GeometryError::HoleOutside(k));
            }
            normalized.push(if hole.is_ccw() { hole.reversed() } else { hole });
        }
        Ok(Self {
            holes: normalized,
            ..shell
        })
    }

    /// Convenience constructor for a hole-free zone from raw coordinates.
    pub fn simple(id: impl Into<String>, category: Category, coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        let ring = Ring::cleaned(coords.iter().copied().map(Point2D::from).collect())?;
        Self::new(id, category, ring, Vec::new())
    }

    pub fn rect(id: impl Into<String>, category: Category, b: &BoundingBox) -> Self {
        Self::simple(
            id,
            category,
            &[(b.xmin, b.ymin), (b.xmax, b.ymin), (b.xmax, b.ymax), (b.xmin, b.ymax)],
        )
        .expect("a nondegenerate rectangle is a valid zone")
    }

    pub fn exterior(&self) -> &Ring {
        &self.exterior
    }

    pub fn holes(&self) -> &[Ring] {
        &self.holes
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    /// Exterior area minus hole areas.
    pub fn area(&self) -> f64 {
        self.exterior.signed_area().abs() - self.holes.iter().map(|h| h.signed_area().abs()).sum::<f64>()
    }
}

/// The public zone collection together with its region bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneSet {
    zones: Vec<ZonePolygon>,
    bbox: BoundingBox,
}

impl ZoneSet {
    pub fn new(zones: Vec<ZonePolygon>, bbox: BoundingBox) -> Result<Self, GeometryError> {
        if zones.is_empty() {
            return Err(GeometryError::EmptyZoneSet);
        }
        let slack = bbox.expanded(EDGE_TOLERANCE * bbox.width().max(bbox.height()).max(1.0));
        for z in &zones {
            if z.rings().flat_map(|r| r.vertices()).any(|v| !slack.contains(v)) {
                return Err(GeometryError::OutsideBox { zone: z.id.clone() });
            }
        }
        Ok(Self { zones, bbox })
    }

    pub fn zones(&self) -> &[ZonePolygon] {
        &self.zones
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn len(&self) -> usize {
        self.zones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zones.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.zones.iter().map(|z| z.id.clone()).collect()
    }
}
