//! Deterministic synthetic corpus: compact buildings, narrow roads and a few
//! large parks or campuses inside a 2 km square.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;

use crate::geometry::{BoundingBox, Category, ZonePolygon, ZoneSet};

pub const CORPUS_SIDE_M: f64 = 2000.0;
pub const CORPUS_BUILDINGS: usize = 30;
pub const CORPUS_ROADS: usize = 20;
pub const CORPUS_PARKS: usize = 10;
/// Geographic anchor used when the corpus is exported as GeoJSON.
pub const CORPUS_ORIGIN: (f64, f64) = (116.39, 39.91);

pub const BUILDING_SIDE_M: (f64, f64) = (8.0, 40.0);
pub const ROAD_WIDTH_M: (f64, f64) = (5.0, 12.0);
pub const ROAD_LENGTH_M: (f64, f64) = (200.0, 1500.0);
pub const PARK_EXTENT_M: (f64, f64) = (100.0, 600.0);
pub const PARK_VERTICES: (usize, usize) = (6, 14);

/// Distance kept between every zone and the corpus boundary.
const MARGIN_M: f64 = 1.0;

pub fn corpus_bbox() -> BoundingBox {
    BoundingBox::new(0.0, 0.0, CORPUS_SIDE_M, CORPUS_SIDE_M).expect("valid square")
}

fn building(rng: &mut Pcg64, k: usize) -> ZonePolygon {
    let w = rng.random_range(BUILDING_SIDE_M.0..=BUILDING_SIDE_M.1);
    let h = rng.random_range(BUILDING_SIDE_M.0..=BUILDING_SIDE_M.1);
    let x = rng.random_range(MARGIN_M..CORPUS_SIDE_M - MARGIN_M - w);
    let y = rng.random_range(MARGIN_M..CORPUS_SIDE_M - MARGIN_M - h);
    let b = BoundingBox::new(x, y, x + w, y + h).expect("positive sides");
    ZonePolygon::rect(format!("building-{k:02}"), Category::Building, &b)
}

fn road(rng: &mut Pcg64, k: usize) -> ZonePolygon {
    let width = rng.random_range(ROAD_WIDTH_M.0..=ROAD_WIDTH_M.1);
    loop {
        let length = rng.random_range(ROAD_LENGTH_M.0..=ROAD_LENGTH_M.1);
        let angle = rng.random_range(0.0..std::f64::consts::PI);
        let (dx, dy) = (angle.cos(), angle.sin());
        let (nx, ny) = (-dy * width / 2.0, dx * width / 2.0);
        let (hx, hy) = (dx * length / 2.0, dy * length / 2.0);
        let reach_x = hx.abs() + nx.abs() + MARGIN_M;
        let reach_y = hy.abs() + ny.abs() + MARGIN_M;
        if 2.0 * reach_x >= CORPUS_SIDE_M || 2.0 * reach_y >= CORPUS_SIDE_M {
            continue;
        }
        let cx = rng.random_range(reach_x..CORPUS_SIDE_M - reach_x);
        let cy = rng.random_range(reach_y..CORPUS_SIDE_M - reach_y);
        let corners = [
            (cx - hx + nx, cy - hy + ny),
            (cx - hx - nx, cy - hy - ny),
            (cx + hx - nx, cy + hy - ny),
            (cx + hx + nx, cy + hy + ny),
        ];
        return ZonePolygon::simple(format!("road-{k:02}"), Category::Road, &corners).expect("strip is a simple quad");
    }
}

/// A star-shaped polygon around a random center, so it is always simple.
fn park(rng: &mut Pcg64, k: usize) -> ZonePolygon {
    let extent = rng.random_range(PARK_EXTENT_M.0..=PARK_EXTENT_M.1);
    let radius = extent / 2.0;
    let n = rng.random_range(PARK_VERTICES.0..=PARK_VERTICES.1);
    let cx = rng.random_range(radius + MARGIN_M..CORPUS_SIDE_M - radius - MARGIN_M);
    let cy = rng.random_range(radius + MARGIN_M..CORPUS_SIDE_M - radius - MARGIN_M);
    let coords: Vec<(f64, f64)> = (0..n)
        .map(|v| {
            let a = (v as f64 + rng.random_range(0.1..0.9)) / n as f64 * std::f64::consts::TAU;
            let rr = radius * rng.random_range(0.6..=1.0);
            (cx + rr * a.cos(), cy + rr * a.sin())
        })
        .collect();
    let category = if k % 2 == 0 { Category::Park } else { Category::Campus };
    ZonePolygon::simple(format!("{}-{k:02}", category.as_str()), category, &coords).expect("star polygon is simple")
}

/// 60 zones, fully determined by `seed`. Overlaps between zones are allowed.
pub fn synth_corpus(seed: u64) -> ZoneSet {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut zones = Vec::with_capacity(CORPUS_BUILDINGS + CORPUS_ROADS + CORPUS_PARKS);
    zones.extend((0..CORPUS_BUILDINGS).map(|k| building(&mut rng, k)));
    zones.extend((0..CORPUS_ROADS).map(|k| road(&mut rng, k)));
    zones.extend((0..CORPUS_PARKS).map(|k| park(&mut rng, k)));
    ZoneSet::new(zones, corpus_bbox()).expect("zones lie inside the corpus box")
}
