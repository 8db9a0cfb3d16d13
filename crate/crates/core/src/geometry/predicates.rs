use super::{Point2D, ZonePolygon, EDGE_TOLERANCE};

/// Euclidean distance from `p` to the closed segment `ab`. A degenerate
/// segment (`a == b`) is treated as a point.
pub fn segment_distance(p: Point2D, a: Point2D, b: Point2D) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.distance(&Point2D::new(a.x + t * dx, a.y + t * dy))
}

fn orient(a: Point2D, b: Point2D, c: Point2D) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point2D, b: Point2D, p: Point2D) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(p1: Point2D, p2: Point2D, q1: Point2D, q2: Point2D) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn boundary_distance(zone: &ZonePolygon, p: Point2D) -> f64 {
    zone.rings()
        .flat_map(|r| r.edges())
        .map(|(a, b)| segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Even-odd crossing parity over every ring of the zone.
fn crossing_parity(zone: &ZonePolygon, p: Point2D) -> bool {
    let mut inside = false;
    for (a, b) in zone.rings().flat_map(|r| r.edges()) {
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}

fn near_bbox(zone: &ZonePolygon, p: Point2D) -> bool {
    zone.bbox().expanded(EDGE_TOLERANCE).contains(&p)
}

/// Point-in-zone test by even-odd ray casting. Points on any boundary edge
/// (within [`EDGE_TOLERANCE`]) are inside.
pub fn contains(zone: &ZonePolygon, p: &Point2D) -> bool {
    let p = *p;
    if !near_bbox(zone, p) {
        return false;
    }
    if boundary_distance(zone, p) <= EDGE_TOLERANCE {
        return true;
    }
    crossing_parity(zone, p)
}

/// Negative inside, positive outside, zero on the boundary. The magnitude is
/// the distance to the nearest edge of any ring.
pub fn signed_distance(zone: &ZonePolygon, p: &Point2D) -> f64 {
    let p = *p;
    let d = boundary_distance(zone, p);
    if d <= EDGE_TOLERANCE {
        0.0
    } else if near_bbox(zone, p) && crossing_parity(zone, p) {
        -d
    } else {
        d
    }
}
