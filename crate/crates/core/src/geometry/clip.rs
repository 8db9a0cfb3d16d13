use super::{shoelace, BoundingBox, Point2D, Ring, ZonePolygon};

#[derive(Clone, Copy)]
enum Edge {
    Left(f64),
    Right(f64),
    Bottom(f64),
    Top(f64),
}

impl Edge {
    fn inside(self, p: Point2D) -> bool {
        match self {
            Edge::Left(x) => p.x >= x,
            Edge::Right(x) => p.x <= x,
            Edge::Bottom(y) => p.y >= y,
            Edge::Top(y) => p.y <= y,
        }
    }

    fn crossing(self, a: Point2D, b: Point2D) -> Point2D {
        match self {
            Edge::Left(x) | Edge::Right(x) => {
                let t = (x - a.x) / (b.x - a.x);
                Point2D::new(x, a.y + t * (b.y - a.y))
            }
            Edge::Bottom(y) | Edge::Top(y) => {
                let t = (y - a.y) / (b.y - a.y);
                Point2D::new(a.x + t * (b.x - a.x), y)
            }
        }
    }
}

/// Sutherland–Hodgman clipping of one closed vertex loop.
fn clip_loop(vertices: &[Point2D], rect: &BoundingBox) -> Vec<Point2D> {
    let mut current = vertices.to_vec();
    for edge in [
        Edge::Left(rect.xmin),
        Edge::Right(rect.xmax),
        Edge::Bottom(rect.ymin),
        Edge::Top(rect.ymax),
    ] {
        if current.is_empty() {
            break;
        }
        let input = std::mem::take(&mut current);
        let n = input.len();
        for k in 0..n {
            let cur = input[k];
            let prev = input[(k + n - 1) % n];
            match (edge.inside(prev), edge.inside(cur)) {
                (true, true) => current.push(cur),
                (true, false) => current.push(edge.crossing(prev, cur)),
                (false, true) => {
                    current.push(edge.crossing(prev, cur));
                    current.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    current
}

fn clip_ring(ring: &Ring, rect: &BoundingBox) -> Option<Ring> {
    let out = clip_loop(ring.vertices(), rect);
    if out.len() < 3 || shoelace(&out) == 0.0 {
        return None;
    }
    Ring::cleaned(out).ok()
}

/// Clips a zone to `rect`. The first ring is the clipped exterior
/// (counter-clockwise); the remaining rings are clipped holes (clockwise),
/// so the signed areas of the result sum to the covered area. A zone
/// disjoint from `rect` yields an empty vector.
pub fn clip_polygon_to_rect(zone: &ZonePolygon, rect: &BoundingBox) -> Vec<Ring> {
    if !zone.bbox().intersects(rect) {
        return Vec::new();
    }
    let Some(exterior) = clip_ring(zone.exterior(), rect) else {
        return Vec::new();
    };
    let mut rings = vec![exterior];
    rings.extend(zone.holes().iter().filter_map(|h| clip_ring(h, rect)));
    rings
}

/// Area of `zone ∩ rect`.
pub fn intersection_area(zone: &ZonePolygon, rect: &BoundingBox) -> f64 {
    let zb = zone.bbox();
    if zb.xmin >= rect.xmin && zb.xmax <= rect.xmax && zb.ymin >= rect.ymin && zb.ymax <= rect.ymax {
        return zone.area();
    }
    let area: f64 = clip_polygon_to_rect(zone, rect).iter().map(Ring::signed_area).sum();
    area.clamp(0.0, rect.area())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{contains, Category};
    use rand::{RngExt, SeedableRng};
    use rand_pcg::Pcg64;

    fn rect(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> BoundingBox {
        BoundingBox::new(xmin, ymin, xmax, ymax).unwrap()
    }

    fn unit_square() -> ZonePolygon {
        ZonePolygon::rect("sq", Category::Building, &rect(0., 0., 1., 1.))
    }

    #[test]
    fn half_square() {
        let rings = clip_polygon_to_rect(&unit_square(), &rect(0., 0., 0.5, 1.));
        assert_eq!(rings.len(), 1);
        assert!((rings[0].signed_area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disjoint_is_empty() {
        assert!(clip_polygon_to_rect(&unit_square(), &rect(2., 2., 3., 3.)).is_empty());
        assert_eq!(intersection_area(&unit_square(), &rect(2., 2., 3., 3.)), 0.0);
    }

    #[test]
    fn zone_equal_to_rect() {
        let r = rect(0., 0., 1., 1.);
        assert_eq!(intersection_area(&unit_square(), &r), 1.0);
    }

    #[test]
    fn left_half_plane() {
        let z = ZonePolygon::rect("left", Category::Park, &rect(-10., -10., 0.5, 10.));
        assert!((intersection_area(&z, &rect(0., 0., 1., 1.)) - 0.5).abs() < 1e-12);
    }

    fn monte_carlo_area(zone: &ZonePolygon, r: &BoundingBox, rng: &mut Pcg64) -> f64 {
        let n = 1_000_000;
        let hits = (0..n)
            .filter(|_| {
                let p = Point2D::new(rng.random_range(r.xmin..r.xmax), rng.random_range(r.ymin..r.ymax));
                contains(zone, &p)
            })
            .count();
        hits as f64 / n as f64 * r.area()
    }

    #[test]
    fn triangle_against_monte_carlo() {
        let tri = ZonePolygon::simple("tri", Category::Other, &[(0., 0.), (2., 0.), (0., 2.)]).unwrap();
        let mut rng = Pcg64::seed_from_u64(3);
        for (r, expected) in [(rect(0., 0., 2., 1.), 1.5), (rect(0., 0., 1., 1.), 1.0), (rect(0., 0., 1.5, 1.5), 1.75)] {
            let exact = intersection_area(&tri, &r);
            let mc = monte_carlo_area(&tri, &r, &mut rng);
            assert!((exact - mc).abs() < 1e-2, "exact {exact} vs mc {mc}");
            assert!((exact - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn holes_are_subtracted() {
        let ext = Ring::cleaned([(0., 0.), (4., 0.), (4., 4.), (0., 4.)].map(Point2D::from).to_vec()).unwrap();
        let hole = Ring::cleaned([(1., 1.), (3., 1.), (3., 3.), (1., 3.)].map(Point2D::from).to_vec()).unwrap();
        let z = ZonePolygon::new("donut", Category::Park, ext, vec![hole]).unwrap();
        assert!((intersection_area(&z, &rect(0., 0., 2., 2.)) - 3.0).abs() < 1e-12);
        assert!((intersection_area(&z, &rect(1.5, 1.5, 2.5, 2.5))).abs() < 1e-12);
        assert!((intersection_area(&z, &rect(-1., -1., 5., 5.)) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn grid_partition_sums_to_zone_area() {
        let mut rng = Pcg64::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(5..20);
            let mut angles: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            angles.sort_by(f64::total_cmp);
            let pts: Vec<(f64, f64)> = angles
                .iter()
                .map(|a| {
                    let r = rng.random_range(0.2..0.5);
                    (0.5 + r * a.cos(), 0.5 + r * a.sin())
                })
                .collect();
            let Ok(z) = ZonePolygon::simple("p", Category::Other, &pts) else { continue };
            let cells = 7;
            let w = 1.0 / cells as f64;
            let mut total = 0.0;
            for i in 0..cells {
                for j in 0..cells {
                    let c = rect(i as f64 * w, j as f64 * w, (i + 1) as f64 * w, (j + 1) as f64 * w);
                    let a = intersection_area(&z, &c);
                    assert!(a >= 0.0 && a <= c.area() + 1e-9 && a <= z.area() + 1e-9);
                    total += a;
                }
            }
            assert!((total - z.area()).abs() <= 1e-6 * z.area());
        }
    }
}
