use super::{GeometryError, Point2D};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

const MAX_LATITUDE: f64 = 85.0;

fn check_lat(lat: f64) -> Result<(), GeometryError> {
    if !lat.is_finite() || lat.abs() > MAX_LATITUDE {
        return Err(GeometryError::LatitudeRange(lat));
    }
    Ok(())
}

/// Equirectangular projection of `(lon, lat)` degrees around `origin`:
/// `x = R cos(lat0) dlon`, `y = R dlat` with angles in radians.
pub fn project_lonlat(points: &[(f64, f64)], origin: (f64, f64)) -> Result<Vec<Point2D>, GeometryError> {
    let (lon0, lat0) = origin;
    check_lat(lat0)?;
    let kx = EARTH_RADIUS_M * lat0.to_radians().cos();
    points
        .iter()
        .map(|&(lon, lat)| {
            check_lat(lat)?;
            Ok(Point2D::new(kx * (lon - lon0).to_radians(), EARTH_RADIUS_M * (lat - lat0).to_radians()))
        })
        .collect()
}

/// Inverse of [`project_lonlat`].
pub fn unproject(points: &[Point2D], origin: (f64, f64)) -> Vec<(f64, f64)> {
    let (lon0, lat0) = origin;
    let kx = EARTH_RADIUS_M * lat0.to_radians().cos();
    points
        .iter()
        .map(|p| (lon0 + (p.x / kx).to_degrees(), lat0 + (p.y / EARTH_RADIUS_M).to_degrees()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn origin_maps_to_zero() {
        let o = (116.39, 39.91);
        assert_eq!(project_lonlat(&[o], o).unwrap(), vec![Point2D::new(0.0, 0.0)]);
    }

    #[test]
    fn one_millidegree() {
        let expected = 6_371_000.0 * std::f64::consts::PI / 180.0 * 0.001;
        assert!((expected - 111.19).abs() < 0.01);
        let north = project_lonlat(&[(116.39, 39.911)], (116.39, 39.91)).unwrap()[0];
        assert!((north.y - expected).abs() < 1e-6);
        let east = project_lonlat(&[(10.001, 0.0)], (10.0, 0.0)).unwrap()[0];
        assert!((east.x - expected).abs() < 1e-6);
    }

    #[test]
    fn polar_latitudes_rejected() {
        assert!(project_lonlat(&[(0.0, 89.0)], (0.0, 0.0)).is_err());
        assert!(project_lonlat(&[(0.0, 0.0)], (0.0, -86.0)).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(lon0 in -180.0..180.0f64, lat0 in -80.0..80.0f64, dlon in -0.05..0.05f64, dlat in -0.05..0.05f64) {
            let p = (lon0 + dlon, lat0 + dlat);
            let projected = project_lonlat(&[p], (lon0, lat0)).unwrap();
            let back = unproject(&projected, (lon0, lat0))[0];
            prop_assert!((back.0 - p.0).abs() < 1e-9 && (back.1 - p.1).abs() < 1e-9);
        }
    }
}
