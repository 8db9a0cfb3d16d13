//! GeoJSON import and export of zone sets.
//!
//! Coordinates are longitude/latitude and are projected to a local metric
//! frame around an origin. Exports carry a `"zstark"` foreign member with
//! the origin and the region box so they can be re-imported without extra
//! arguments.

use std::collections::BTreeMap;
use std::path::Path;

use log::{debug, info};
use serde_json::{json, Value};

use crate::geometry::{
    clip_polygon_to_rect, project_lonlat, unproject, BoundingBox, Category, Point2D, Ring, ZonePolygon, ZoneSet,
};

use super::{read_file, HarnessError};

/// Region box and projection origin recorded in an export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoFrame {
    pub origin: (f64, f64),
    /// Longitude/latitude box: `xmin = lon_min`, `ymin = lat_min`, ...
    pub bbox_lonlat: BoundingBox,
}

impl GeoFrame {
    /// The region box in projected meters.
    pub fn projected_bbox(&self) -> Result<BoundingBox, HarnessError> {
        let b = self.bbox_lonlat;
        let pts = project_lonlat(&[(b.xmin, b.ymin), (b.xmax, b.ymax)], self.origin)?;
        Ok(BoundingBox::new(pts[0].x, pts[0].y, pts[1].x, pts[1].y)?)
    }

    /// The frame whose projected box is `bbox` around `origin`.
    pub fn around(origin: (f64, f64), bbox: &BoundingBox) -> Result<Self, HarnessError> {
        let corners = unproject(&[Point2D::new(bbox.xmin, bbox.ymin), Point2D::new(bbox.xmax, bbox.ymax)], origin);
        Ok(Self {
            origin,
            bbox_lonlat: BoundingBox::new(corners[0].0, corners[0].1, corners[1].0, corners[1].1)?,
        })
    }
}

fn ring_coords(ring: &Ring, origin: (f64, f64)) -> Value {
    let mut coords = unproject(ring.vertices(), origin);
    coords.push(coords[0]);
    Value::Array(coords.into_iter().map(|(lon, lat)| json!([lon, lat])).collect())
}

/// Serializes a zone set as a FeatureCollection in longitude/latitude.
pub fn export_geojson(zones: &ZoneSet, origin: (f64, f64)) -> Result<String, HarnessError> {
    let frame = GeoFrame::around(origin, &zones.bbox())?;
    let b = frame.bbox_lonlat;
    let features: Vec<Value> = zones
        .zones()
        .iter()
        .map(|z| {
            let rings: Vec<Value> = z.rings().map(|r| ring_coords(r, origin)).collect();
            json!({
                "type": "Feature",
                "properties": { "id": z.id, "category": z.category.as_str() },
                "geometry": { "type": "Polygon", "coordinates": rings },
            })
        })
        .collect();
    let doc = json!({
        "type": "FeatureCollection",
        "zstark": { "origin": [origin.0, origin.1], "bbox": [b.xmin, b.ymin, b.xmax, b.ymax] },
        "features": features,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

fn err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Parse(msg.into())
}

fn number_list(v: &Value, len: usize, what: &str) -> Result<Vec<f64>, HarnessError> {
    let arr = v.as_array().filter(|a| a.len() == len).ok_or_else(|| err(format!("{what} must hold {len} numbers")))?;
    arr.iter()
        .map(|x| x.as_f64().ok_or_else(|| err(format!("{what} must hold numbers"))))
        .collect()
}

/// Reads the `"zstark"` member of an export, if present.
pub fn frame_of(doc: &Value) -> Result<Option<GeoFrame>, HarnessError> {
    let Some(meta) = doc.get("zstark") else {
        return Ok(None);
    };
    let o = number_list(meta.get("origin").unwrap_or(&Value::Null), 2, "zstark.origin")?;
    let b = number_list(meta.get("bbox").unwrap_or(&Value::Null), 4, "zstark.bbox")?;
    Ok(Some(GeoFrame {
        origin: (o[0], o[1]),
        bbox_lonlat: BoundingBox::new(b[0], b[1], b[2], b[3])?,
    }))
}

fn parse_ring(v: &Value, origin: (f64, f64)) -> Result<Ring, String> {
    let pts = v.as_array().ok_or("ring is not an array")?;
    let lonlat = pts
        .iter()
        .map(|p| match p.as_array().map(Vec::as_slice) {
            Some([lon, lat, ..]) => match (lon.as_f64(), lat.as_f64()) {
                (Some(lon), Some(lat)) => Ok((lon, lat)),
                _ => Err("coordinate is not numeric".to_string()),
            },
            _ => Err("position needs longitude and latitude".to_string()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let projected = project_lonlat(&lonlat, origin).map_err(|e| e.to_string())?;
    Ring::cleaned(projected).map_err(|e| e.to_string())
}

fn parse_polygon(v: &Value, id: String, category: Category, origin: (f64, f64)) -> Result<ZonePolygon, String> {
    let rings = v.as_array().filter(|r| !r.is_empty()).ok_or("polygon needs at least one ring")?;
    let exterior = parse_ring(&rings[0], origin).map_err(|e| format!("exterior: {e}"))?;
    let holes = rings[1..]
        .iter()
        .enumerate()
        .map(|(k, r)| parse_ring(r, origin).map_err(|e| format!("hole {k}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    ZonePolygon::new(id, category, exterior, holes).map_err(|e| e.to_string())
}

fn feature_zones(feature: &Value, k: usize, origin: (f64, f64)) -> Result<Vec<ZonePolygon>, String> {
    if feature.get("type").and_then(Value::as_str) != Some("Feature") {
        return Err("not a Feature".into());
    }
    let props = feature.get("properties").filter(|p| !p.is_null());
    let id = match props.and_then(|p| p.get("id")).or_else(|| feature.get("id")) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => format!("feature-{k}"),
    };
    let category = props
        .and_then(|p| p.get("category"))
        .and_then(Value::as_str)
        .map_or(Category::Other, Category::parse_lenient);
    let geometry = feature.get("geometry").ok_or("missing geometry")?;
    let coords = geometry.get("coordinates").ok_or("missing coordinates")?;
    match geometry.get("type").and_then(Value::as_str) {
        Some("Polygon") => Ok(vec![parse_polygon(coords, id, category, origin)?]),
        Some("MultiPolygon") => {
            let parts = coords.as_array().ok_or("MultiPolygon coordinates are not an array")?;
            parts
                .iter()
                .enumerate()
                .map(|(p, part)| parse_polygon(part, format!("{id}-{p}"), category, origin).map_err(|e| format!("part {p}: {e}")))
                .collect()
        }
        Some(other) => Err(format!("unsupported geometry type {other}")),
        None => Err("geometry has no type".into()),
    }
}

fn clip_to(zone: ZonePolygon, bbox: &BoundingBox) -> Result<Option<ZonePolygon>, HarnessError> {
    let zb = zone.bbox();
    if zb.xmin >= bbox.xmin && zb.xmax <= bbox.xmax && zb.ymin >= bbox.ymin && zb.ymax <= bbox.ymax {
        return Ok(Some(zone));
    }
    let mut rings = clip_polygon_to_rect(&zone, bbox);
    if rings.is_empty() {
        debug!("zone {} lies outside the region box", zone.id);
        return Ok(None);
    }
    let exterior = rings.remove(0);
    Ok(Some(ZonePolygon::from_clipped(zone.id, zone.category, exterior, rings)?))
}

/// Parses a FeatureCollection, projects it around the frame origin and
/// clips every zone to the frame box. Any invalid feature fails the whole
/// import with one diagnostic per offending feature.
pub fn parse_geojson(text: &str, frame: Option<GeoFrame>) -> Result<ZoneSet, HarnessError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| err(e.to_string()))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(err("top-level object is not a FeatureCollection"));
    }
    let frame = match frame {
        Some(f) => f,
        None => frame_of(&doc)?.ok_or_else(|| err("no region box or origin given and none embedded"))?,
    };
    let bbox = frame.projected_bbox()?;
    let features = doc.get("features").and_then(Value::as_array).ok_or_else(|| err("missing features array"))?;

    let mut zones = Vec::new();
    let mut problems = Vec::new();
    for (k, feature) in features.iter().enumerate() {
        match feature_zones(feature, k, frame.origin) {
            Ok(parts) => zones.extend(parts),
            Err(e) => problems.push(format!("feature {k}: {e}")),
        }
    }
    if !problems.is_empty() {
        return Err(HarnessError::InvalidFeatures(problems));
    }
    let mut kept = Vec::with_capacity(zones.len());
    for z in zones {
        kept.extend(clip_to(z, &bbox)?);
    }
    if kept.is_empty() {
        return Err(HarnessError::EmptyZoneSet);
    }
    let mut histogram = BTreeMap::new();
    for z in &kept {
        *histogram.entry(z.category.as_str()).or_insert(0usize) += 1;
    }
    info!("ingested {} zones: {histogram:?}", kept.len());
    Ok(ZoneSet::new(kept, bbox)?)
}

/// Reads and imports a GeoJSON file; see [`parse_geojson`].
pub fn ingest(path: &Path, frame: Option<GeoFrame>) -> Result<ZoneSet, HarnessError> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| err(format!("{} is not UTF-8", path.display())))?;
    parse_geojson(&text, frame)
}
