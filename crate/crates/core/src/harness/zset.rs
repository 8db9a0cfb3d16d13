//! Binary zone-set files.
//!
//! "ZSET" | version u16 | bbox 4 x f64 | zone count u32 | per zone:
//! id (u32 length + UTF-8) | category u8 | ring count u32 | per ring:
//! vertex count u32 + (x, y) f64 pairs. The first ring is the exterior.

use std::path::Path;

use crate::geometry::{BoundingBox, Category, Point2D, Ring, ZonePolygon, ZoneSet};

use super::geojson::parse_geojson;
use super::{read_file, write_file, HarnessError};

pub const ZONES_MAGIC: &[u8; 4] = b"ZSET";
pub const ZONES_VERSION: u16 = 1;

pub fn encode_zones(zones: &ZoneSet) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(ZONES_MAGIC);
    out.extend_from_slice(&ZONES_VERSION.to_le_bytes());
    let b = zones.bbox();
    for v in [b.xmin, b.ymin, b.xmax, b.ymax] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(zones.len() as u32).to_le_bytes());
    for z in zones.zones() {
        out.extend_from_slice(&(z.id.len() as u32).to_le_bytes());
        out.extend_from_slice(z.id.as_bytes());
        out.push(z.category.tag());
        let rings: Vec<&Ring> = z.rings().collect();
        out.extend_from_slice(&(rings.len() as u32).to_le_bytes());
        for r in rings {
            out.extend_from_slice(&(r.len() as u32).to_le_bytes());
            for p in r.vertices() {
                out.extend_from_slice(&p.x.to_le_bytes());
                out.extend_from_slice(&p.y.to_le_bytes());
            }
        }
    }
    out
}

struct Cursor<'a>(&'a [u8]);

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], HarnessError> {
        if self.0.len() < n {
            return Err(HarnessError::Format("zone file truncated".into()));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, HarnessError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64, HarnessError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_zones(bytes: &[u8]) -> Result<ZoneSet, HarnessError> {
    let mut c = Cursor(bytes);
    if c.take(4)? != ZONES_MAGIC {
        return Err(HarnessError::Format("not a zone file".into()));
    }
    let version = u16::from_le_bytes(c.take(2)?.try_into().expect("2 bytes"));
    if version != ZONES_VERSION {
        return Err(HarnessError::Format(format!("unsupported zone file version {version}")));
    }
    let bbox = BoundingBox::new(c.f64()?, c.f64()?, c.f64()?, c.f64()?)?;
    let count = c.u32()?;
    let mut zones = Vec::new();
    for _ in 0..count {
        let len = c.u32()? as usize;
        let id = String::from_utf8(c.take(len)?.to_vec()).map_err(|_| HarnessError::Format("zone id is not UTF-8".into()))?;
        let tag = c.take(1)?[0];
        let category = Category::from_tag(tag).ok_or_else(|| HarnessError::Format(format!("unknown category tag {tag}")))?;
        let ring_count = c.u32()?;
        let mut rings = Vec::new();
        for _ in 0..ring_count {
            let n = c.u32()?;
            let mut pts = Vec::new();
            for _ in 0..n {
                pts.push(Point2D::new(c.f64()?, c.f64()?));
            }
            rings.push(Ring::new(pts)?);
        }
        if rings.is_empty() {
            return Err(HarnessError::Format(format!("zone {id} has no rings")));
        }
        let exterior = rings.remove(0);
        zones.push(ZonePolygon::from_clipped(id, category, exterior, rings)?);
    }
    if !c.0.is_empty() {
        return Err(HarnessError::Format("trailing bytes after zone file".into()));
    }
    Ok(ZoneSet::new(zones, bbox)?)
}

pub fn write_zones(zones: &ZoneSet, path: &Path) -> Result<(), HarnessError> {
    write_file(path, &encode_zones(zones))
}

/// Loads a zone set from a binary zone file or a GeoJSON export carrying
/// its own region frame.
pub fn load_zones(path: &Path) -> Result<ZoneSet, HarnessError> {
    let bytes = read_file(path)?;
    if bytes.starts_with(ZONES_MAGIC) {
        return decode_zones(&bytes);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| HarnessError::Parse(format!("{} is neither a zone file nor GeoJSON", path.display())))?;
    parse_geojson(&text, None)
}
