//! Binary table files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "ZTBL" | version u16 | strategy u8 | [tau u64, scale 2^32, voting only]
//! | r u32 | zone count u32 | bbox 4 x f64 (xmin, ymin, xmax, ymax)
//! | zone ids (u32 length + UTF-8 bytes each)
//! | payload u64 field encodings in (zone, j, i) order
//! | 32-byte commitment root
//! ```

use std::fs;
use std::path::Path;

use super::{BoolTable, GridSpec, LookupTable, SdfTable, StrategyKind, TableBundle, TableError, SDF_SCALE_BITS, TAU_SCALE};
use crate::commit::Digest;
use crate::field::{FieldElement, FixedPoint};
use crate::geometry::BoundingBox;

pub const TABLE_MAGIC: &[u8; 4] = b"ZTBL";
pub const TABLE_VERSION: u16 = 1;


pub fn encode_table(bundle: &TableBundle) -> Vec<u8> {
    let grid = bundle.grid();
    let mut out = Vec::new();
    out.extend_from_slice(TABLE_MAGIC);
    out.extend_from_slice(&TABLE_VERSION.to_le_bytes());
    out.push(bundle.strategy.tag());
    if let StrategyKind::Voting { tau } = bundle.strategy {
        out.extend_from_slice(&((tau * TAU_SCALE).round() as u64).to_le_bytes());
    }
    out.extend_from_slice(&grid.r().to_le_bytes());
    out.extend_from_slice(&(bundle.zone_count() as u32).to_le_bytes());
    let b = grid.bbox();
    for v in [b.xmin, b.ymin, b.xmax, b.ymax] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for id in bundle.table.zone_ids() {
        out.extend_from_slice(&(id.len() as u32).to_le_bytes());
        out.extend_from_slice(id.as_bytes());
    }
    out.extend_from_slice(&bundle.table.leaf_bytes());
    out.extend_from_slice(bundle.commitment_root.as_bytes());
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], TableError> {
        if self.buf.len() < n {
            return Err(TableError::Format("unexpected end of file".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], TableError> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32, TableError> {
        Ok(u32::from_le_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64, TableError> {
        Ok(u64::from_le_bytes(self.array()?))
    }

    fn f64(&mut self) -> Result<f64, TableError> {
        Ok(f64::from_le_bytes(self.array()?))
    }
}

pub fn decode_table(bytes: &[u8]) -> Result<TableBundle, TableError> {
    let mut rd = Reader { buf: bytes };
    if rd.take(4)? != TABLE_MAGIC {
        return Err(TableError::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes(rd.array()?);
    if version != TABLE_VERSION {
        return Err(TableError::Format(format!("unsupported version {version}")));
    }
    let strategy = match rd.array::<1>()?[0] {
        0 => StrategyKind::CenterPoint,
        1 => StrategyKind::Voting {
            tau: rd.u64()? as f64 / TAU_SCALE,
        },
        2 => StrategyKind::DistanceAware,
        t => return Err(TableError::Format(format!("unknown strategy tag {t}"))),
    };
    let r = rd.u32()?;
    let zone_count = rd.u32()? as usize;
    let (xmin, ymin, xmax, ymax) = (rd.f64()?, rd.f64()?, rd.f64()?, rd.f64()?);
    let bbox = BoundingBox::new(xmin, ymin, xmax, ymax).map_err(|e| TableError::Format(e.to_string()))?;
    let grid = GridSpec::new(bbox, r)?;
    let mut zone_ids = Vec::with_capacity(zone_count.min(1 << 16));
    for _ in 0..zone_count {
        let len = rd.u32()? as usize;
        let raw = rd.take(len)?;
        zone_ids.push(String::from_utf8(raw.to_vec()).map_err(|e| TableError::Format(e.to_string()))?);
    }
    let per_zone = match strategy {
        StrategyKind::DistanceAware => grid.vertex_count(),
        _ => grid.cell_count(),
    };
    let mut entries = Vec::with_capacity(zone_count);
    for _ in 0..zone_count {
        let mut zone = Vec::with_capacity(per_zone);
        for _ in 0..per_zone {
            let v = rd.u64()?;
            zone.push(FieldElement::from_canonical(v).map_err(|e| TableError::Format(e.to_string()))?);
        }
        entries.push(zone);
    }
    let footer = Digest(rd.array()?);
    if !rd.buf.is_empty() {
        return Err(TableError::Format(format!("{} trailing bytes", rd.buf.len())));
    }

    let table = match strategy {
        StrategyKind::DistanceAware => {
            let values = entries
                .into_iter()
                .map(|zone| {
                    zone.into_iter()
                        .map(|f| FixedPoint::from_field(f, SDF_SCALE_BITS).map_err(|e| TableError::Format(e.to_string())))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            LookupTable::Sdf(SdfTable { grid, zone_ids, values })
        }
        _ => {
            let bits = entries
                .into_iter()
                .map(|zone| {
                    zone.into_iter()
                        .map(|f| match f.value() {
                            0 => Ok(false),
                            1 => Ok(true),
                            v => Err(TableError::Format(format!("boolean entry {v}"))),
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            LookupTable::Bool(BoolTable { grid, zone_ids, bits })
        }
    };
    let bundle = TableBundle::new(strategy, table)?;
    if bundle.commitment_root != footer {
        return Err(TableError::Commitment {
            footer,
            computed: bundle.commitment_root,
        });
    }
    Ok(bundle)
}

pub fn write_table(bundle: &TableBundle, path: &Path) -> Result<(), TableError> {
    fs::write(path, encode_table(bundle))?;
    Ok(())
}

/// Reads a table file and checks its commitment footer.
pub fn read_table(path: &Path) -> Result<TableBundle, TableError> {
    decode_table(&fs::read(path)?)
}
