//! Proof objects and their binary encoding.
//!
//! "ZSTK" | version u16 | config | statement | trace root | composition root |
//! ood point, trace values, composition value | FRI roots | final coefficients |
//! query openings. Integers are little-endian, digests raw, field elements
//! canonical `u64`. Merkle path lengths are implied by the configuration.

use std::path::Path;

use crate::commit::{Digest, MerklePath};
use crate::discretize::StrategyKind;
use crate::field::FieldElement as F;

use super::trace::{PublicRow, PublicStatement};
use super::{tree_depth, AirConfig, StarkError};

pub const PROOF_MAGIC: &[u8; 4] = b"ZSTK";
pub const PROOF_VERSION: u16 = 1;

const TAU_SCALE: f64 = 4_294_967_296.0;

/// Openings for one FRI query index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryOpening {
    /// Row of the witness LDE.
    pub trace: MerklePath,
    pub composition: MerklePath,
    /// One value pair per FRI layer.
    pub layers: Vec<MerklePath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarkProof {
    pub statement: PublicStatement,
    pub trace_root: Digest,
    pub composition_root: Digest,
    pub ood_point: F,
    pub ood_trace: Vec<F>,
    pub ood_composition: F,
    pub fri_roots: Vec<Digest>,
    pub fri_final: Vec<F>,
    pub queries: Vec<QueryOpening>,
}

impl StarkProof {
    pub fn config(&self) -> &AirConfig {
        &self.statement.config
    }

    /// Encoded size in bytes.
    pub fn size_bytes(&self) -> usize {
        encode_proof(self).len()
    }

    /// Merkle paths carried by the query phase.
    pub fn query_path_count(&self) -> usize {
        self.queries.iter().map(|q| 2 + q.layers.len()).sum()
    }
}

/// Leaves of a table committed under the given configuration.
pub(crate) fn table_leaf_count(cfg: &AirConfig, zone_count: u32) -> Option<usize> {
    let side = if cfg.strategy.is_boolean() { cfg.r as usize } else { cfg.r as usize + 1 };
    side.checked_mul(side)?.checked_mul(zone_count as usize)
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

fn put_config(out: &mut Vec<u8>, cfg: &AirConfig) {
    out.push(cfg.strategy.tag());
    let tau = match cfg.strategy {
        StrategyKind::Voting { tau } => (tau * TAU_SCALE).round() as u64,
        _ => 0,
    };
    out.extend_from_slice(&tau.to_le_bytes());
    out.extend_from_slice(&cfg.r.to_le_bytes());
    put_u32(out, cfg.rows);
    put_u32(out, cfg.blowup);
    put_u32(out, cfg.fri_query_count);
    out.push(cfg.trace_scale_bits as u8);
    put_u32(out, cfg.fri_final_degree);
}

fn put_statement(out: &mut Vec<u8>, st: &PublicStatement) {
    out.extend_from_slice(st.table_root.as_bytes());
    out.extend_from_slice(&st.zone_count.to_le_bytes());
    put_u32(out, st.rows.len());
    for row in &st.rows {
        out.extend_from_slice(&row.zone.to_le_bytes());
        out.extend_from_slice(&row.i.to_le_bytes());
        out.extend_from_slice(&row.j.to_le_bytes());
        out.push(row.out as u8);
        for path in &row.openings {
            path.write_to(out);
        }
    }
}

/// Canonical bytes of the configuration and statement; the first transcript message.
pub(crate) fn statement_bytes(st: &PublicStatement) -> Vec<u8> {
    let mut out = Vec::new();
    put_config(&mut out, &st.config);
    put_statement(&mut out, st);
    out
}

pub fn encode_proof(proof: &StarkProof) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(PROOF_MAGIC);
    out.extend_from_slice(&PROOF_VERSION.to_le_bytes());
    out.extend_from_slice(&statement_bytes(&proof.statement));
    out.extend_from_slice(proof.trace_root.as_bytes());
    out.extend_from_slice(proof.composition_root.as_bytes());
    out.extend_from_slice(&proof.ood_point.to_le_bytes());
    put_u32(&mut out, proof.ood_trace.len());
    for v in &proof.ood_trace {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&proof.ood_composition.to_le_bytes());
    put_u32(&mut out, proof.fri_roots.len());
    for r in &proof.fri_roots {
        out.extend_from_slice(r.as_bytes());
    }
    put_u32(&mut out, proof.fri_final.len());
    for v in &proof.fri_final {
        out.extend_from_slice(&v.to_le_bytes());
    }
    put_u32(&mut out, proof.queries.len());
    for q in &proof.queries {
        q.trace.write_to(&mut out);
        q.composition.write_to(&mut out);
        for l in &q.layers {
            l.write_to(&mut out);
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], StarkError> {
        if self.buf.len() < n {
            return Err(StarkError::Format("unexpected end of data".into()));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8, StarkError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, StarkError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32, StarkError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, StarkError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn field(&mut self) -> Result<F, StarkError> {
        let raw = self.u64()?;
        F::from_canonical(raw).map_err(|_| StarkError::Format(format!("non-canonical field element {raw}")))
    }

    fn digest(&mut self) -> Result<Digest, StarkError> {
        Ok(Digest(self.take(32)?.try_into().expect("32 bytes")))
    }

    fn path(&mut self, depth: usize) -> Result<MerklePath, StarkError> {
        MerklePath::read_from(&mut self.buf, depth).map_err(|e| StarkError::Format(e.to_string()))
    }

    /// Count of a repeated section, bounded to keep hostile files cheap.
    fn count(&mut self, max: usize, what: &str) -> Result<usize, StarkError> {
        let n = self.u32()? as usize;
        if n > max {
            return Err(StarkError::Format(format!("{what} count {n} exceeds {max}")));
        }
        Ok(n)
    }
}

fn read_config(rd: &mut Reader) -> Result<AirConfig, StarkError> {
    let tag = rd.u8()?;
    let tau = rd.u64()?;
    let strategy = match tag {
        0 => StrategyKind::CenterPoint,
        1 => StrategyKind::Voting {
            tau: tau as f64 / TAU_SCALE,
        },
        2 => StrategyKind::DistanceAware,
        t => return Err(StarkError::Format(format!("unknown strategy tag {t}"))),
    };
    let cfg = AirConfig {
        strategy,
        r: rd.u32()?,
        rows: rd.u32()? as usize,
        blowup: rd.u32()? as usize,
        fri_query_count: rd.u32()? as usize,
        trace_scale_bits: rd.u8()? as u32,
        fri_final_degree: rd.u32()? as usize,
    };
    cfg.validate().map_err(|e| StarkError::Format(e.to_string()))?;
    Ok(cfg)
}

pub fn decode_proof(bytes: &[u8]) -> Result<StarkProof, StarkError> {
    let mut rd = Reader { buf: bytes };
    if rd.take(4)? != PROOF_MAGIC {
        return Err(StarkError::Format("bad magic".into()));
    }
    let version = rd.u16()?;
    if version != PROOF_VERSION {
        return Err(StarkError::Format(format!("unsupported version {version}")));
    }
    let config = read_config(&mut rd)?;
    let air = config.air();

    let table_root = rd.digest()?;
    let zone_count = rd.u32()?;
    let leaves = table_leaf_count(&config, zone_count)
        .ok_or_else(|| StarkError::Format("table size overflows".into()))?;
    let table_depth = tree_depth(leaves);
    let row_count = rd.count(config.rows, "statement row")?;
    let mut rows = Vec::with_capacity(row_count);
    for _ in 0..row_count {
        let zone = rd.u32()?;
        let i = rd.u32()?;
        let j = rd.u32()?;
        let out = match rd.u8()? {
            0 => false,
            1 => true,
            b => return Err(StarkError::Format(format!("output byte {b} is not 0 or 1"))),
        };
        let openings = (0..air.openings_per_row())
            .map(|_| rd.path(table_depth))
            .collect::<Result<_, _>>()?;
        rows.push(PublicRow { zone, i, j, out, openings });
    }
    let statement = PublicStatement {
        config,
        table_root,
        zone_count,
        rows,
    };

    let big = config.lde_size();
    let lde_depth = tree_depth(big);
    let trace_root = rd.digest()?;
    let composition_root = rd.digest()?;
    let ood_point = rd.field()?;
    let width = rd.count(air.witness_width, "out-of-domain value")?;
    let ood_trace = (0..width).map(|_| rd.field()).collect::<Result<_, _>>()?;
    let ood_composition = rd.field()?;
    let layer_count = rd.count(lde_depth.saturating_sub(1), "FRI layer")?;
    let fri_roots = (0..layer_count).map(|_| rd.digest()).collect::<Result<_, _>>()?;
    let final_count = rd.count(big >> layer_count, "final coefficient")?;
    let fri_final = (0..final_count).map(|_| rd.field()).collect::<Result<_, _>>()?;
    let query_count = rd.count(big, "query")?;
    let mut queries = Vec::with_capacity(query_count);
    for _ in 0..query_count {
        let trace = rd.path(lde_depth)?;
        let composition = rd.path(lde_depth)?;
        let layers = (0..layer_count)
            .map(|t| rd.path(lde_depth - t - 1))
            .collect::<Result<_, _>>()?;
        queries.push(QueryOpening {
            trace,
            composition,
            layers,
        });
    }
    if !rd.buf.is_empty() {
        return Err(StarkError::Format(format!("{} trailing bytes", rd.buf.len())));
    }
    Ok(StarkProof {
        statement,
        trace_root,
        composition_root,
        ood_point,
        ood_trace,
        ood_composition,
        fri_roots,
        fri_final,
        queries,
    })
}

pub fn write_proof(proof: &StarkProof, path: &Path) -> Result<(), StarkError> {
    std::fs::write(path, encode_proof(proof))?;
    Ok(())
}

pub fn read_proof(path: &Path) -> Result<StarkProof, StarkError> {
    decode_proof(&std::fs::read(path)?)
}
