use crate::commit::{Digest, MerklePath};
use crate::discretize::{LookupTable, StrategyKind, TableBundle, TableError};
use crate::field::FieldElement as F;
use crate::geometry::Point2D;

use super::air::{Air, PAYLOAD_BOUND, PUB_I, PUB_J, PUB_OUT, PUB_PAYLOAD, REM_BITS, TRACE_ONE, TRACE_SCALE_BITS};
use super::{AirConfig, StarkError};

/// One membership query: a point and the index of the zone it is tested against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoneQuery {
    pub point: Point2D,
    pub zone: usize,
}

impl ZoneQuery {
    pub fn new(point: Point2D, zone: usize) -> Self {
        Self { point, zone }
    }
}

/// Per-row public data disclosed to the verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicRow {
    pub zone: u32,
    pub i: u32,
    pub j: u32,
    pub out: bool,
    /// One table opening (boolean) or four, in corner order 00, 10, 01, 11.
    pub openings: Vec<MerklePath>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PublicStatement {
    pub config: AirConfig,
    pub table_root: Digest,
    pub zone_count: u32,
    pub rows: Vec<PublicRow>,
}

impl PublicStatement {
    pub fn outputs(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.out).collect()
    }
}

/// Witness and public columns, each of length `rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTable {
    pub(crate) air: Air,
    pub(crate) real_rows: usize,
    pub(crate) witness: Vec<Vec<F>>,
    pub(crate) public: Vec<Vec<F>>,
}

impl TraceTable {
    pub fn air(&self) -> &Air {
        &self.air
    }

    pub fn rows(&self) -> usize {
        self.witness.first().map_or(0, Vec::len)
    }

    pub fn real_rows(&self) -> usize {
        self.real_rows
    }

    pub fn witness(&self) -> &[Vec<F>] {
        &self.witness
    }

    pub fn public(&self) -> &[Vec<F>] {
        &self.public
    }

    /// Total column count, witness plus public.
    pub fn width(&self) -> usize {
        self.witness.len() + self.public.len()
    }

    /// Looks a column up by name, witness columns first.
    pub fn column(&self, name: &str) -> Option<&[F]> {
        if let Some(k) = self.air.witness_names().iter().position(|n| n == name) {
            return Some(&self.witness[k]);
        }
        let k = self.air.public_names().iter().position(|n| n == name)?;
        Some(&self.public[k])
    }

    pub fn witness_row(&self, row: usize) -> Vec<F> {
        self.witness.iter().map(|c| c[row]).collect()
    }

    pub fn public_row(&self, row: usize) -> Vec<F> {
        self.public.iter().map(|c| c[row]).collect()
    }

    /// Overwrites a single cell; used to exercise the constraint checks.
    pub fn set_witness(&mut self, row: usize, column: usize, value: F) {
        self.witness[column][row] = value;
    }

    /// Confirms every constraint vanishes on every row.
    pub fn check(&self) -> Result<(), StarkError> {
        let names = self.air.constraint_names();
        let mut scratch = Vec::new();
        for row in 0..self.rows() {
            self.air.evaluate(&self.witness_row(row), &self.public_row(row), &mut scratch);
            if let Some(k) = scratch.iter().position(|c| !c.is_zero()) {
                return Err(StarkError::Unsatisfied {
                    row,
                    constraint: names[k].clone(),
                });
            }
        }
        Ok(())
    }
}

/// Loads a stored `2^32`-scale distance into the `2^16`-scale trace:
/// arithmetic right shift (floor), then clamp to `±PAYLOAD_BOUND`.
pub fn trace_payload(stored: i128) -> i64 {
    let shifted = stored >> TRACE_SCALE_BITS;
    shifted.clamp(-(PAYLOAD_BOUND as i128), PAYLOAD_BOUND as i128) as i64
}

/// Grid-scaled coordinate along one axis, clamped so the far edge falls in
/// the last cell.
fn grid_coord(offset: f64, cell: f64, r: u32) -> u64 {
    let max = (r as u64) * TRACE_ONE - 1;
    let g = (offset / cell * TRACE_ONE as f64).round();
    if g <= 0.0 {
        0
    } else {
        (g as u64).min(max)
    }
}

/// Builds the witness and public parts of one row. Returns `(witness, public)`.
pub(crate) fn fill_row(air: &Air, gx: u64, gy: u64, payload: &[i64]) -> (Vec<F>, Vec<F>) {
    let scale = TRACE_SCALE_BITS as usize;
    let (i, u) = (gx >> scale, gx & (TRACE_ONE - 1));
    let (j, v) = (gy >> scale, gy & (TRACE_ONE - 1));
    let mut w = vec![F::ZERO; air.witness_width];
    w[air.gx] = F::new(gx);
    w[air.gy] = F::new(gy);
    w[air.u] = F::new(u);
    w[air.v] = F::new(v);
    let put_bits = |w: &mut Vec<F>, start: usize, len: usize, value: u64| {
        for k in 0..len {
            w[start + k] = F::from((value >> k) & 1 == 1);
        }
    };
    put_bits(&mut w, air.u_bits, scale, u);
    put_bits(&mut w, air.v_bits, scale, v);
    put_bits(&mut w, air.i_bits, air.cell_bits, i);
    put_bits(&mut w, air.j_bits, air.cell_bits, j);

    let mut p = vec![F::ZERO; air.public_width()];
    p[PUB_I] = F::new(i);
    p[PUB_J] = F::new(j);

    let out = if air.distance_aware {
        let s = TRACE_ONE as i128;
        let (u, v) = (u as i128, v as i128);
        let m = [(s - u) * (s - v), u * (s - v), (s - u) * v, u * v];
        let sum: i128 = m.iter().zip(payload).map(|(m, d)| m * *d as i128).sum();
        let interp = sum.div_euclid(1 << REM_BITS);
        let rem = sum.rem_euclid(1 << REM_BITS) as u64;
        let mag = interp.unsigned_abs() as u64;
        for (k, mk) in m.iter().enumerate() {
            w[air.m + k] = F::new(*mk as u64);
        }
        w[air.interp] = F::from_i64(interp as i64);
        w[air.rem] = F::new(rem);
        put_bits(&mut w, air.rem_bits, REM_BITS, rem);
        w[air.mag] = F::new(mag);
        put_bits(&mut w, air.mag_bits, super::MAG_BITS, mag);
        for (k, d) in payload.iter().enumerate() {
            p[PUB_PAYLOAD + k] = F::from_i64(*d);
        }
        interp <= 0
    } else {
        p[PUB_PAYLOAD] = F::from(payload[0] != 0);
        payload[0] != 0
    };
    p[PUB_OUT] = F::from(out);
    (w, p)
}

/// Locates every query, reads its table entries with authentication paths,
/// and fills the trace. Rows past the last query repeat it.
pub fn build_trace(
    queries: &[ZoneQuery],
    bundle: &TableBundle,
    cfg: &AirConfig,
) -> Result<(TraceTable, PublicStatement), StarkError> {
    cfg.validate()?;
    if queries.is_empty() {
        return Err(StarkError::NoQueries);
    }
    if queries.len() > cfg.rows {
        return Err(StarkError::TooManyQueries {
            count: queries.len(),
            rows: cfg.rows,
        });
    }
    if bundle.strategy.quantized() != cfg.strategy.quantized() {
        return Err(TableError::StrategyMismatch {
            expected: cfg.strategy.to_string(),
            actual: bundle.strategy.to_string(),
        }
        .into());
    }
    let grid = bundle.grid();
    if grid.r() != cfg.r {
        return Err(StarkError::Config(format!("table resolution {} differs from {}", grid.r(), cfg.r)));
    }

    let tree = bundle.table.commit_tree()?;
    if tree.root() != bundle.commitment_root {
        return Err(TableError::Commitment {
            footer: bundle.commitment_root,
            computed: tree.root(),
        }
        .into());
    }

    let air = cfg.air();
    let zone_count = bundle.zone_count();
    let bbox = grid.bbox();
    let mut witness = vec![Vec::with_capacity(cfg.rows); air.witness_width];
    let mut public = vec![Vec::with_capacity(cfg.rows); air.public_width()];
    let mut rows = Vec::with_capacity(queries.len());

    for q in queries {
        let p = q.point;
        if !bbox.contains(&p) {
            return Err(TableError::OutOfBounds { x: p.x, y: p.y }.into());
        }
        if q.zone >= zone_count {
            return Err(TableError::ZoneIndex {
                index: q.zone,
                count: zone_count,
            }
            .into());
        }
        let gx = grid_coord(p.x - bbox.xmin, grid.cell_w(), cfg.r);
        let gy = grid_coord(p.y - bbox.ymin, grid.cell_h(), cfg.r);
        let (i, j) = ((gx / TRACE_ONE) as u32, (gy / TRACE_ONE) as u32);
        let leaves = lookup_leaves(&bundle.table, q.zone, i, j);
        let mut openings = Vec::with_capacity(leaves.len());
        let mut payload = Vec::with_capacity(leaves.len());
        for idx in leaves {
            openings.push(tree.open(idx).map_err(TableError::from)?);
            let value = bundle.table.leaf_value(idx);
            payload.push(if air.distance_aware {
                trace_payload(value.to_i128())
            } else {
                value.value() as i64
            });
        }
        let (w, pubs) = fill_row(&air, gx, gy, &payload);
        rows.push(PublicRow {
            zone: q.zone as u32,
            i,
            j,
            out: pubs[PUB_OUT] == F::ONE,
            openings,
        });
        for (col, val) in witness.iter_mut().zip(w) {
            col.push(val);
        }
        for (col, val) in public.iter_mut().zip(pubs) {
            col.push(val);
        }
    }
    for col in witness.iter_mut().chain(public.iter_mut()) {
        let last = *col.last().expect("at least one row");
        col.resize(cfg.rows, last);
    }

    let trace = TraceTable {
        air,
        real_rows: queries.len(),
        witness,
        public,
    };
    let statement = PublicStatement {
        config: *cfg,
        table_root: bundle.commitment_root,
        zone_count: zone_count as u32,
        rows,
    };
    Ok((trace, statement))
}

/// Table leaves a row reads: the cell (boolean) or its four vertices.
pub(crate) fn lookup_leaves(table: &LookupTable, zone: usize, i: u32, j: u32) -> Vec<usize> {
    match table {
        LookupTable::Bool(_) => vec![table.leaf_index(zone, i, j)],
        LookupTable::Sdf(_) => CORNERS.iter().map(|&(di, dj)| table.leaf_index(zone, i + di, j + dj)).collect(),
    }
}

/// Expected leaf indices without a materialized table.
pub(crate) fn expected_leaves(strategy: &StrategyKind, r: u32, zone: u32, i: u32, j: u32) -> Vec<usize> {
    if strategy.is_boolean() {
        let r = r as usize;
        vec![zone as usize * r * r + j as usize * r + i as usize]
    } else {
        let side = r as usize + 1;
        CORNERS
            .iter()
            .map(|&(di, dj)| zone as usize * side * side + (j + dj) as usize * side + (i + di) as usize)
            .collect()
    }
}

pub(crate) const CORNERS: [(u32, u32); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];
