//! Column layout and constraint system of the membership AIR.
//!
//! Every constraint is a per-row polynomial relation of degree at most 2 in
//! the trace columns; there are no transition constraints. Witness columns
//! are committed by the prover, public columns (cell indices, looked-up
//! payloads and claimed outputs) are reconstructed by the verifier from the
//! public statement.

use crate::field::FieldElement as F;

use super::AirConfig;

/// In-trace fixed-point scale, `2^16`.
pub const TRACE_SCALE_BITS: u32 = 16;
pub const TRACE_ONE: u64 = 1 << TRACE_SCALE_BITS;
/// Bits of the bilinear remainder (`interp * 2^32 + rem = sum m_k d_k`).
pub const REM_BITS: usize = 2 * TRACE_SCALE_BITS as usize;
/// Bits of `|interp|`; interpolated distances stay below `2^30` trace units.
pub const MAG_BITS: usize = 31;
/// Trace payloads are clamped to `±PAYLOAD_BOUND` so `sum m_k d_k` stays below `2^62`.
pub const PAYLOAD_BOUND: i64 = (1 << 30) - 1;

/// Index ranges of every column group for one configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Air {
    pub distance_aware: bool,
    pub cell_bits: usize,
    pub gx: usize,
    pub gy: usize,
    pub u: usize,
    pub v: usize,
    pub u_bits: usize,
    pub v_bits: usize,
    pub i_bits: usize,
    pub j_bits: usize,
    /// `m1..m4`, `interp`, `rem`, `rem_bits`, `mag`, `mag_bits` (distance-aware only).
    pub m: usize,
    pub interp: usize,
    pub rem: usize,
    pub rem_bits: usize,
    pub mag: usize,
    pub mag_bits: usize,
    pub witness_width: usize,
}

/// Public column positions.
pub const PUB_I: usize = 0;
pub const PUB_J: usize = 1;
pub const PUB_OUT: usize = 2;
/// First payload column: `t` for boolean tables, `d00, d10, d01, d11` otherwise.
pub const PUB_PAYLOAD: usize = 3;

impl Air {
    pub fn new(cfg: &AirConfig) -> Self {
        let scale = TRACE_SCALE_BITS as usize;
        let cell_bits = cfg.r.trailing_zeros() as usize;
        let distance_aware = !cfg.strategy.is_boolean();
        let u_bits = 4;
        let v_bits = u_bits + scale;
        let i_bits = v_bits + scale;
        let j_bits = i_bits + cell_bits;
        let m = j_bits + cell_bits;
        let (interp, rem, rem_bits, mag, mag_bits, witness_width) = if distance_aware {
            let interp = m + 4;
            let rem = interp + 1;
            let rem_bits = rem + 1;
            let mag = rem_bits + REM_BITS;
            let mag_bits = mag + 1;
            (interp, rem, rem_bits, mag, mag_bits, mag_bits + MAG_BITS)
        } else {
            (m, m, m, m, m, m)
        };
        Self {
            distance_aware,
            cell_bits,
            gx: 0,
            gy: 1,
            u: 2,
            v: 3,
            u_bits,
            v_bits,
            i_bits,
            j_bits,
            m,
            interp,
            rem,
            rem_bits,
            mag,
            mag_bits,
            witness_width,
        }
    }

    pub fn public_width(&self) -> usize {
        if self.distance_aware {
            PUB_PAYLOAD + 4
        } else {
            PUB_PAYLOAD + 1
        }
    }

    /// Number of lookup openings per row.
    pub fn openings_per_row(&self) -> usize {
        if self.distance_aware {
            4
        } else {
            1
        }
    }

    pub fn witness_names(&self) -> Vec<String> {
        let mut names = vec!["gx".to_string(), "gy".into(), "u".into(), "v".into()];
        let scale = TRACE_SCALE_BITS as usize;
        names.extend((0..scale).map(|k| format!("u_bits[{k}]")));
        names.extend((0..scale).map(|k| format!("v_bits[{k}]")));
        names.extend((0..self.cell_bits).map(|k| format!("i_bits[{k}]")));
        names.extend((0..self.cell_bits).map(|k| format!("j_bits[{k}]")));
        if self.distance_aware {
            names.extend(["m1", "m2", "m3", "m4", "interp", "rem"].map(String::from));
            names.extend((0..REM_BITS).map(|k| format!("rem_bits[{k}]")));
            names.push("mag".into());
            names.extend((0..MAG_BITS).map(|k| format!("mag_bits[{k}]")));
        }
        debug_assert_eq!(names.len(), self.witness_width);
        names
    }

    pub fn public_names(&self) -> Vec<String> {
        let mut names = vec!["i".to_string(), "j".into(), "out".into()];
        if self.distance_aware {
            names.extend(["d00", "d10", "d01", "d11"].map(String::from));
        } else {
            names.push("t".into());
        }
        names
    }

    fn bit_ranges(&self) -> Vec<(usize, usize)> {
        let scale = TRACE_SCALE_BITS as usize;
        let mut ranges = vec![
            (self.u_bits, scale),
            (self.v_bits, scale),
            (self.i_bits, self.cell_bits),
            (self.j_bits, self.cell_bits),
        ];
        if self.distance_aware {
            ranges.push((self.rem_bits, REM_BITS));
            ranges.push((self.mag_bits, MAG_BITS));
        }
        ranges
    }

    pub fn constraint_count(&self) -> usize {
        let bits: usize = self.bit_ranges().iter().map(|r| r.1).sum();
        // out boolean, u/v/gx/gy, i/j decompositions
        let common = bits + 1 + 6;
        if self.distance_aware {
            // rem and mag decompositions, m1..m4, bilinear identity, sign
            common + 2 + 4 + 1 + 1
        } else {
            // out = t, t boolean
            common + 2
        }
    }

    /// Human-readable description of every constraint, in evaluation order.
    pub fn constraint_names(&self) -> Vec<String> {
        let names = self.witness_names();
        let mut out = Vec::with_capacity(self.constraint_count());
        for (start, len) in self.bit_ranges() {
            out.extend((start..start + len).map(|c| format!("{0}*({0}-1)", names[c])));
        }
        out.push("out*(out-1)".into());
        out.extend(
            [
                "u - sum u_bits",
                "v - sum v_bits",
                "i - sum i_bits",
                "j - sum j_bits",
                "gx - (i*2^16 + u)",
                "gy - (j*2^16 + v)",
            ]
            .map(String::from),
        );
        if self.distance_aware {
            out.extend(
                [
                    "rem - sum rem_bits",
                    "mag - sum mag_bits",
                    "m1 - (2^16-u)(2^16-v)",
                    "m2 - u(2^16-v)",
                    "m3 - (2^16-u)v",
                    "m4 - uv",
                    "interp*2^32 + rem - (m1 d00 + m2 d10 + m3 d01 + m4 d11)",
                    "interp - (1-2 out) mag",
                ]
                .map(String::from),
            );
        } else {
            out.extend(["out - t", "t*(t-1)"].map(String::from));
        }
        out
    }

    pub fn constraint_degrees(&self) -> Vec<usize> {
        let bits: usize = self.bit_ranges().iter().map(|r| r.1).sum();
        let mut out = vec![2; bits + 1];
        out.extend([1; 6]);
        if self.distance_aware {
            out.extend([1, 1, 2, 2, 2, 2, 2, 2]);
        } else {
            out.extend([1, 2]);
        }
        out
    }

    /// Evaluates every constraint on one row; all results are zero on an
    /// honest trace.
    pub fn evaluate(&self, w: &[F], p: &[F], out: &mut Vec<F>) {
        out.clear();
        let one = F::ONE;
        let two = F::TWO;
        let bits_sum = |start: usize, len: usize| -> F {
            let mut acc = F::ZERO;
            let mut pow = F::ONE;
            for k in 0..len {
                acc += w[start + k] * pow;
                pow = pow * two;
            }
            acc
        };
        for (start, len) in self.bit_ranges() {
            for c in start..start + len {
                out.push(w[c] * (w[c] - one));
            }
        }
        let o = p[PUB_OUT];
        out.push(o * (o - one));

        let scale = TRACE_SCALE_BITS as usize;
        let s = F::new(TRACE_ONE);
        out.push(w[self.u] - bits_sum(self.u_bits, scale));
        out.push(w[self.v] - bits_sum(self.v_bits, scale));
        out.push(p[PUB_I] - bits_sum(self.i_bits, self.cell_bits));
        out.push(p[PUB_J] - bits_sum(self.j_bits, self.cell_bits));
        out.push(w[self.gx] - (p[PUB_I] * s + w[self.u]));
        out.push(w[self.gy] - (p[PUB_J] * s + w[self.v]));

        if self.distance_aware {
            let (u, v) = (w[self.u], w[self.v]);
            let (m1, m2, m3, m4) = (w[self.m], w[self.m + 1], w[self.m + 2], w[self.m + 3]);
            let d = &p[PUB_PAYLOAD..PUB_PAYLOAD + 4];
            out.push(w[self.rem] - bits_sum(self.rem_bits, REM_BITS));
            out.push(w[self.mag] - bits_sum(self.mag_bits, MAG_BITS));
            out.push(m1 - (s - u) * (s - v));
            out.push(m2 - u * (s - v));
            out.push(m3 - (s - u) * v);
            out.push(m4 - u * v);
            let weight_scale = F::new(1 << REM_BITS);
            out.push(w[self.interp] * weight_scale + w[self.rem] - (m1 * d[0] + m2 * d[1] + m3 * d[2] + m4 * d[3]));
            out.push(w[self.interp] - (one - two * o) * w[self.mag]);
        } else {
            let t = p[PUB_PAYLOAD];
            out.push(o - t);
            out.push(t * (t - one));
        }
    }

    /// `sum_k alpha_k C_k` for one row.
    pub fn combine(&self, w: &[F], p: &[F], alphas: &[F], scratch: &mut Vec<F>) -> F {
        self.evaluate(w, p, scratch);
        scratch.iter().zip(alphas).map(|(c, a)| *c * *a).sum()
    }
}
