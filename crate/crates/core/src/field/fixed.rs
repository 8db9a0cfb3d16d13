use super::{FieldElement, FieldError};

/// Exclusive bound on the magnitude of any fixed-point raw integer.
pub const FIXED_RAW_BOUND: i64 = 1 << 62;

/// A real number stored as `raw / 2^scale_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    raw: i64,
    scale_bits: u32,
}

impl FixedPoint {
    pub fn from_raw(raw: i64, scale_bits: u32) -> Result<Self, FieldError> {
        if raw <= -FIXED_RAW_BOUND || raw >= FIXED_RAW_BOUND {
            return Err(FieldError::FixedOverflow(format!("raw {raw} exceeds 2^62")));
        }
        Ok(Self { raw, scale_bits })
    }

    /// Rounds half away from zero.
    pub fn from_f64(x: f64, scale_bits: u32) -> Result<Self, FieldError> {
        let scaled = x * (scale_bits as f64).exp2();
        if !scaled.is_finite() || scaled.abs() >= FIXED_RAW_BOUND as f64 {
            return Err(FieldError::FixedOverflow(format!(
                "{x} does not fit at scale 2^{scale_bits}"
            )));
        }
        Self::from_raw(scaled.round() as i64, scale_bits)
    }

    pub fn from_field(value: FieldElement, scale_bits: u32) -> Result<Self, FieldError> {
        let signed = value.to_i128();
        if signed.unsigned_abs() >= FIXED_RAW_BOUND as u128 {
            return Err(FieldError::FixedOverflow(format!("{value} is not a fixed-point encoding")));
        }
        Self::from_raw(signed as i64, scale_bits)
    }

    pub fn raw(self) -> i64 {
        self.raw
    }

    pub fn scale_bits(self) -> u32 {
        self.scale_bits
    }

    pub fn to_f64(self) -> f64 {
        self.raw as f64 / (self.scale_bits as f64).exp2()
    }

    pub fn to_field(self) -> FieldElement {
        FieldElement::from_i64(self.raw)
    }
}

pub fn encode_fixed(x: f64, scale_bits: u32) -> Result<FieldElement, FieldError> {
    FixedPoint::from_f64(x, scale_bits).map(FixedPoint::to_field)
}

/// Inverse of [`encode_fixed`]; values above `p / 2` decode as negatives.
pub fn decode_fixed(value: FieldElement, scale_bits: u32) -> f64 {
    value.to_i128() as f64 / (scale_bits as f64).exp2()
}

/// Multiplies two fixed-point numbers of equal scale and rescales the
/// product, returning the floored quotient and the non-negative remainder so
/// that `a * b = result * 2^s + remainder` holds exactly.
pub fn rescale_mul(a: FixedPoint, b: FixedPoint) -> Result<(FixedPoint, u64), FieldError> {
    if a.scale_bits != b.scale_bits {
        return Err(FieldError::FixedOverflow(format!(
            "scale mismatch: 2^{} vs 2^{}",
            a.scale_bits, b.scale_bits
        )));
    }
    let product = a.raw as i128 * b.raw as i128;
    if product.unsigned_abs() >= FIXED_RAW_BOUND as u128 {
        return Err(FieldError::FixedOverflow(format!("product {product} exceeds 2^62")));
    }
    let s = a.scale_bits;
    let quotient = product >> s;
    let remainder = product - (quotient << s);
    Ok((FixedPoint::from_raw(quotient as i64, s)?, remainder as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::MODULUS;
    use proptest::prelude::*;

    #[test]
    fn encode_examples() {
        assert_eq!(encode_fixed(0.0, 32).unwrap(), FieldElement::ZERO);
        assert_eq!(encode_fixed(1.0, 32).unwrap().value(), 1 << 32);
        let neg = encode_fixed(-1.0, 32).unwrap();
        assert_eq!(neg.value(), MODULUS - (1 << 32));
        assert_eq!(decode_fixed(neg, 32), -1.0);
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(FixedPoint::from_f64(2.5, 0).unwrap().raw(), 3);
        assert_eq!(FixedPoint::from_f64(-2.5, 0).unwrap().raw(), -3);
        assert_eq!(FixedPoint::from_f64(0.4, 0).unwrap().raw(), 0);
    }

    #[test]
    fn overflow_rejected() {
        assert!(encode_fixed(2.0e9, 32).is_err());
        assert!(encode_fixed(f64::NAN, 16).is_err());
        assert!(encode_fixed(f64::INFINITY, 16).is_err());
        assert!(FixedPoint::from_field(FieldElement::new(1 << 63), 16).is_err());
    }

    #[test]
    fn rescale_examples() {
        let one = FixedPoint::from_f64(1.0, 16).unwrap();
        assert_eq!(rescale_mul(one, one).unwrap(), (one, 0));
        let half = FixedPoint::from_f64(0.5, 16).unwrap();
        let (q, r) = rescale_mul(half, half).unwrap();
        assert_eq!((q.raw(), r), (1 << 14, 0));
        let a = FixedPoint::from_raw(3, 16).unwrap();
        let b = FixedPoint::from_raw(5, 16).unwrap();
        let (q, r) = rescale_mul(a, b).unwrap();
        assert_eq!((q.raw(), r), (0, 15));
        let big = FixedPoint::from_f64(1.0, 32).unwrap();
        assert!(rescale_mul(big, big).is_err());
        assert!(rescale_mul(one, big).is_err());
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(raw in -(FIXED_RAW_BOUND - 1)..FIXED_RAW_BOUND, bits in prop_oneof![Just(16u32), Just(32u32)]) {
            let fp = FixedPoint::from_raw(raw, bits).unwrap();
            let back = FixedPoint::from_field(fp.to_field(), bits).unwrap();
            prop_assert_eq!(back, fp);
            let x = fp.to_f64();
            if (x * (bits as f64).exp2()).abs() < 2f64.powi(52) {
                prop_assert_eq!(decode_fixed(encode_fixed(x, bits).unwrap(), bits), x);
            }
        }

        #[test]
        fn rescale_division_identity(a in -(1i64 << 30)..(1i64 << 30), b in -(1i64 << 30)..(1i64 << 30)) {
            let fa = FixedPoint::from_raw(a, 16).unwrap();
            let fb = FixedPoint::from_raw(b, 16).unwrap();
            let (q, r) = rescale_mul(fa, fb).unwrap();
            prop_assert!(r < 1 << 16);
            prop_assert_eq!(a as i128 * b as i128, ((q.raw() as i128) << 16) + r as i128);
        }
    }
}
