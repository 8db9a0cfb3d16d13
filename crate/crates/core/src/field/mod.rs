//! Arithmetic over the prime field `p = 2^64 - 2^32 + 1`.
//!
//! The modulus has two-adicity 32, so every power-of-two evaluation domain
//! up to `2^32` points exists. Elements are stored in canonical form
//! (`0 <= value < p`) and serialize as little-endian `u64`.

mod fixed;
mod ntt;

pub use fixed::{decode_fixed, encode_fixed, rescale_mul, FixedPoint};
pub use ntt::{intt, ntt, EvaluationDomain};

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// The field modulus.
pub const MODULUS: u64 = 0xffff_ffff_0000_0001;

/// `2^64 mod p`.
const EPSILON: u64 = 0xffff_ffff;

/// Largest `k` such that `2^k | p - 1`.
pub const TWO_ADICITY: u32 = 32;

/// Generator of the full multiplicative group.
pub const MULTIPLICATIVE_GENERATOR: FieldElement = FieldElement(7);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("domain size {0} is not a power of two no larger than 2^32")]
    BadDomainSize(u64),
    #[error("expected {expected} values for the evaluation domain, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("fixed-point value out of range: {0}")]
    FixedOverflow(String),
    #[error("non-canonical field encoding {0:#x}")]
    NonCanonical(u64),
}

/// A canonical element of the Goldilocks field.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: Self = Self(0);
    pub const ONE: Self = Self(1);
    pub const TWO: Self = Self(2);

    /// Reduces an arbitrary `u64` into the field.
    pub const fn new(value: u64) -> Self {
        if value >= MODULUS {
            Self(value - MODULUS)
        } else {
            Self(value)
        }
    }

    /// Accepts only canonical encodings.
    pub fn from_canonical(value: u64) -> Result<Self, FieldError> {
        if value < MODULUS {
            Ok(Self(value))
        } else {
            Err(FieldError::NonCanonical(value))
        }
    }

    /// Maps a signed integer into the field; negatives become `p - |v|`.
    pub fn from_i64(value: i64) -> Self {
        if value >= 0 {
            Self::new(value as u64)
        } else {
            -Self::new(value.unsigned_abs())
        }
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    /// Interprets the element as a signed integer, treating values above
    /// `p / 2` as negative.
    pub fn to_i128(self) -> i128 {
        if self.0 > MODULUS / 2 {
            self.0 as i128 - MODULUS as i128
        } else {
            self.0 as i128
        }
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn square(self) -> Self {
        self * self
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base = base.square();
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem (`a^(p-2)`).
    pub fn inverse(self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        Ok(self.pow(MODULUS - 2))
    }

    pub fn to_le_bytes(self) -> [u8; 8] {
        self.0.to_le_bytes()
    }

    pub fn from_le_bytes(bytes: [u8; 8]) -> Result<Self, FieldError> {
        Self::from_canonical(u64::from_le_bytes(bytes))
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({})", self.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for FieldElement {
    fn from(value: u64) -> Self {
        Self::new(value)
    }
}

impl From<u32> for FieldElement {
    fn from(value: u32) -> Self {
        Self(value as u64)
    }
}

impl From<bool> for FieldElement {
    fn from(value: bool) -> Self {
        Self(value as u64)
    }
}

#[inline]
fn reduce128(x: u128) -> u64 {
    let lo = x as u64;
    let hi = (x >> 64) as u64;
    let hi_hi = hi >> 32;
    let hi_lo = hi & EPSILON;

    // 2^96 = -1 mod p
    let (mut t0, borrow) = lo.overflowing_sub(hi_hi);
    if borrow {
        t0 = t0.wrapping_sub(EPSILON);
    }
    // 2^64 = 2^32 - 1 mod p
    let t1 = hi_lo * EPSILON;
    let (mut res, carry) = t0.overflowing_add(t1);
    if carry {
        res = res.wrapping_add(EPSILON);
    }
    if res >= MODULUS {
        res - MODULUS
    } else {
        res
    }
}

impl Add for FieldElement {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (mut sum, carry) = self.0.overflowing_add(rhs.0);
        if carry {
            sum += EPSILON;
        }
        if sum >= MODULUS {
            sum -= MODULUS;
        }
        Self(sum)
    }
}

impl Sub for FieldElement {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        if self.0 >= rhs.0 {
            Self(self.0 - rhs.0)
        } else {
            Self(MODULUS - rhs.0 + self.0)
        }
    }
}

impl Mul for FieldElement {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self(reduce128(self.0 as u128 * rhs.0 as u128))
    }
}

impl Neg for FieldElement {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Self(MODULUS - self.0)
        }
    }
}

impl Div for FieldElement {
    type Output = Self;
    /// Panics on division by zero.
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero field element")
    }
}

impl AddAssign for FieldElement {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for FieldElement {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for FieldElement {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Sum for FieldElement {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl Product for FieldElement {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, Mul::mul)
    }
}

pub fn f_add(a: FieldElement, b: FieldElement) -> FieldElement {
    a + b
}

pub fn f_sub(a: FieldElement, b: FieldElement) -> FieldElement {
    a - b
}

pub fn f_mul(a: FieldElement, b: FieldElement) -> FieldElement {
    a * b
}

pub fn f_neg(a: FieldElement) -> FieldElement {
    -a
}

pub fn f_inv(a: FieldElement) -> Result<FieldElement, FieldError> {
    a.inverse()
}

/// Returns an element of exact multiplicative order `n`.
pub fn root_of_unity(n: u64) -> Result<FieldElement, FieldError> {
    if n == 0 || !n.is_power_of_two() || n.trailing_zeros() > TWO_ADICITY {
        return Err(FieldError::BadDomainSize(n));
    }
    let primitive = MULTIPLICATIVE_GENERATOR.pow((MODULUS - 1) >> TWO_ADICITY);
    Ok(primitive.pow((1u64 << TWO_ADICITY) / n))
}

/// Inverts every element of a slice with a single field inversion.
pub fn batch_inverse(values: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = FieldElement::ONE;
    for &v in values {
        if v.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        prefix.push(acc);
        acc *= v;
    }
    let mut inv = acc.inverse()?;
    let mut out = vec![FieldElement::ZERO; values.len()];
    for k in (0..values.len()).rev() {
        out[k] = prefix[k] * inv;
        inv *= values[k];
    }
    Ok(out)
}

/// Evaluates a polynomial given by its coefficients (lowest degree first).
pub fn horner(coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    coeffs
        .iter()
        .rev()
        .fold(FieldElement::ZERO, |acc, &c| acc * x + c)
}
