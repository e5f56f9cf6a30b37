//! Coefficient fields used by the series engine: exact rationals and `f64`.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Relative tolerance used when two float-mode computations are compared.
pub const FLOAT_REL_TOL: f64 = 1e-9;

/// A field element that can carry series coefficients.
///
/// `BigRational` is the exact mode: every operation is exact and
/// [`Coeff::agrees`] is equality. `f64` is the float mode and compares with a
/// relative tolerance of [`FLOAT_REL_TOL`].
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    const EXACT: bool;

    fn from_ratio(r: &BigRational) -> Self;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Whether two values computed along different routes agree: exact
    /// equality for rationals, `FLOAT_REL_TOL` relative agreement for floats.
    /// `scale` is an absolute floor for the comparison (ignored in exact mode).
    fn agrees(&self, other: &Self, scale: f64) -> bool;

    fn mul_ref(&self, other: &Self) -> Self;
}

impl Coeff for BigRational {
    const EXACT: bool = true;

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn agrees(&self, other: &Self, _scale: f64) -> bool {
        self == other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for f64 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn agrees(&self, other: &Self, scale: f64) -> bool {
        let mag = self.abs().max(other.abs()).max(scale);
        (self - other).abs() <= FLOAT_REL_TOL * mag
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

/// Converts a rational to the nearest-ish `f64` without overflowing on huge
/// numerators and denominators (the direct `to_f64` on each part would give
/// `inf / inf`).
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n != 0.0 && d != 0.0 {
            return n / d;
        }
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // Keep ~80 significant bits of each part.
    let shift_n = (nb - 80).max(0);
    let shift_d = (db - 80).max(0);
    let n = (r.numer().abs() >> shift_n as usize).to_f64().unwrap_or(0.0);
    let d = (r.denom() >> shift_d as usize).to_f64().unwrap_or(1.0);
    let mag = (n / d) * 2f64.powi((shift_n - shift_d) as i32);
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn f64_to_ratio(v: f64) -> Option<BigRational> {
    BigRational::from_float(v)
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
