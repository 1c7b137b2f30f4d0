//! Scalar abstraction shared by the dense linear algebra, the simplex solver
//! and the least-squares fits.
//!
//! Two families of scalars are supported: IEEE floats (`f32`, `f64`), which
//! compare against a relative tolerance, and exact rationals, for which a
//! value is negligible only when it is exactly zero.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Field element usable by every generic routine in this crate.
pub trait Scalar:
    Num
    + Signed
    + Clone
    + PartialOrd
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// True when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    /// Whether `x` should be treated as zero relative to `scale`.
    fn negligible(x: &Self, scale: &Self) -> bool;

    fn from_i64_exact(v: i64) -> Self {
        Self::from_i64(v).expect("integer representable in scalar")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn abs_val(&self) -> Self {
        Signed::abs(self)
    }
}

macro_rules! float_scalar {
    ($t:ty, $rel:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn negligible(x: &Self, scale: &Self) -> bool {
                let scale = if *scale > 1.0 { *scale } else { 1.0 };
                x.abs() <= $rel * scale
            }
        }
    };
}

float_scalar!(f64, 1e-11);
float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn negligible(x: &Self, _scale: &Self) -> bool {
        x.is_zero()
    }

    fn from_i64_exact(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
}

/// Floating scalars: everything needed by the Jacobi SVD.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}
