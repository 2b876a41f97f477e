//! Scalar abstraction shared by every numeric routine in the crate.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt::{Debug, Display, LowerExp};

/// Real floating-point type backing the complex matrix kernel.
///
/// Implemented for `f32` and `f64`. Everything in the crate is written against
/// this trait, so the same construction, closure and compilation code runs at
/// either precision; the default tolerances scale with the type.
pub trait Scalar:
    'static
    + Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
{
    /// Default absolute residual threshold.
    const DEFAULT_ABS_EPS: f64;
    /// Default span-rank threshold.
    const DEFAULT_RANK_EPS: f64;

    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(x: usize) -> Self {
        Self::from_usize(x).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const DEFAULT_ABS_EPS: f64 = 1e-10;
    const DEFAULT_RANK_EPS: f64 = 1e-8;
}

impl Scalar for f32 {
    const DEFAULT_ABS_EPS: f64 = 1e-4;
    const DEFAULT_RANK_EPS: f64 = 1e-3;
}
