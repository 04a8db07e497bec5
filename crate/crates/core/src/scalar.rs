//! Scalar abstraction shared by the geometry and flow kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar the kernels are generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Relative slack used when testing strict triangle inequalities during a flow.
    const DOMAIN_TOL: Self;
    /// Excursions of an `arccos` argument beyond `[-1, 1]` up to this size are round-off.
    const CLAMP_TOL: Self;

    /// Converts an `f64` literal into this scalar.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    const DOMAIN_TOL: Self = 1e-12;
    const CLAMP_TOL: Self = 1e-9;
}

impl Real for f32 {
    const DOMAIN_TOL: Self = 1e-6;
    const CLAMP_TOL: Self = 1e-5;
}

/// `arccos` with the argument clamped to `[-1, 1]`.
///
/// Returns `None` when the raw argument leaves the interval by more than
/// [`Real::CLAMP_TOL`], which indicates a logic error upstream rather than
/// round-off.
pub fn clamped_acos<T: Real>(x: T) -> Option<T> {
    if !x.is_finite() || x > T::one() + T::CLAMP_TOL || x < -T::one() - T::CLAMP_TOL {
        return None;
    }
    Some(x.max(-T::one()).min(T::one()).acos())
}
