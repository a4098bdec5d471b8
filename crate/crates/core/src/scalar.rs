//! Scalar abstraction: every physical quantity is generic over `Real`.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar for all geometry, channel and rate math.
///
/// Implemented for `f32` and `f64`. The extra bounds beyond
/// [`num_traits::Float`] cover constant lifting (`FromPrimitive`,
/// [`FloatConst`]) and parallel iteration (`Send + Sync`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    /// Lift an `f64` literal into this scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal")
    }

    /// Lift a `usize` count into this scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count fits the scalar range")
    }

    /// Lossy widening to `f64`, used at I/O boundaries.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
