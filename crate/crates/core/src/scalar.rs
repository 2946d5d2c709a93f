//! Floating-point scalar abstraction.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Scalar type the numerical core is generic over: `f32`, `f64`, or any
/// other IEEE-like float exposing the `num-traits` interfaces.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 must convert into a Scalar")
    }

    /// Converts a `usize` (node counts, loop indices) into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize must convert into a Scalar")
    }

    /// Lossy view as `f64`, used for reports and serialized output.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar must convert to f64")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}
