//! Scalar abstraction shared by every energy and geometry computation.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type the simulator can run on (`f32` or `f64`).
pub trait Scalar: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into this scalar.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into this scalar.
    fn from_count(count: usize) -> Self {
        Self::from_usize(count).expect("count representable in scalar type")
    }

    /// Lossy conversion used for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where T: Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static {}

/// `ceil(value)` that ignores rounding noise just above an integer, so that
/// e.g. `0.1 * 30` yields 3 rather than 4.
pub(crate) fn ceil_tolerant<S: Scalar>(value: S) -> S {
    let slack = S::epsilon() * S::lit(4.0) * value.abs();
    (value - slack).ceil()
}
