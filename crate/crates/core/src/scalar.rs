//! Scalar abstraction shared by every solver component.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type the solvers are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Smallest tolerance that is still meaningful at this precision.
    /// Feasibility and integrality defaults are derived from it.
    fn base_tol() -> Self;

    /// Converts an `f64` literal. Panics only for values that do not fit.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal out of range for scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn base_tol() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn base_tol() -> Self {
        1e-5
    }
}

/// `max(z, 0)`
#[inline]
pub fn pos<T: Scalar>(z: T) -> T {
    if z > T::zero() {
        z
    } else {
        T::zero()
    }
}
