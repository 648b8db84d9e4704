//! Scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the solvers, classifiers and feature extractors are generic over.
///
/// Implemented for `f32` and `f64`. Methods such as `abs`, `sqrt` and `max`
/// come from [`RealField`].
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Display + Debug + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count into this scalar.
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn is_finite_value(self) -> bool {
        self.to_f64_lossy().is_finite()
    }
}

impl<T> Real for T where
    T: RealField
        + Copy
        + FromPrimitive
        + ToPrimitive
        + Default
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}
