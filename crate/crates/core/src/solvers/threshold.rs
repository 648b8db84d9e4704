use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Component-wise shrinkage: zero when `|b| <= t`, else `b - sign(b) t`.
pub fn soft_threshold<T: Real>(beta: &DVector<T>, t: T) -> Result<DVector<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "threshold must be non-negative, got {t}"
        )));
    }
    Ok(beta.map(|b| shrink(b, t)))
}

#[inline]
pub(crate) fn shrink<T: Real>(b: T, t: T) -> T {
    if b.abs() <= t {
        T::zero()
    } else if b > T::zero() {
        b - t
    } else {
        b + t
    }
}
