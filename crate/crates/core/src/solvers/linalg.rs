//! Small dense helpers layered on nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inverse of a symmetric positive-definite matrix via Cholesky.
pub fn spd_inverse<T: Real>(m: DMatrix<T>, what: &str) -> Result<DMatrix<T>> {
    let inv = m
        .cholesky()
        .ok_or_else(|| Error::Singular(what.to_string()))?
        .inverse();
    Ok(symmetrize(inv))
}

/// Inverse of a general square matrix via LU with partial pivoting.
pub fn general_inverse<T: Real>(m: DMatrix<T>, what: &str) -> Result<DMatrix<T>> {
    m.lu()
        .try_inverse()
        .ok_or_else(|| Error::Singular(what.to_string()))
}

pub fn symmetrize<T: Real>(m: DMatrix<T>) -> DMatrix<T> {
    let half = T::lit(0.5);
    (&m + m.transpose()) * half
}

/// Largest eigenvalue of a symmetric positive semi-definite matrix by power iteration.
///
/// Starts from the column of largest norm, which cannot be orthogonal to the top
/// eigenvector of a rank-one matrix, and never returns less than that norm.
pub fn power_iteration<T: Real>(m: &DMatrix<T>, max_steps: usize, tol: T) -> T {
    let Some((floor, start)) = m
        .column_iter()
        .map(|c| (c.norm(), c))
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return T::zero();
    };
    if floor == T::zero() {
        return T::zero();
    }
    let mut v = start / floor;
    let mut estimate = floor;
    for _ in 0..max_steps {
        let w = m * &v;
        let norm = w.norm();
        if norm == T::zero() {
            return floor;
        }
        let next = v.dot(&w);
        v = w / norm;
        if (next - estimate).abs() <= tol * next.abs().max(T::one()) {
            return next.max(floor);
        }
        estimate = next;
    }
    // Rayleigh quotient of the final iterate
    v.dot(&(m * &v)).max(estimate).max(floor)
}

pub fn max_abs<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn l1_norm<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.abs())
}

pub fn check_finite<T: Real>(values: impl IntoIterator<Item = T>, what: &str) -> Result<()> {
    if values.into_iter().all(|x| x.is_finite_value()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
