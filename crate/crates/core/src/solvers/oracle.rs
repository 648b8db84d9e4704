//! Exhaustive lasso minimizer for small problems, used to check the iterative solvers.

use nalgebra::{DMatrix, DVector};

use super::linalg::l1_norm;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const ORACLE_MAX_COLUMNS: usize = 14;

/// `||y - D alpha||^2 + lambda ||alpha||_1`.
pub fn lasso_objective<T: Real>(d: &DMatrix<T>, y: &DVector<T>, alpha: &DVector<T>, lambda: T) -> T {
    (y - d * alpha).norm_squared() + lambda * l1_norm(alpha)
}

/// Global minimizer of `||y - D alpha||^2 + lambda ||alpha||_1` by enumerating
/// every support and sign pattern.
///
/// On a fixed support `S` with signs `s`, stationarity gives
/// `D_S^T D_S alpha_S = D_S^T y - (lambda/2) s`; a candidate is kept when its signs
/// agree with `s`. Supports whose Gram matrix is singular are skipped, which loses
/// nothing because some minimizer always has linearly independent support columns.
pub fn lasso_bruteforce_oracle<T: Real>(d: &DMatrix<T>, y: &DVector<T>, lambda: T) -> Result<DVector<T>> {
    let (m, n) = d.shape();
    if n > ORACLE_MAX_COLUMNS {
        return Err(Error::TooManyColumns {
            columns: n,
            limit: ORACLE_MAX_COLUMNS,
        });
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "dictionary has {m} rows, sample has {}",
            y.len()
        )));
    }
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
    }
    let gram = d.transpose() * d;
    let dty = d.transpose() * y;
    let half_lambda = lambda / T::lit(2.0);

    let mut best = DVector::zeros(n);
    let mut best_obj = y.norm_squared();

    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let size = support.len();
        if size > m {
            continue;
        }
        let g = DMatrix::from_fn(size, size, |r, c| gram[(support[r], support[c])]);
        let Some(chol) = g.cholesky() else { continue };
        let b = DVector::from_fn(size, |r, _| dty[support[r]]);
        let base = chol.solve(&b);
        let inv = chol.inverse();
        let patterns: u32 = if lambda == T::zero() { 1 } else { 1 << size };
        for signs in 0..patterns {
            let sign = |i: usize| if signs & (1 << i) != 0 { -T::one() } else { T::one() };
            let mut alpha_s = base.clone();
            if lambda != T::zero() {
                for r in 0..size {
                    let mut acc = T::zero();
                    for c in 0..size {
                        acc += inv[(r, c)] * sign(c);
                    }
                    alpha_s[r] -= half_lambda * acc;
                }
                if (0..size).any(|i| !(alpha_s[i] * sign(i) > T::zero())) {
                    continue;
                }
            }
            let mut alpha = DVector::zeros(n);
            for (r, &col) in support.iter().enumerate() {
                alpha[col] = alpha_s[r];
            }
            let obj = lasso_objective(d, y, &alpha, lambda);
            if obj < best_obj {
                best_obj = obj;
                best = alpha;
            }
        }
    }
    Ok(best)
}
