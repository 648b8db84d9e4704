//! Iterative projection (proximal gradient) solver for
//! `min_s ||y - D (c + s)||^2 + lambda ||s||_1` with a fixed offset `c`.

use nalgebra::{DMatrix, DVector};

use super::linalg::{check_finite, power_iteration};
use super::MmsslConfig;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct IpmOutcome<T: Real> {
    pub alpha: DVector<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Projection solver bound to one dictionary; the step constant is computed once.
#[derive(Debug, Clone)]
pub struct LassoIpm<T: Real> {
    dictionary: DMatrix<T>,
    gram: DMatrix<T>,
    sigma: T,
    tol: T,
    max_iter: usize,
}

impl<T: Real> LassoIpm<T> {
    pub fn new(dictionary: &DMatrix<T>, config: &MmsslConfig<T>) -> Result<Self> {
        check_finite(dictionary.iter().copied(), "dictionary")?;
        let gram = dictionary.transpose() * dictionary;
        let lmax = power_iteration(&gram, config.power_iterations, config.power_tol);
        let sigma = config.sigma_safety * T::lit(2.0) * lmax;
        Self::with_sigma(dictionary, gram, sigma, config)
    }

    fn with_sigma(dictionary: &DMatrix<T>, gram: DMatrix<T>, sigma: T, config: &MmsslConfig<T>) -> Result<Self> {
        if !(sigma > T::zero()) || !sigma.is_finite_value() {
            return Err(Error::InvalidArgument(format!(
                "projection step constant must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            dictionary: dictionary.clone(),
            gram,
            sigma,
            tol: config.tol_inner,
            max_iter: config.max_inner,
        })
    }

    /// Uses a caller-chosen step constant instead of the power-iteration bound.
    pub fn with_step_constant(dictionary: &DMatrix<T>, sigma: T, config: &MmsslConfig<T>) -> Result<Self> {
        check_finite(dictionary.iter().copied(), "dictionary")?;
        let gram = dictionary.transpose() * dictionary;
        Self::with_sigma(dictionary, gram, sigma, config)
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn gram(&self) -> &DMatrix<T> {
        &self.gram
    }

    pub fn dictionary(&self) -> &DMatrix<T> {
        &self.dictionary
    }

    /// Runs the projection iteration from `start` (zero when `None`).
    ///
    /// Each step is `s <- S_{lambda/sigma}(s - grad / sigma)` with
    /// `grad = 2 D^T (D (c + s) - y)`, stopping once the largest component change
    /// falls below the inner tolerance.
    pub fn solve(
        &self,
        y: &DVector<T>,
        offset: &DVector<T>,
        lambda: T,
        start: Option<&DVector<T>>,
    ) -> Result<IpmOutcome<T>> {
        self.solve_traced(y, offset, lambda, start, |_| {})
    }

    pub(crate) fn solve_traced(
        &self,
        y: &DVector<T>,
        offset: &DVector<T>,
        lambda: T,
        start: Option<&DVector<T>>,
        mut trace: impl FnMut(&DVector<T>),
    ) -> Result<IpmOutcome<T>> {
        let n = self.dictionary.ncols();
        if y.len() != self.dictionary.nrows() || offset.len() != n || start.is_some_and(|s| s.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "dictionary is {}x{}, sample has {} entries, offset {}",
                self.dictionary.nrows(),
                n,
                y.len(),
                offset.len()
            )));
        }
        if !(lambda >= T::zero()) {
            return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
        }
        check_finite(y.iter().copied(), "sample")?;
        check_finite(offset.iter().copied(), "offset")?;

        let two = T::lit(2.0);
        let step = two / self.sigma;
        let threshold = lambda / self.sigma;
        // grad / 2 = G s - b with b = D^T y - G c
        let b = self.dictionary.transpose() * y - &self.gram * offset;
        let mut s = start.cloned().unwrap_or_else(|| DVector::zeros(n));
        let mut next = DVector::zeros(n);
        let gram = self.gram.as_slice();
        let b = b.as_slice();
        let mut half_grad = vec![T::zero(); n];
        for it in 1..=self.max_iter {
            // G s - b, visiting only the nonzero entries of the sparse iterate
            for (h, bi) in half_grad.iter_mut().zip(b) {
                *h = -*bi;
            }
            for (j, &sj) in s.as_slice().iter().enumerate() {
                if sj != T::zero() {
                    for (h, g) in half_grad.iter_mut().zip(&gram[j * n..(j + 1) * n]) {
                        *h += sj * *g;
                    }
                }
            }
            let mut change = T::zero();
            let pairs = next.as_mut_slice().iter_mut().zip(s.as_slice()).zip(&half_grad);
            for ((nx, si), h) in pairs {
                let u = *si - step * *h;
                // branch-free soft threshold; +0 inside the dead zone
                let v = (u - threshold).max(T::zero()) + (u + threshold).min(T::zero());
                change = change.max((v - *si).abs());
                *nx = v;
            }
            std::mem::swap(&mut s, &mut next);
            trace(&s);
            if !change.is_finite_value() {
                return Err(Error::NonFinite("projection iterate".into()));
            }
            if change < self.tol {
                return Ok(IpmOutcome {
                    alpha: s,
                    iterations: it,
                    converged: true,
                });
            }
        }
        Ok(IpmOutcome {
            alpha: s,
            iterations: self.max_iter,
            converged: false,
        })
    }
}

/// Solves the specific-part subproblem from a zero start.
pub fn solve_lasso_ipm<T: Real>(
    dictionary: &DMatrix<T>,
    y: &DVector<T>,
    offset: &DVector<T>,
    lambda: T,
    config: &MmsslConfig<T>,
) -> Result<DVector<T>> {
    Ok(LassoIpm::new(dictionary, config)?.solve(y, offset, lambda, None)?.alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::oracle::lasso_objective;
    use crate::solvers::soft_threshold;

    fn rand_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn exact_offset_fit_gives_zero() {
        let d = rand_matrix(6, 4, 3);
        let c = DVector::from_vec(vec![0.5, -0.2, 0.0, 1.0]);
        let y = &d * &c;
        let s = solve_lasso_ipm(&d, &y, &c, 1.0, &MmsslConfig::default()).unwrap();
        assert_eq!(s, DVector::zeros(4));
    }

    #[test]
    fn identity_dictionary_is_soft_threshold() {
        let d = DMatrix::<f64>::identity(5, 5);
        let y = DVector::from_vec(vec![1.0, -0.3, 0.05, -2.0, 0.6]);
        let lambda = 0.4;
        let s = solve_lasso_ipm(&d, &y, &DVector::zeros(5), lambda, &MmsslConfig::default()).unwrap();
        let expected = soft_threshold(&y, lambda / 2.0).unwrap();
        assert!((s - expected).amax() < 1e-9);
    }

    #[test]
    fn objective_never_increases() {
        let d = rand_matrix(6, 10, 9);
        let y = rand_matrix(6, 1, 10).column(0).into_owned();
        let c = rand_matrix(10, 1, 11).column(0).into_owned() * 0.2;
        let cfg = MmsslConfig::default();
        let ipm = LassoIpm::new(&d, &cfg).unwrap();
        let lambda = 0.1;
        let mut prev = lasso_objective(&d, &(&y - &d * &c), &DVector::zeros(10), lambda);
        ipm.solve_traced(&y, &c, lambda, None, |s| {
            let obj = lasso_objective(&d, &(&y - &d * &c), s, lambda);
            assert!(obj <= prev + 1e-12, "{obj} > {prev}");
            prev = obj;
        })
        .unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = MmsslConfig::default();
        assert!(LassoIpm::new(&DMatrix::<f64>::zeros(3, 3), &cfg).is_err());
        let d = DMatrix::<f64>::identity(3, 3);
        let y = DVector::from_vec(vec![1.0, f64::NAN, 0.0]);
        assert!(solve_lasso_ipm(&d, &y, &DVector::zeros(3), 0.1, &cfg).is_err());
        let y = DVector::from_vec(vec![1.0, 0.0]);
        assert!(solve_lasso_ipm(&d, &y, &DVector::zeros(3), 0.1, &cfg).is_err());
        assert!(LassoIpm::with_step_constant(&d, -1.0, &cfg).is_err());
    }
}
