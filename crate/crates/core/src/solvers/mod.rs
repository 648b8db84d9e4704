//! Numerical kernels: soft thresholding, the coupled closed-form update of the
//! similar coefficients, the augmented Lagrangian bookkeeping, the iterative
//! projection lasso solver and the alternating multi-modal solver.

pub mod alm;
pub mod ipm;
pub mod linalg;
pub mod multimodal;
pub mod oracle;
pub mod threshold;

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use self::alm::{
    precompute_pk, precompute_q, update_alpha_c, update_alpha_c_relaxed, update_multiplier,
    AlmState,
};
pub use self::ipm::{solve_lasso_ipm, IpmOutcome, LassoIpm};
pub use self::multimodal::{mmssl_objective, mmssl_solve, similarity_spread, MmsslSolution, MmsslSolver};
pub use self::oracle::{lasso_bruteforce_oracle, lasso_objective, ORACLE_MAX_COLUMNS};
pub use self::threshold::soft_threshold;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One modality's training matrix with columns grouped by class.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalDictionary<T: Real> {
    pub matrix: DMatrix<T>,
    pub class_slices: Vec<Range<usize>>,
}

impl<T: Real> ModalDictionary<T> {
    /// Wraps a matrix as-is after checking that the slices partition its columns in order.
    pub fn new(matrix: DMatrix<T>, class_slices: Vec<Range<usize>>) -> Result<Self> {
        let mut next = 0;
        for (j, s) in class_slices.iter().enumerate() {
            if s.start != next || s.end < s.start {
                return Err(Error::InvalidArgument(format!(
                    "class slice {j} ({s:?}) does not continue the partition at column {next}"
                )));
            }
            next = s.end;
        }
        if next != matrix.ncols() {
            return Err(Error::InvalidArgument(format!(
                "class slices cover {next} columns but the dictionary has {}",
                matrix.ncols()
            )));
        }
        if matrix.ncols() == 0 || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument("empty dictionary".into()));
        }
        linalg::check_finite(matrix.iter().copied(), "dictionary")?;
        Ok(Self {
            matrix,
            class_slices,
        })
    }

    /// Builds a dictionary whose columns are scaled to unit Euclidean norm.
    pub fn normalized(mut matrix: DMatrix<T>, class_slices: Vec<Range<usize>>) -> Result<Self> {
        for (j, mut col) in matrix.column_iter_mut().enumerate() {
            let norm = col.norm();
            if !(norm > T::zero()) {
                return Err(Error::InvalidArgument(format!("dictionary column {j} has zero norm")));
            }
            col /= norm;
        }
        Self::new(matrix, class_slices)
    }

    /// Consecutive slices from per-class column counts.
    pub fn slices_from_counts(counts: &[usize]) -> Vec<Range<usize>> {
        let mut start = 0;
        counts
            .iter()
            .map(|&c| {
                let r = start..start + c;
                start += c;
                r
            })
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn atoms(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn classes(&self) -> usize {
        self.class_slices.len()
    }

    /// `y - D_j alpha_j` squared, using only class `j`'s columns and coefficients.
    pub fn class_residual(&self, y: &DVector<T>, alpha: &DVector<T>, class: usize) -> T {
        let s = &self.class_slices[class];
        let d = self.matrix.columns(s.start, s.len());
        let a = alpha.rows(s.start, s.len());
        (y - d * a).norm_squared()
    }
}

/// Similar and specific coefficient parts for one modality.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair<T: Real> {
    pub alpha_c: DVector<T>,
    pub alpha_s: DVector<T>,
}

impl<T: Real> CoefficientPair<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            alpha_c: DVector::zeros(n),
            alpha_s: DVector::zeros(n),
        }
    }

    pub fn combined(&self) -> DVector<T> {
        &self.alpha_c + &self.alpha_s
    }
}

/// Solver parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmsslConfig<T: Real> {
    /// Weight of the l1 penalties.
    pub lambda: T,
    /// Weight pulling each similar part toward their mean.
    pub tau: T,
    /// Initial augmented Lagrangian step.
    pub mu0: T,
    pub mu_growth: T,
    /// Multiplier (> 1) on `2 * lambda_max(D^T D)` when choosing the projection step.
    pub sigma_safety: T,
    pub tol_outer: T,
    pub tol_inner: T,
    pub max_outer: usize,
    pub max_inner: usize,
    pub power_iterations: usize,
    pub power_tol: T,
    /// Solve the similar-part subproblem to convergence (primal residual below
    /// `tol_outer`, at most `max_outer` ALM steps) before each specific-part solve,
    /// restarting the step at `mu0` every pass. When `false`, one ALM step is taken
    /// per pass and the step keeps growing across passes.
    pub alm_inner_loop: bool,
    /// Fusion weights, one per modality; `None` means uniform.
    pub weights: Option<Vec<T>>,
}

impl<T: Real> Default for MmsslConfig<T> {
    fn default() -> Self {
        Self {
            lambda: T::lit(0.01),
            tau: T::lit(0.1),
            mu0: T::one(),
            mu_growth: T::lit(1.2),
            sigma_safety: T::lit(1.01),
            tol_outer: T::lit(1e-8),
            tol_inner: T::lit(1e-10),
            max_outer: 200,
            max_inner: 1000,
            power_iterations: 50,
            power_tol: T::lit(1e-10),
            alm_inner_loop: true,
            weights: None,
        }
    }
}

impl<T: Real> MmsslConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.lambda >= T::zero()) {
            return bad(format!("lambda must be non-negative, got {}", self.lambda));
        }
        if !(self.tau >= T::zero()) {
            return bad(format!("tau must be non-negative, got {}", self.tau));
        }
        if !(self.mu0 > T::zero()) {
            return bad(format!("mu0 must be positive, got {}", self.mu0));
        }
        if !(self.mu_growth > T::one()) {
            return bad(format!("mu growth must exceed 1, got {}", self.mu_growth));
        }
        if !(self.sigma_safety > T::one()) {
            return bad(format!("sigma safety must exceed 1, got {}", self.sigma_safety));
        }
        if !(self.tol_outer > T::zero() && self.tol_inner > T::zero()) {
            return bad("tolerances must be positive".into());
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return bad("iteration caps must be at least 1".into());
        }
        if let Some(w) = &self.weights {
            if w.iter().any(|x| !(*x >= T::zero())) {
                return bad("fusion weights must be non-negative".into());
            }
            let sum = w.iter().fold(T::zero(), |a, x| a + *x);
            if (sum - T::one()).abs() > T::lit(1e-6) {
                return bad(format!("fusion weights must sum to 1, got {sum}"));
            }
        }
        Ok(())
    }

    /// Fusion weights for `k` modalities.
    pub fn weights_for(&self, k: usize) -> Result<Vec<T>> {
        match &self.weights {
            None => Ok(vec![T::one() / T::from_count(k); k]),
            Some(w) if w.len() == k => Ok(w.clone()),
            Some(w) => Err(Error::DimensionMismatch(format!(
                "{} fusion weights for {k} modalities",
                w.len()
            ))),
        }
    }
}
