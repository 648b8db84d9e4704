//! Group-sparse representation classification: the l1 penalty is replaced by a sum
//! of per-class l2 norms and solved by proximal gradient with group shrinkage.

use std::ops::Range;

use nalgebra::DVector;

use super::src::decide_by_class_residual;
use super::Decision;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solvers::linalg::{check_finite, power_iteration};
use crate::solvers::{MmsslConfig, ModalDictionary};

/// Scales each group `g` by `max(0, 1 - t / ||g||)`.
pub fn group_soft_threshold<T: Real>(v: &DVector<T>, groups: &[Range<usize>], t: T) -> Result<DVector<T>> {
    if !(t >= T::zero()) {
        return Err(Error::InvalidArgument(format!("threshold must be non-negative, got {t}")));
    }
    let mut out = v.clone();
    for g in groups {
        let mut block = out.rows_mut(g.start, g.len());
        let norm = block.norm();
        let scale = if norm > t { T::one() - t / norm } else { T::zero() };
        block *= scale;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct GsrcClassifier<T: Real> {
    dictionary: ModalDictionary<T>,
    gram: nalgebra::DMatrix<T>,
    sigma: T,
    lambda: T,
    tol: T,
    max_iter: usize,
}

impl<T: Real> GsrcClassifier<T> {
    pub fn new(dictionary: &ModalDictionary<T>, lambda: T, config: &MmsslConfig<T>) -> Result<Self> {
        if !(lambda >= T::zero()) {
            return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
        }
        let gram = dictionary.matrix.transpose() * &dictionary.matrix;
        let lmax = power_iteration(&gram, config.power_iterations, config.power_tol);
        let sigma = config.sigma_safety * T::lit(2.0) * lmax;
        if !(sigma > T::zero()) {
            return Err(Error::InvalidArgument("dictionary has no energy".into()));
        }
        Ok(Self {
            dictionary: dictionary.clone(),
            gram,
            sigma,
            lambda,
            tol: config.tol_inner,
            max_iter: config.max_inner,
        })
    }

    /// Minimizes `||y - D a||^2 + lambda sum_j ||a_j||_2` over class groups.
    pub fn code(&self, y: &DVector<T>) -> Result<DVector<T>> {
        if y.len() != self.dictionary.rows() {
            return Err(Error::DimensionMismatch(format!(
                "dictionary has {} rows, sample has {}",
                self.dictionary.rows(),
                y.len()
            )));
        }
        check_finite(y.iter().copied(), "sample")?;
        let dty = self.dictionary.matrix.transpose() * y;
        let step = T::lit(2.0) / self.sigma;
        let t = self.lambda / self.sigma;
        let mut alpha = DVector::zeros(self.dictionary.atoms());
        for _ in 0..self.max_iter {
            let forward = &alpha - (&self.gram * &alpha - &dty) * step;
            let next = group_soft_threshold(&forward, &self.dictionary.class_slices, t)?;
            let change = (&next - &alpha).amax();
            alpha = next;
            if change < self.tol {
                break;
            }
        }
        Ok(alpha)
    }

    pub fn classify(&self, y: &DVector<T>) -> Result<Decision<T>> {
        let alpha = self.code(y)?;
        Ok(decide_by_class_residual(&self.dictionary, y, &alpha))
    }
}

pub fn gsrc_classify<T: Real>(
    dictionary: &ModalDictionary<T>,
    y: &DVector<T>,
    lambda: T,
    config: &MmsslConfig<T>,
) -> Result<Decision<T>> {
    GsrcClassifier::new(dictionary, lambda, config)?.classify(y)
}
