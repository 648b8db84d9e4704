//! Sparse representation classification over one dictionary.

use nalgebra::DVector;

use super::Decision;
use crate::error::Result;
use crate::scalar::Real;
use crate::solvers::{LassoIpm, MmsslConfig, ModalDictionary};

/// SRC bound to one dictionary so the projection step constant is computed once.
#[derive(Debug, Clone)]
pub struct SrcClassifier<T: Real> {
    dictionary: ModalDictionary<T>,
    solver: LassoIpm<T>,
    lambda: T,
}

impl<T: Real> SrcClassifier<T> {
    pub fn new(dictionary: &ModalDictionary<T>, lambda: T, config: &MmsslConfig<T>) -> Result<Self> {
        Ok(Self {
            dictionary: dictionary.clone(),
            solver: LassoIpm::new(&dictionary.matrix, config)?,
            lambda,
        })
    }

    /// Lasso code of `y` over the whole dictionary.
    pub fn code(&self, y: &DVector<T>) -> Result<DVector<T>> {
        let zero = DVector::zeros(self.dictionary.atoms());
        Ok(self.solver.solve(y, &zero, self.lambda, None)?.alpha)
    }

    pub fn classify(&self, y: &DVector<T>) -> Result<Decision<T>> {
        let alpha = self.code(y)?;
        Ok(decide_by_class_residual(&self.dictionary, y, &alpha))
    }
}

/// Class-restricted residuals `||y - D_j alpha_j||^2` and their argmin.
pub fn decide_by_class_residual<T: Real>(
    dictionary: &ModalDictionary<T>,
    y: &DVector<T>,
    alpha: &DVector<T>,
) -> Decision<T> {
    let residuals: Vec<T> = (0..dictionary.classes())
        .map(|j| dictionary.class_residual(y, alpha, j))
        .collect();
    Decision::from_residuals(residuals, vec![])
}

pub fn src_classify<T: Real>(
    dictionary: &ModalDictionary<T>,
    y: &DVector<T>,
    lambda: T,
    config: &MmsslConfig<T>,
) -> Result<Decision<T>> {
    SrcClassifier::new(dictionary, lambda, config)?.classify(y)
}
