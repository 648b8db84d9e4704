//! Fused multi-modal decision: weighted sum of class-restricted residuals of the
//! combined similar and specific codes.

use nalgebra::DVector;

use super::Decision;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solvers::{MmsslConfig, MmsslSolution, MmsslSolver, ModalDictionary};

#[derive(Debug)]
pub struct MmsslClassifier<T: Real> {
    dictionaries: Vec<ModalDictionary<T>>,
    solver: MmsslSolver<T>,
    weights: Vec<T>,
}

impl<T: Real> MmsslClassifier<T> {
    pub fn new(dictionaries: &[ModalDictionary<T>], config: &MmsslConfig<T>) -> Result<Self> {
        let weights = config.weights_for(dictionaries.len())?;
        let solver = MmsslSolver::new(dictionaries, config)?;
        let classes = dictionaries[0].classes();
        for (k, d) in dictionaries.iter().enumerate() {
            if d.class_slices != dictionaries[0].class_slices {
                return Err(Error::DimensionMismatch(format!(
                    "dictionary {k} groups its atoms differently from dictionary 0"
                )));
            }
            debug_assert_eq!(d.classes(), classes);
        }
        Ok(Self {
            dictionaries: dictionaries.to_vec(),
            solver,
            weights,
        })
    }

    pub fn solve(&self, sample: &[DVector<T>]) -> Result<MmsslSolution<T>> {
        self.solver.solve(sample)
    }

    pub fn classify(&self, sample: &[DVector<T>]) -> Result<Decision<T>> {
        let solution = self.solve(sample)?;
        Ok(self.decide(sample, &solution))
    }

    pub fn decide(&self, sample: &[DVector<T>], solution: &MmsslSolution<T>) -> Decision<T> {
        let classes = self.dictionaries[0].classes();
        let mut fused = vec![T::zero(); classes];
        let mut per_modality = Vec::with_capacity(self.dictionaries.len());
        for (k, (dict, pair)) in self.dictionaries.iter().zip(&solution.pairs).enumerate() {
            let alpha = pair.combined();
            let residuals: Vec<T> = (0..classes)
                .map(|j| dict.class_residual(&sample[k], &alpha, j))
                .collect();
            for (f, r) in fused.iter_mut().zip(&residuals) {
                *f += self.weights[k] * *r;
            }
            per_modality.push(residuals);
        }
        Decision::from_residuals(fused, per_modality)
    }
}

pub fn mmssl_classify<T: Real>(
    dictionaries: &[ModalDictionary<T>],
    sample: &[DVector<T>],
    config: &MmsslConfig<T>,
) -> Result<Decision<T>> {
    MmsslClassifier::new(dictionaries, config)?.classify(sample)
}
