//! Decision rules: sparse representation, group-sparse representation,
//! nearest neighbors and the fused multi-modal rule.

pub mod fusion;
pub mod gsrc;
pub mod knn;
pub mod src;

pub use self::fusion::{mmssl_classify, MmsslClassifier};
pub use self::gsrc::{group_soft_threshold, gsrc_classify, GsrcClassifier};
pub use self::knn::{knn_classify, KnnClassifier};
pub use self::src::{decide_by_class_residual, src_classify, SrcClassifier};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Outcome of classifying one test sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision<T: Real> {
    pub label: usize,
    /// Fused per-class residuals; the label is their argmin.
    pub per_class_residuals: Vec<T>,
    /// Per-modality, per-class residuals when the rule has several modalities.
    pub per_modality_residuals: Vec<Vec<T>>,
    /// Class-0 residual over the sum of all residuals; larger means less like class 0.
    pub score: T,
}

impl<T: Real> Decision<T> {
    pub(crate) fn from_residuals(per_class_residuals: Vec<T>, per_modality_residuals: Vec<Vec<T>>) -> Self {
        let label = argmin_lowest(&per_class_residuals);
        let total = per_class_residuals.iter().fold(T::zero(), |a, r| a + *r);
        let score = if total > T::zero() {
            per_class_residuals[0] / total
        } else {
            T::lit(0.5)
        };
        Self {
            label,
            per_class_residuals,
            per_modality_residuals,
            score,
        }
    }
}

/// Index of the smallest value, preferring the lowest index on ties.
pub fn argmin_lowest<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// `r_0 / (r_0 + r_1)` for a two-class decision; 0.5 when both residuals vanish.
pub fn residual_score<T: Real>(decision: &Decision<T>) -> Result<T> {
    match decision.per_class_residuals.as_slice() {
        [r0, r1] => {
            let total = *r0 + *r1;
            Ok(if total == T::zero() { T::lit(0.5) } else { *r0 / total })
        }
        other => Err(Error::InvalidArgument(format!(
            "residual score needs a two-class decision, got {} classes",
            other.len()
        ))),
    }
}
