//! k-nearest-neighbor majority vote under the Euclidean metric.

use std::cmp::Ordering;

use nalgebra::DVector;

use super::Decision;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct KnnClassifier<T: Real> {
    train: Vec<(DVector<T>, usize)>,
    classes: usize,
    k: usize,
}

impl<T: Real> KnnClassifier<T> {
    pub fn new(train: Vec<(DVector<T>, usize)>, k: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::InvalidArgument("empty training set".into()));
        }
        if k == 0 || k > train.len() {
            return Err(Error::InvalidArgument(format!(
                "k must lie in 1..={}, got {k}",
                train.len()
            )));
        }
        let dim = train[0].0.len();
        if train.iter().any(|(x, _)| x.len() != dim) {
            return Err(Error::DimensionMismatch("training vectors differ in length".into()));
        }
        let classes = train.iter().map(|(_, l)| *l).max().unwrap_or(0) + 1;
        Ok(Self { train, classes, k })
    }

    /// Votes among the `k` closest training points; distance ties keep training order
    /// and vote ties go to the lowest class. Per-class residuals are `(k - votes) / k`.
    pub fn classify(&self, y: &DVector<T>) -> Result<Decision<T>> {
        if y.len() != self.train[0].0.len() {
            return Err(Error::DimensionMismatch(format!(
                "training vectors have length {}, sample has {}",
                self.train[0].0.len(),
                y.len()
            )));
        }
        let mut dist: Vec<(T, usize)> = self
            .train
            .iter()
            .map(|(x, label)| ((x - y).norm_squared(), *label))
            .collect();
        // stable sort keeps training order among equal distances
        dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
        let mut votes = vec![0usize; self.classes];
        for (_, label) in dist.iter().take(self.k) {
            votes[*label] += 1;
        }
        let k = T::from_count(self.k);
        let residuals = votes
            .iter()
            .map(|v| T::from_count(self.k - v) / k)
            .collect();
        Ok(Decision::from_residuals(residuals, vec![]))
    }
}

pub fn knn_classify<T: Real>(train: &[(DVector<T>, usize)], y: &DVector<T>, k: usize) -> Result<Decision<T>> {
    KnnClassifier::new(train.to_vec(), k)?.classify(y)
}
