use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ROC points from `(0, 0)` to `(1, 1)` and the trapezoid area under them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roc {
    /// `(false positive rate, true positive rate)` pairs.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Sweeps the threshold down through the distinct scores, calling a sample
/// positive when its score is at least the threshold. Label 1 is positive.
pub fn compute_roc(scores: &[f64], labels: &[usize]) -> Result<Roc> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(l) = labels.iter().find(|l| **l > 1) {
        return Err(Error::InvalidArgument(format!("ROC labels must be 0 or 1, got {l}")));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("ROC scores".into()));
    }
    let positives = labels.iter().filter(|l| **l == 1).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::InvalidArgument(
            "ROC needs both positive and negative samples".into(),
        ));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }
    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum();
    Ok(Roc { points, auc })
}
