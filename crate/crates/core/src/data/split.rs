use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{class_counts, Dataset, MultiModalSample, NUM_CLASSES};
use crate::error::{Error, Result};
use crate::features::Modality;
use crate::solvers::ModalDictionary;

/// Draws `n_per_class` training samples from each class; everything else is test.
///
/// Training samples come out grouped by class in draw order. Test samples keep the
/// dataset order. The same seed always gives the same split.
pub fn split_random(
    dataset: &Dataset,
    n_per_class: usize,
    seed: u64,
) -> Result<(Vec<MultiModalSample>, Vec<MultiModalSample>)> {
    let counts = dataset.class_counts();
    if counts.iter().any(|c| *c < n_per_class) {
        return Err(Error::SplitTooLarge {
            requested: n_per_class,
            counts,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; dataset.len()];
    let mut train = Vec::with_capacity(n_per_class * NUM_CLASSES);
    for class in 0..NUM_CLASSES {
        let mut idx: Vec<usize> = (0..dataset.len())
            .filter(|&i| dataset.samples[i].label == class)
            .collect();
        idx.shuffle(&mut rng);
        for &i in &idx[..n_per_class] {
            in_train[i] = true;
            train.push(dataset.samples[i].clone());
        }
    }
    let test = dataset
        .samples
        .iter()
        .zip(&in_train)
        .filter(|(_, t)| !**t)
        .map(|(s, _)| s.clone())
        .collect();
    Ok((train, test))
}

/// One modality's dictionary: columns grouped by class, unit norm.
pub fn build_dictionary(train: &[MultiModalSample], modality: Modality) -> Result<ModalDictionary<f64>> {
    let counts = class_counts(train);
    if let Some(j) = counts.iter().position(|c| *c == 0) {
        return Err(Error::InvalidArgument(format!("no training samples of class {j}")));
    }
    let rows = train[0].vector(modality).len();
    let mut ordered: Vec<&MultiModalSample> = train.iter().collect();
    ordered.sort_by_key(|s| s.label);
    let mut matrix = DMatrix::<f64>::zeros(rows, ordered.len());
    for (j, s) in ordered.iter().enumerate() {
        let v = s.vector(modality);
        if v.len() != rows {
            return Err(Error::SampleDimension {
                id: s.id.clone(),
                modality: modality.to_string(),
                expected: rows,
                actual: v.len(),
            });
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroNormSample(s.id.clone()));
        }
        for (r, x) in v.iter().enumerate() {
            matrix[(r, j)] = x / norm;
        }
    }
    ModalDictionary::new(matrix, ModalDictionary::<f64>::slices_from_counts(&counts))
}

pub fn build_dictionaries(
    train: &[MultiModalSample],
    modalities: &[Modality],
) -> Result<Vec<ModalDictionary<f64>>> {
    if train.is_empty() {
        return Err(Error::NoSamples);
    }
    modalities.iter().map(|m| build_dictionary(train, *m)).collect()
}
