use nalgebra::DVector;
use rayon::prelude::*;

use super::report::{CellResult, ExperimentReport, RocCurve};
use super::roc::compute_roc;
use super::{DataSource, ExperimentSpec, Method, ModalitySet, WeightMode};
use crate::classifiers::{
    residual_score, Decision, GsrcClassifier, KnnClassifier, MmsslClassifier, SrcClassifier,
};
use crate::data::{
    build_dictionaries, build_dictionary, load_dataset, split_random, synth_generate, Dataset,
    MultiModalSample, NUM_CLASSES,
};
use crate::error::{Error, Result};
use crate::features::Modality;
use crate::solvers::{MmsslConfig, ModalDictionary};

/// Test-set outcome of one (method, modality) cell on one split.
struct CellOutcome {
    accuracy: f64,
    scores: Vec<f64>,
    labels: Vec<usize>,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let dataset = match &spec.source {
        DataSource::Dataset(path) => load_dataset(path, spec.task)?,
        DataSource::Synth(config) => {
            let mut config = config.clone();
            config.task = spec.task;
            synth_generate(&config)?
        }
    };
    let cells = spec.cells();
    let jobs: Vec<(usize, usize)> = spec
        .train_sizes
        .iter()
        .flat_map(|&n| (0..spec.repeats).map(move |r| (n, r)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(n, r)| run_split(&dataset, spec, &cells, n, spec.seed.wrapping_add(r as u64)))
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport {
        spec: Some(spec.clone()),
        ..ExperimentReport::default()
    };
    let roc_size = spec.roc_size();
    for (s, &n) in spec.train_sizes.iter().enumerate() {
        let split_outcomes = &outcomes[s * spec.repeats..(s + 1) * spec.repeats];
        for (c, &(method, modality)) in cells.iter().enumerate() {
            let accuracies = split_outcomes.iter().map(|o| o[c].accuracy).collect();
            report.cells.push(CellResult::new(method, modality, n, accuracies));
            if n == roc_size && !report.roc.iter().any(|r| r.method == method && r.modality == modality) {
                let scores: Vec<f64> = split_outcomes.iter().flat_map(|o| o[c].scores.clone()).collect();
                let labels: Vec<usize> = split_outcomes.iter().flat_map(|o| o[c].labels.clone()).collect();
                report.roc.push(RocCurve {
                    method,
                    modality,
                    train_size: n,
                    roc: compute_roc(&scores, &labels)?,
                });
            }
        }
    }
    Ok(report)
}

fn run_split(
    dataset: &Dataset,
    spec: &ExperimentSpec,
    cells: &[(Method, ModalitySet)],
    n_per_class: usize,
    seed: u64,
) -> Result<Vec<CellOutcome>> {
    let (train, test) = split_random(dataset, n_per_class, seed)?;
    if test.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "training {n_per_class} per class leaves no test samples"
        )));
    }
    let dicts = build_dictionaries(&train, &Modality::ALL)?;
    let labels: Vec<usize> = test.iter().map(|s| s.label).collect();
    cells
        .iter()
        .map(|&(method, set)| {
            let decisions = classify_cell(spec, method, set, &train, &test, &dicts)?;
            let correct = decisions.iter().zip(&labels).filter(|(d, l)| d.label == **l).count();
            let scores = decisions
                .iter()
                .map(residual_score)
                .collect::<Result<Vec<_>>>()?;
            Ok(CellOutcome {
                accuracy: correct as f64 / test.len() as f64,
                scores,
                labels: labels.clone(),
            })
        })
        .collect()
}

fn classify_cell(
    spec: &ExperimentSpec,
    method: Method,
    set: ModalitySet,
    train: &[MultiModalSample],
    test: &[MultiModalSample],
    dicts: &[ModalDictionary<f64>],
) -> Result<Vec<Decision<f64>>> {
    let modalities = set.modalities();
    let lambda = spec.solver.lambda;
    let single = modalities[0];
    let dict = &dicts[single.index()];
    match method {
        Method::Mmssl => {
            let selected: Vec<_> = modalities.iter().map(|m| dicts[m.index()].clone()).collect();
            let mut config = spec.solver.clone();
            if spec.weights == WeightMode::Validation && modalities.len() > 1 {
                config.weights = Some(validation_weights(train, &modalities, &spec.solver)?);
            }
            let classifier = MmsslClassifier::new(&selected, &config)?;
            test.par_iter()
                .map(|s| classifier.classify(&s.stacked(&modalities)))
                .collect()
        }
        Method::Src => {
            let classifier = SrcClassifier::new(dict, lambda, &spec.solver)?;
            test.par_iter().map(|s| classifier.classify(&s.dvector(single))).collect()
        }
        Method::Gsrc => {
            let classifier = GsrcClassifier::new(dict, lambda, &spec.solver)?;
            test.par_iter().map(|s| classifier.classify(&s.dvector(single))).collect()
        }
        Method::Knn => {
            let points: Vec<(DVector<f64>, usize)> =
                train.iter().map(|s| (s.dvector(single), s.label)).collect();
            let classifier = KnnClassifier::new(points, spec.knn_k.min(train.len()))?;
            test.par_iter().map(|s| classifier.classify(&s.dvector(single))).collect()
        }
    }
}

/// Fusion weights proportional to each modality's SRC accuracy on a held-out
/// fifth of every class in `train` (at least one sample per class), coded over
/// the remaining samples. Uniform when every accuracy is zero.
pub fn validation_weights(
    train: &[MultiModalSample],
    modalities: &[Modality],
    config: &MmsslConfig<f64>,
) -> Result<Vec<f64>> {
    let mut fit = Vec::new();
    let mut held = Vec::new();
    for class in 0..NUM_CLASSES {
        let members: Vec<&MultiModalSample> = train.iter().filter(|s| s.label == class).collect();
        if members.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "validation weights need at least 2 training samples of class {class}"
            )));
        }
        let hold = (members.len() / 5).max(1);
        let cut = members.len() - hold;
        fit.extend(members[..cut].iter().map(|s| (*s).clone()));
        held.extend(members[cut..].iter().map(|s| (*s).clone()));
    }
    let accuracies = modalities
        .iter()
        .map(|&m| {
            let classifier = SrcClassifier::new(&build_dictionary(&fit, m)?, config.lambda, config)?;
            let mut correct = 0usize;
            for s in &held {
                if classifier.classify(&s.dvector(m))?.label == s.label {
                    correct += 1;
                }
            }
            Ok(correct as f64 / held.len() as f64)
        })
        .collect::<Result<Vec<f64>>>()?;
    let total: f64 = accuracies.iter().sum();
    Ok(if total > 0.0 {
        accuracies.iter().map(|a| a / total).collect()
    } else {
        vec![1.0 / modalities.len() as f64; modalities.len()]
    })
}
