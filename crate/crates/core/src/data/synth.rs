use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Dataset, MultiModalSample, Schema, Task, NUM_CLASSES};
use crate::error::{Error, Result};

/// Parameters of the synthetic generator.
///
/// Class `j` owns a sparse latent code `s_j` seen by every modality through a
/// basis `A_k`, and one sparse code `e_jk` per modality seen through `B_k`. A
/// sample of class `j` is `A_k (s_j + u) + B_k (e_jk + v_k) + n_k` where `u` and
/// `v_k` are Gaussian jitter restricted to the codes' supports (`u` shared by all
/// modalities of the sample) and `n_k` is white noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub dims: [usize; 3],
    pub latent_dim: usize,
    pub shared_support: usize,
    pub specific_support: usize,
    pub noise: f64,
    pub jitter: f64,
    pub samples_per_class: usize,
    pub seed: u64,
    pub task: Task,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            dims: Schema::default().dims,
            latent_dim: 4,
            shared_support: 4,
            specific_support: 2,
            noise: 0.1,
            jitter: 1.0,
            samples_per_class: 60,
            seed: 42,
            task: Task::Dm,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.dims.contains(&0) {
            return bad(format!("dimensions must be positive, got {:?}", self.dims));
        }
        if self.latent_dim == 0 {
            return bad("latent dimension must be positive".into());
        }
        if self.shared_support == 0 || self.shared_support > self.latent_dim {
            return bad(format!(
                "shared support {} must lie in 1..={}",
                self.shared_support, self.latent_dim
            ));
        }
        if self.specific_support > self.latent_dim {
            return bad(format!(
                "specific support {} exceeds latent dimension {}",
                self.specific_support, self.latent_dim
            ));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite() && self.jitter >= 0.0 && self.jitter.is_finite()) {
            return bad("noise and jitter must be finite and non-negative".into());
        }
        if self.samples_per_class == 0 {
            return bad("need at least one sample per class".into());
        }
        Ok(())
    }
}

/// The draws behind a synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthModel {
    pub shared_bases: Vec<DMatrix<f64>>,
    pub specific_bases: Vec<DMatrix<f64>>,
    /// Indexed by class.
    pub shared_codes: Vec<DVector<f64>>,
    /// Indexed by class, then modality.
    pub specific_codes: Vec<Vec<DVector<f64>>>,
    pub jitter: f64,
    pub noise: f64,
}

impl SynthModel {
    /// Class-conditional mean of modality `k`.
    pub fn expected_mean(&self, class: usize, k: usize) -> DVector<f64> {
        &self.shared_bases[k] * &self.shared_codes[class]
            + &self.specific_bases[k] * &self.specific_codes[class][k]
    }

    /// Class-conditional per-coordinate variance of modality `k`.
    pub fn coordinate_variance(&self, class: usize, k: usize) -> DVector<f64> {
        let j2 = self.jitter * self.jitter;
        let rows = self.shared_bases[k].nrows();
        DVector::from_fn(rows, |r, _| {
            let on_support = |basis: &DMatrix<f64>, code: &DVector<f64>| -> f64 {
                code.iter()
                    .enumerate()
                    .filter(|(_, c)| **c != 0.0)
                    .map(|(i, _)| basis[(r, i)].powi(2))
                    .sum()
            };
            j2 * (on_support(&self.shared_bases[k], &self.shared_codes[class])
                + on_support(&self.specific_bases[k], &self.specific_codes[class][k]))
                + self.noise * self.noise
        })
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn sparse_code(rng: &mut ChaCha8Rng, n: usize, support: usize) -> DVector<f64> {
    let mut code = DVector::zeros(n);
    let mut idx = index::sample(rng, n, support).into_vec();
    idx.sort_unstable();
    for i in idx {
        let magnitude = rng.random_range(0.5..1.5);
        code[i] = if rng.random_bool(0.5) { magnitude } else { -magnitude };
    }
    code
}

fn jittered(rng: &mut ChaCha8Rng, code: &DVector<f64>, scale: f64) -> DVector<f64> {
    code.map(|c| if c != 0.0 { c + scale * gaussian(rng) } else { 0.0 })
}

pub fn synth_generate(config: &SynthConfig) -> Result<Dataset> {
    synth_generate_with_model(config).map(|(d, _)| d)
}

pub fn synth_generate_with_model(config: &SynthConfig) -> Result<(Dataset, SynthModel)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let latent = config.latent_dim;
    let basis = |rng: &mut ChaCha8Rng, rows: usize| {
        DMatrix::from_fn(rows, latent, |_, _| gaussian(rng))
    };
    let shared_bases: Vec<_> = config.dims.iter().map(|&m| basis(&mut rng, m)).collect();
    let specific_bases: Vec<_> = config.dims.iter().map(|&m| basis(&mut rng, m)).collect();
    let shared_codes: Vec<_> = (0..NUM_CLASSES)
        .map(|_| sparse_code(&mut rng, latent, config.shared_support))
        .collect();
    let specific_codes: Vec<Vec<_>> = (0..NUM_CLASSES)
        .map(|_| {
            (0..3)
                .map(|_| sparse_code(&mut rng, latent, config.specific_support))
                .collect()
        })
        .collect();

    let mut samples = Vec::with_capacity(NUM_CLASSES * config.samples_per_class);
    for class in 0..NUM_CLASSES {
        for i in 0..config.samples_per_class {
            let shared = jittered(&mut rng, &shared_codes[class], config.jitter);
            let vectors: Vec<Vec<f64>> = (0..3)
                .map(|k| {
                    let specific = jittered(&mut rng, &specific_codes[class][k], config.jitter);
                    let clean = &shared_bases[k] * &shared + &specific_bases[k] * specific;
                    clean.iter().map(|x| x + config.noise * gaussian(&mut rng)).collect()
                })
                .collect();
            let [tongue, face, sublingual]: [Vec<f64>; 3] =
                vectors.try_into().expect("three modalities");
            samples.push(MultiModalSample {
                id: format!("synth-{class}-{i:04}"),
                label: class,
                vectors: [tongue, face, sublingual],
            });
        }
    }
    let model = SynthModel {
        shared_bases,
        specific_bases,
        shared_codes,
        specific_codes,
        jitter: config.jitter,
        noise: config.noise,
    };
    let dataset = Dataset::new(samples, config.task, Schema { dims: config.dims })?;
    Ok((dataset, model))
}
