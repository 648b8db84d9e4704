//! Evaluation protocol: repeated seeded splits, per-method accuracy tables, ROC
//! curves from residual scores, and CSV/JSON reports.

mod experiment;
mod report;
mod roc;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use self::experiment::{run_experiment, validation_weights};
pub use self::report::{emit_report, CellResult, ExperimentReport, ReportFormat, RocCurve};
pub use self::roc::{compute_roc, Roc};

use crate::data::{SynthConfig, Task};
use crate::error::{Error, Result};
use crate::features::Modality;
use crate::solvers::MmsslConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mmssl,
    Src,
    Gsrc,
    Knn,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mmssl => "mmssl",
            Method::Src => "src",
            Method::Gsrc => "gsrc",
            Method::Knn => "knn",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mmssl" => Ok(Method::Mmssl),
            "src" => Ok(Method::Src),
            "gsrc" => Ok(Method::Gsrc),
            "knn" => Ok(Method::Knn),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// One modality, or all three fused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModalitySet {
    Tongue,
    Face,
    Sublingual,
    All,
}

impl ModalitySet {
    pub fn modalities(self) -> Vec<Modality> {
        match self {
            ModalitySet::Tongue => vec![Modality::Tongue],
            ModalitySet::Face => vec![Modality::Face],
            ModalitySet::Sublingual => vec![Modality::Sublingual],
            ModalitySet::All => Modality::ALL.to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModalitySet::Tongue => "tongue",
            ModalitySet::Face => "face",
            ModalitySet::Sublingual => "sublingual",
            ModalitySet::All => "all",
        }
    }
}

impl fmt::Display for ModalitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ModalitySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ModalitySet::All),
            other => match other.parse::<Modality>()? {
                Modality::Tongue => Ok(ModalitySet::Tongue),
                Modality::Face => Ok(ModalitySet::Face),
                Modality::Sublingual => Ok(ModalitySet::Sublingual),
            },
        }
    }
}

/// How the fused rule weighs modalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// `1 / K` each.
    #[default]
    Uniform,
    /// Proportional to each modality's SRC accuracy on a held-out fifth of the
    /// training split.
    Validation,
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(WeightMode::Uniform),
            "validation" => Ok(WeightMode::Validation),
            other => Err(Error::InvalidArgument(format!("unknown weight mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    Dataset(PathBuf),
    Synth(SynthConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub source: DataSource,
    pub task: Task,
    pub methods: Vec<Method>,
    pub modalities: Vec<ModalitySet>,
    /// Training samples drawn per class.
    pub train_sizes: Vec<usize>,
    pub repeats: usize,
    /// Repeat `r` splits with seed `seed + r`.
    pub seed: u64,
    pub solver: MmsslConfig<f64>,
    pub weights: WeightMode,
    pub knn_k: usize,
    /// Train size whose pooled test scores feed the ROC curves; the largest size
    /// when unset.
    pub roc_train_size: Option<usize>,
}

impl ExperimentSpec {
    pub fn new(source: DataSource, task: Task) -> Self {
        Self {
            source,
            task,
            methods: vec![Method::Mmssl, Method::Src],
            modalities: vec![
                ModalitySet::Tongue,
                ModalitySet::Face,
                ModalitySet::Sublingual,
            ],
            train_sizes: (30..=100).step_by(10).collect(),
            repeats: 5,
            seed: 7,
            solver: MmsslConfig::default(),
            weights: WeightMode::Uniform,
            knn_k: 5,
            roc_train_size: None,
        }
    }

    /// The (method, modality) cells to evaluate, in report order. The fused
    /// modality set pairs only with mmssl.
    pub fn cells(&self) -> Vec<(Method, ModalitySet)> {
        self.methods
            .iter()
            .flat_map(|m| self.modalities.iter().map(move |s| (*m, *s)))
            .filter(|(m, s)| *m == Method::Mmssl || *s != ModalitySet::All)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.repeats == 0 {
            return bad("repeats must be at least 1".into());
        }
        if self.methods.is_empty() || self.modalities.is_empty() || self.train_sizes.is_empty() {
            return bad("methods, modalities and train sizes must be non-empty".into());
        }
        if self.train_sizes.contains(&0) {
            return bad("train sizes must be positive".into());
        }
        if self.knn_k == 0 {
            return bad("k must be at least 1".into());
        }
        if self.modalities.contains(&ModalitySet::All) && !self.methods.contains(&Method::Mmssl) {
            return bad("modality \"all\" is only available to mmssl".into());
        }
        if self.cells().is_empty() {
            return bad("no method can run on the requested modalities".into());
        }
        if let Some(r) = self.roc_train_size {
            if !self.train_sizes.contains(&r) {
                return bad(format!("ROC train size {r} is not among the train sizes"));
            }
        }
        if self.solver.weights.is_some() {
            return bad("fusion weights come from the weight mode, not the solver config".into());
        }
        self.solver.validate()
    }

    pub fn roc_size(&self) -> usize {
        self.roc_train_size
            .unwrap_or_else(|| *self.train_sizes.iter().max().expect("validated"))
    }
}
