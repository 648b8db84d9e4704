//! Dataset model, JSON-lines ingestion, seeded splits, dictionary construction and a
//! synthetic generator with shared and modality-specific structure.

mod io;
mod split;
mod synth;

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use self::io::{load_dataset, load_dataset_with_schema, save_dataset};
pub use self::split::{build_dictionaries, build_dictionary, split_random};
pub use self::synth::{synth_generate, synth_generate_with_model, SynthConfig, SynthModel};

use crate::error::{Error, Result};
use crate::features::Modality;

/// Binary task: label 1 is DM for `Dm` and IGR for `Igr`; label 0 is healthy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    #[default]
    Dm,
    Igr,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Task::Dm => "dm",
            Task::Igr => "igr",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dm" => Ok(Task::Dm),
            "igr" => Ok(Task::Igr),
            other => Err(Error::InvalidArgument(format!("unknown task {other:?}"))),
        }
    }
}

/// Per-modality vector lengths, indexed by [`Modality::index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub dims: [usize; 3],
}

impl Default for Schema {
    fn default() -> Self {
        Self {
            dims: Modality::ALL.map(Modality::dimension),
        }
    }
}

impl Schema {
    pub fn dim(&self, m: Modality) -> usize {
        self.dims[m.index()]
    }
}

pub const NUM_CLASSES: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiModalSample {
    pub id: String,
    pub label: usize,
    /// One feature vector per modality, indexed by [`Modality::index`].
    pub vectors: [Vec<f64>; 3],
}

impl MultiModalSample {
    pub fn vector(&self, m: Modality) -> &[f64] {
        &self.vectors[m.index()]
    }

    pub fn dvector(&self, m: Modality) -> DVector<f64> {
        DVector::from_column_slice(self.vector(m))
    }

    /// The sample's vectors for the given modalities, in that order.
    pub fn stacked(&self, modalities: &[Modality]) -> Vec<DVector<f64>> {
        modalities.iter().map(|m| self.dvector(*m)).collect()
    }

    fn check(&self, schema: &Schema) -> Result<()> {
        if self.label >= NUM_CLASSES {
            return Err(Error::InvalidArgument(format!(
                "sample {}: label {} is not 0 or 1",
                self.id, self.label
            )));
        }
        for m in Modality::ALL {
            let actual = self.vector(m).len();
            if actual != schema.dim(m) {
                return Err(Error::SampleDimension {
                    id: self.id.clone(),
                    modality: m.to_string(),
                    expected: schema.dim(m),
                    actual,
                });
            }
            if self.vector(m).iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("sample {} {m} vector", self.id)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<MultiModalSample>,
    pub task: Task,
    pub schema: Schema,
}

impl Dataset {
    pub fn new(samples: Vec<MultiModalSample>, task: Task, schema: Schema) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::NoSamples);
        }
        for s in &samples {
            s.check(&schema)?;
        }
        let counts = class_counts(&samples);
        if counts.iter().any(|c| *c == 0) {
            return Err(Error::InvalidArgument(format!(
                "every class needs at least one sample, counts are {counts:?}"
            )));
        }
        Ok(Self {
            samples,
            task,
            schema,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.samples)
    }
}

pub fn class_counts(samples: &[MultiModalSample]) -> Vec<usize> {
    let mut counts = vec![0; NUM_CLASSES];
    for s in samples {
        counts[s.label] += 1;
    }
    counts
}
