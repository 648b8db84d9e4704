use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dataset, MultiModalSample, Schema, Task};
use crate::error::{Error, Result};

/// One line of the dataset file.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    label: usize,
    tongue: Vec<f64>,
    face: Vec<f64>,
    sublingual: Vec<f64>,
}

impl From<Record> for MultiModalSample {
    fn from(r: Record) -> Self {
        Self {
            id: r.id,
            label: r.label,
            vectors: [r.tongue, r.face, r.sublingual],
        }
    }
}

impl From<&MultiModalSample> for Record {
    fn from(s: &MultiModalSample) -> Self {
        let [tongue, face, sublingual] = s.vectors.clone();
        Self {
            id: s.id.clone(),
            label: s.label,
            tongue,
            face,
            sublingual,
        }
    }
}

/// Loads a JSON-lines dataset, taking the vector lengths from the first record.
pub fn load_dataset(path: &Path, task: Task) -> Result<Dataset> {
    load_dataset_with_schema(path, task, None)
}

/// Loads a JSON-lines dataset; every record must match `schema` when given.
pub fn load_dataset_with_schema(path: &Path, task: Task, schema: Option<Schema>) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut samples = Vec::new();
    let mut schema = schema;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let sample = MultiModalSample::from(record);
        let expected = *schema.get_or_insert(Schema {
            dims: [
                sample.vectors[0].len(),
                sample.vectors[1].len(),
                sample.vectors[2].len(),
            ],
        });
        sample.check(&expected).map_err(|e| match e {
            e @ Error::SampleDimension { .. } => e,
            other => Error::Parse {
                line: line_no,
                message: other.to_string(),
            },
        })?;
        samples.push(sample);
    }
    let schema = schema.ok_or(Error::NoSamples)?;
    Dataset::new(samples, task, schema)
}

pub fn save_dataset(dataset: &Dataset, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for s in &dataset.samples {
        let line = serde_json::to_string(&Record::from(s)).map_err(|e| Error::format(path, e))?;
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
