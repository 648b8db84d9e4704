use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::roc::Roc;
use super::{ExperimentSpec, Method, ModalitySet};
use crate::error::{Error, Result};

/// Per-repeat accuracies of one (method, modality, train size) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub method: Method,
    pub modality: ModalitySet,
    pub train_size: usize,
    pub accuracies: Vec<f64>,
    pub mean: f64,
    pub max: f64,
    pub min: f64,
}

impl CellResult {
    pub fn new(method: Method, modality: ModalitySet, train_size: usize, accuracies: Vec<f64>) -> Self {
        let max = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = accuracies.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = (accuracies.iter().sum::<f64>() / accuracies.len() as f64).clamp(min, max);
        Self {
            method,
            modality,
            train_size,
            accuracies,
            mean,
            max,
            min,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub method: Method,
    pub modality: ModalitySet,
    pub train_size: usize,
    pub roc: Roc,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExperimentReport {
    /// The experiment configuration that produced the report.
    pub spec: Option<ExperimentSpec>,
    pub cells: Vec<CellResult>,
    pub roc: Vec<RocCurve>,
}

impl ExperimentReport {
    pub fn cell(&self, method: Method, modality: ModalitySet, train_size: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.method == method && c.modality == modality && c.train_size == train_size)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// `accuracy.csv`, `aggregate.csv` and `roc.csv`.
    Csv,
    /// `report.json`.
    Json,
}

pub const ACCURACY_CSV: &str = "accuracy.csv";
pub const AGGREGATE_CSV: &str = "aggregate.csv";
pub const ROC_CSV: &str = "roc.csv";
pub const REPORT_JSON: &str = "report.json";

/// Writes the report into directory `dir` and returns the paths written.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        ReportFormat::Json => {
            let path = dir.join(REPORT_JSON);
            let json = serde_json::to_string_pretty(report).map_err(|e| Error::format(&path, e))?;
            let mut f = File::create(&path).map_err(|e| Error::io(&path, e))?;
            writeln!(f, "{json}").map_err(|e| Error::io(&path, e))?;
            Ok(vec![path])
        }
        ReportFormat::Csv => {
            let accuracy = dir.join(ACCURACY_CSV);
            write_csv(&accuracy, &["method", "modality", "train_size", "repeat", "accuracy"], |w| {
                for c in &report.cells {
                    for (r, a) in c.accuracies.iter().enumerate() {
                        w.serialize((c.method, c.modality, c.train_size, r, a))?;
                    }
                }
                Ok(())
            })?;
            let aggregate = dir.join(AGGREGATE_CSV);
            write_csv(&aggregate, &["method", "modality", "train_size", "mean", "max", "min"], |w| {
                for c in &report.cells {
                    w.serialize((c.method, c.modality, c.train_size, c.mean, c.max, c.min))?;
                }
                Ok(())
            })?;
            let roc = dir.join(ROC_CSV);
            write_csv(&roc, &["method", "modality", "fpr", "tpr"], |w| {
                for curve in &report.roc {
                    for (fpr, tpr) in &curve.roc.points {
                        w.serialize((curve.method, curve.modality, fpr, tpr))?;
                    }
                    w.serialize((curve.method, curve.modality, "auc", curve.roc.auc))?;
                }
                Ok(())
            })?;
            Ok(vec![accuracy, aggregate, roc])
        }
    }
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl FnOnce(&mut csv::Writer<File>) -> csv::Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)
        .and_then(|_| rows(&mut w))
        .map_err(|e| Error::format(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}
