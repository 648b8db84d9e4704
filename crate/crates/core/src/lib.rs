//! Multi-modal similar and specific sparse representation learning.
//!
//! Each modality's test vector is coded over its own dictionary of training
//! samples. The code is split into a part shared across modalities and a
//! modality-specific part, both l1-penalized, and the decision fuses the
//! class-restricted reconstruction residuals.

pub mod classifiers;
pub mod data;
pub mod error;
pub mod features;
pub mod harness;
pub mod scalar;
pub mod solvers;

pub use error::{Error, Result};
pub use features::Modality;
pub use scalar::Real;


pub type Config = solvers::MmsslConfig<f64>;
pub type Config32 = solvers::MmsslConfig<f32>;
pub type Dictionary = solvers::ModalDictionary<f64>;
pub type Dictionary32 = solvers::ModalDictionary<f32>;
pub type Solution = solvers::MmsslSolution<f64>;
pub type Solution32 = solvers::MmsslSolution<f32>;
