//! Wrapper feature selection for tabular binary-diagnosis data.
//!
//! Three population-based binary optimizers (a genetic algorithm, a
//! genotype/phenotype binary PSO and a binary whale optimizer) search the
//! space of feature subsets. Each subset is scored by a KNN classifier's
//! accuracy, weighted against the fraction of features removed. Around the
//! search sits the cleaning pipeline (deduplication, IQR outliers, KNN
//! imputation, SMOTE+ENN, min-max scaling), six from-scratch classifiers and
//! a repeated-split benchmark harness that writes report tables.
//!
//! All numeric data paths are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases at the crate root fix the scalar to `f64`, which is what the
//! CLI uses.

pub mod classifiers;
pub mod dataset;
pub mod error;
pub mod fitness;
pub mod harness;
mod neighbors;
pub mod optimizers;
pub mod preprocess;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use dataset::{FeatureMask, LoadOptions, Matrix, SplitSpec};
pub use fitness::{FitnessConfig, FitnessValue, Validation};
pub use optimizers::{Algorithm, FitnessHistory, RunConfig, Termination};

/// Dataset over `f64` features.
pub type Dataset = dataset::Dataset<f64>;
/// Dataset over `f32` features.
pub type Dataset32 = dataset::Dataset<f32>;
/// Dense row-major `f64` matrix.
pub type Matrix64 = dataset::Matrix<f64>;
/// Fitness evaluator over `f64` training data.
pub type FitnessEvaluator = fitness::FitnessEvaluator<f64>;
/// Trained `f64` model.
pub type Model = classifiers::Model<f64>;
/// Min-max scaler parameters over `f64`.
pub type ScalerParams = preprocess::ScalerParams<f64>;
/// IQR fences over `f64`.
pub type OutlierBounds = preprocess::OutlierBounds<f64>;
