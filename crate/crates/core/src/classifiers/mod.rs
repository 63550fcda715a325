//! From-scratch binary classifiers with training-time instrumentation.

mod forest;
mod knn;
mod logistic;
mod metrics;
mod mlp;
mod svm;
mod tree;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use forest::{MaxFeatures, RandomForest};
pub use knn::{knn_vote, Knn};
pub use logistic::LogisticRegression;
pub use metrics::{confusion, metrics, ConfusionMatrix, Metrics};
pub use mlp::Mlp;
pub use svm::LinearSvm;
pub use tree::DecisionTree;

use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which model to train and with what hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Knn {
        #[serde(default = "defaults::knn_k")]
        k: usize,
    },
    DecisionTree {
        #[serde(default = "defaults::min_samples_split")]
        min_samples_split: usize,
    },
    RandomForest {
        #[serde(default = "defaults::trees")]
        trees: usize,
        #[serde(default = "defaults::yes")]
        bootstrap: bool,
        #[serde(default)]
        max_features: MaxFeatures,
    },
    LogisticRegression {
        #[serde(default = "defaults::lr_rate")]
        learning_rate: f64,
        #[serde(default = "defaults::lr_epochs")]
        max_epochs: usize,
        #[serde(default = "defaults::lr_tol")]
        tol: f64,
    },
    LinearSvm {
        #[serde(default = "defaults::svm_lambda")]
        lambda: f64,
        #[serde(default = "defaults::svm_epochs")]
        epochs: usize,
    },
    Mlp {
        #[serde(default = "defaults::hidden")]
        hidden: Vec<usize>,
        #[serde(default = "defaults::mlp_rate")]
        learning_rate: f64,
        #[serde(default = "defaults::mlp_epochs")]
        max_epochs: usize,
        #[serde(default = "defaults::mlp_tol")]
        tol: f64,
    },
}

mod defaults {
    pub fn knn_k() -> usize {
        10
    }
    pub fn min_samples_split() -> usize {
        2
    }
    pub fn trees() -> usize {
        50
    }
    pub fn yes() -> bool {
        true
    }
    pub fn lr_rate() -> f64 {
        0.1
    }
    pub fn lr_epochs() -> usize {
        1000
    }
    pub fn lr_tol() -> f64 {
        1e-6
    }
    pub fn svm_lambda() -> f64 {
        1e-3
    }
    pub fn svm_epochs() -> usize {
        1000
    }
    pub fn hidden() -> Vec<usize> {
        vec![10, 10]
    }
    pub fn mlp_rate() -> f64 {
        0.3
    }
    pub fn mlp_epochs() -> usize {
        5000
    }
    pub fn mlp_tol() -> f64 {
        1e-5
    }
}

impl ClassifierSpec {
    pub fn knn() -> Self {
        Self::Knn { k: defaults::knn_k() }
    }

    pub fn decision_tree() -> Self {
        Self::DecisionTree {
            min_samples_split: defaults::min_samples_split(),
        }
    }

    pub fn random_forest() -> Self {
        Self::RandomForest {
            trees: defaults::trees(),
            bootstrap: true,
            max_features: MaxFeatures::Sqrt,
        }
    }

    pub fn logistic_regression() -> Self {
        Self::LogisticRegression {
            learning_rate: defaults::lr_rate(),
            max_epochs: defaults::lr_epochs(),
            tol: defaults::lr_tol(),
        }
    }

    pub fn linear_svm() -> Self {
        Self::LinearSvm {
            lambda: defaults::svm_lambda(),
            epochs: defaults::svm_epochs(),
        }
    }

    pub fn mlp() -> Self {
        Self::Mlp {
            hidden: defaults::hidden(),
            learning_rate: defaults::mlp_rate(),
            max_epochs: defaults::mlp_epochs(),
            tol: defaults::mlp_tol(),
        }
    }

    /// RF, NN, DT, SVM, LR, KNN.
    pub fn standard_set() -> Vec<Self> {
        vec![
            Self::random_forest(),
            Self::mlp(),
            Self::decision_tree(),
            Self::linear_svm(),
            Self::logistic_regression(),
            Self::knn(),
        ]
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            Self::Knn { .. } => "KNN",
            Self::DecisionTree { .. } => "DT",
            Self::RandomForest { .. } => "RF",
            Self::LogisticRegression { .. } => "LR",
            Self::LinearSvm { .. } => "SVM",
            Self::Mlp { .. } => "NN",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("{}: {what}", self.short_name())));
        match self {
            Self::Knn { k } if *k == 0 => bad("k must be >= 1"),
            Self::DecisionTree { min_samples_split } if *min_samples_split < 2 => bad("min_samples_split must be >= 2"),
            Self::RandomForest { trees, .. } if *trees == 0 => bad("trees must be >= 1"),
            Self::LogisticRegression { learning_rate, max_epochs, .. }
                if !(*learning_rate > 0.0) || *max_epochs == 0 =>
            {
                bad("learning rate and epochs must be positive")
            }
            Self::LinearSvm { lambda, epochs } if !(*lambda > 0.0) || *epochs == 0 => {
                bad("lambda and epochs must be positive")
            }
            Self::Mlp {
                hidden,
                learning_rate,
                max_epochs,
                ..
            } if hidden.contains(&0) || !(*learning_rate > 0.0) || *max_epochs == 0 => {
                bad("layer sizes, learning rate and epochs must be positive")
            }
            _ => Ok(()),
        }
    }
}

/// A trained model.
#[derive(Debug, Clone, PartialEq)]
pub enum Model<T> {
    Knn(Knn<T>),
    DecisionTree(DecisionTree<T>),
    RandomForest(RandomForest<T>),
    LogisticRegression(LogisticRegression<T>),
    LinearSvm(LinearSvm<T>),
    Mlp(Mlp<T>),
}

impl<T: Scalar> Model<T> {
    pub fn n_features(&self) -> usize {
        match self {
            Model::Knn(m) => m.n_features(),
            Model::DecisionTree(m) => m.n_features(),
            Model::RandomForest(m) => m.n_features(),
            Model::LogisticRegression(m) => m.n_features(),
            Model::LinearSvm(m) => m.n_features(),
            Model::Mlp(m) => m.n_features(),
        }
    }

    pub fn predict(&self, rows: &Matrix<T>) -> Result<Vec<u8>> {
        if rows.cols() != self.n_features() {
            return Err(Error::FeatureCount {
                expected: self.n_features(),
                found: rows.cols(),
            });
        }
        Ok(match self {
            Model::Knn(m) => m.predict(rows),
            Model::DecisionTree(m) => rows.iter_rows().map(|r| m.predict_row(r)).collect(),
            Model::RandomForest(m) => rows.iter_rows().map(|r| m.predict_row(r)).collect(),
            Model::LogisticRegression(m) => rows.iter_rows().map(|r| m.predict_row(r)).collect(),
            Model::LinearSvm(m) => rows.iter_rows().map(|r| m.predict_row(r)).collect(),
            Model::Mlp(m) => rows.iter_rows().map(|r| m.predict_row(r)).collect(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct FitResult<T> {
    pub model: Model<T>,
    pub train_time: Duration,
    /// Epochs executed for iterative learners, 1 otherwise.
    pub train_cycles: usize,
}

/// Trains `spec` on a fully observed dataset.
pub fn fit<T: Scalar>(spec: &ClassifierSpec, train: &Dataset<T>, seed: u64) -> Result<FitResult<T>> {
    let x = train.to_matrix()?;
    fit_matrix(spec, &x, train.labels(), seed)
}

pub fn fit_matrix<T: Scalar>(spec: &ClassifierSpec, x: &Matrix<T>, y: &[u8], seed: u64) -> Result<FitResult<T>> {
    spec.validate()?;
    if x.rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.rows(),
            right: y.len(),
        });
    }
    let both = y.contains(&0) && y.contains(&1);
    if !both && !matches!(spec, ClassifierSpec::Knn { .. }) {
        return Err(Error::SingleClass);
    }
    let start = Instant::now();
    let (model, cycles) = match spec {
        ClassifierSpec::Knn { k } => (Model::Knn(Knn::fit(x, y, *k)), 1),
        ClassifierSpec::DecisionTree { min_samples_split } => (
            Model::DecisionTree(DecisionTree::fit(x, y, *min_samples_split, MaxFeatures::All, seed)),
            1,
        ),
        ClassifierSpec::RandomForest {
            trees,
            bootstrap,
            max_features,
        } => (
            Model::RandomForest(RandomForest::fit(x, y, *trees, *bootstrap, *max_features, seed)),
            1,
        ),
        ClassifierSpec::LogisticRegression {
            learning_rate,
            max_epochs,
            tol,
        } => {
            let m = LogisticRegression::fit(x, y, *learning_rate, *max_epochs, *tol);
            let c = m.epochs();
            (Model::LogisticRegression(m), c)
        }
        ClassifierSpec::LinearSvm { lambda, epochs } => {
            let m = LinearSvm::fit(x, y, *lambda, *epochs, seed);
            let c = m.epochs();
            (Model::LinearSvm(m), c)
        }
        ClassifierSpec::Mlp {
            hidden,
            learning_rate,
            max_epochs,
            tol,
        } => {
            let m = Mlp::fit(x, y, hidden, *learning_rate, *max_epochs, *tol, seed);
            let c = m.epochs();
            (Model::Mlp(m), c)
        }
    };
    Ok(FitResult {
        model,
        train_time: start.elapsed(),
        train_cycles: cycles.max(1),
    })
}

/// Majority label with ties going to 0.
#[inline]
pub(crate) fn majority(ones: usize, total: usize) -> u8 {
    u8::from(ones * 2 > total)
}
