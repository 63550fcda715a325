//! Cleaning pipeline: duplicates, IQR outliers, KNN imputation, SMOTE+ENN
//! balancing and min-max scaling, in that order.

mod balance;
mod dedup;
mod impute;
mod outliers;
mod scale;

use serde::{Deserialize, Serialize};

pub use balance::{enn_keep, smote, smote_enn, BalanceConfig, BalanceSummary};
pub use dedup::drop_duplicates;
pub use impute::{knn_impute, knn_impute_from, nan_euclidean};
pub use outliers::{iqr_bounds, mark_outliers, quantile_sorted, FeatureBounds, OutlierBounds};
pub use scale::{minmax_apply, minmax_fit, ScalerParams};

use crate::dataset::Dataset;
use crate::error::{Result, StageContext};
use crate::scalar::Scalar;

/// Stage toggles and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PreprocessConfig {
    pub dedup: bool,
    pub outliers: bool,
    pub iqr_k: f64,
    pub impute: bool,
    pub impute_k: usize,
    pub balance: bool,
    pub smote_neighbors: usize,
    pub enn_neighbors: usize,
    pub normalize: bool,
    pub seed: u64,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            dedup: true,
            outliers: true,
            iqr_k: 1.5,
            impute: true,
            impute_k: 5,
            balance: true,
            smote_neighbors: 5,
            enn_neighbors: 3,
            normalize: true,
            seed: 0,
        }
    }
}

impl PreprocessConfig {
    pub fn balance_config(&self) -> BalanceConfig {
        BalanceConfig {
            smote_neighbors: self.smote_neighbors,
            enn_neighbors: self.enn_neighbors,
            seed: self.seed,
        }
    }
}

/// What each stage did.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PreprocessSummary {
    pub rows_before: usize,
    pub rows_after: usize,
    pub class_counts_before: [usize; 2],
    pub class_counts_after: [usize; 2],
    pub duplicates_removed: usize,
    pub outliers_replaced: usize,
    pub missing_before_impute: usize,
    pub imputed_cells: usize,
    pub synthetic_rows: usize,
    pub enn_removed: usize,
}

/// Runs every enabled stage over one whole table.
pub fn run<T: Scalar>(d: &Dataset<T>, cfg: &PreprocessConfig) -> Result<(Dataset<T>, PreprocessSummary)> {
    let mut summary = PreprocessSummary {
        rows_before: d.n_rows(),
        class_counts_before: d.class_counts(),
        ..PreprocessSummary::default()
    };
    let mut cur = d.clone();
    if cfg.dedup {
        cur = drop_duplicates(&cur);
        summary.duplicates_removed = d.n_rows() - cur.n_rows();
    }
    if cfg.outliers {
        let bounds = iqr_bounds(&cur, T::of(cfg.iqr_k)).stage("outliers")?;
        let (marked, n) = mark_outliers(&cur, &bounds).stage("outliers")?;
        cur = marked;
        summary.outliers_replaced = n;
    }
    summary.missing_before_impute = cur.missing_count();
    if cfg.impute {
        cur = knn_impute(&cur, cfg.impute_k).stage("impute")?;
        summary.imputed_cells = summary.missing_before_impute - cur.missing_count();
    }
    if cfg.balance {
        let (balanced, b) = smote_enn(&cur, &cfg.balance_config()).stage("balance")?;
        cur = balanced;
        summary.synthetic_rows = b.synthetic;
        summary.enn_removed = b.enn_removed;
    }
    if cfg.normalize {
        let params = minmax_fit(&cur).stage("normalize")?;
        cur = minmax_apply(&cur, &params).stage("normalize")?;
    }
    summary.rows_after = cur.n_rows();
    summary.class_counts_after = cur.class_counts();
    Ok((cur, summary))
}

/// Fits every stage on `train` only and applies the fitted state to `test`.
/// Balancing touches the training rows alone; duplicates are expected to be
/// removed before splitting. The summary describes the training side.
pub fn fit_transform_split<T: Scalar>(
    train: &Dataset<T>,
    test: &Dataset<T>,
    cfg: &PreprocessConfig,
) -> Result<(Dataset<T>, Dataset<T>, PreprocessSummary)> {
    let mut summary = PreprocessSummary {
        rows_before: train.n_rows(),
        class_counts_before: train.class_counts(),
        ..PreprocessSummary::default()
    };
    let (mut tr, mut te) = (train.clone(), test.clone());
    if cfg.outliers {
        let bounds = iqr_bounds(&tr, T::of(cfg.iqr_k)).stage("outliers")?;
        let (marked, n) = mark_outliers(&tr, &bounds).stage("outliers")?;
        tr = marked;
        summary.outliers_replaced = n;
        te = mark_outliers(&te, &bounds).stage("outliers")?.0;
    }
    summary.missing_before_impute = tr.missing_count();
    if cfg.impute {
        tr = knn_impute(&tr, cfg.impute_k).stage("impute")?;
        summary.imputed_cells = summary.missing_before_impute - tr.missing_count();
        te = knn_impute_from(&tr, &te, cfg.impute_k).stage("impute")?;
    }
    if cfg.balance {
        let (balanced, b) = smote_enn(&tr, &cfg.balance_config()).stage("balance")?;
        tr = balanced;
        summary.synthetic_rows = b.synthetic;
        summary.enn_removed = b.enn_removed;
    }
    if cfg.normalize {
        let params = minmax_fit(&tr).stage("normalize")?;
        tr = minmax_apply(&tr, &params).stage("normalize")?;
        te = minmax_apply(&te, &params).stage("normalize")?;
    }
    summary.rows_after = tr.n_rows();
    summary.class_counts_after = tr.class_counts();
    Ok((tr, te, summary))
}
