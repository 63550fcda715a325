use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, Matrix, SYNTHETIC_ROW_ID};
use crate::error::{Error, Result};
use crate::neighbors::k_smallest;
use crate::rng;
use crate::scalar::{sq_dist, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BalanceConfig {
    pub smote_neighbors: usize,
    pub enn_neighbors: usize,
    pub seed: u64,
}

impl Default for BalanceConfig {
    fn default() -> Self {
        Self {
            smote_neighbors: 5,
            enn_neighbors: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceSummary {
    pub class_counts_before: [usize; 2],
    pub class_counts_after_smote: [usize; 2],
    pub class_counts_after: [usize; 2],
    pub synthetic: usize,
    pub enn_removed: usize,
}

/// Oversamples the minority class up to the majority count, then applies
/// Edited Nearest Neighbours to the augmented set.
pub fn smote_enn<T: Scalar>(d: &Dataset<T>, c: &BalanceConfig) -> Result<(Dataset<T>, BalanceSummary)> {
    let (augmented, synthetic) = smote(d, c)?;
    let after_smote = augmented.class_counts();
    let x = augmented.to_matrix()?;
    let keep = enn_keep(&x, augmented.labels(), c.enn_neighbors);
    let kept: Vec<usize> = (0..augmented.n_rows()).filter(|&i| keep[i]).collect();
    let out = augmented.select_rows(&kept);
    let summary = BalanceSummary {
        class_counts_before: d.class_counts(),
        class_counts_after_smote: after_smote,
        class_counts_after: out.class_counts(),
        synthetic,
        enn_removed: augmented.n_rows() - out.n_rows(),
    };
    Ok((out, summary))
}

/// SMOTE phase alone: the input rows followed by the synthetic minority rows.
pub fn smote<T: Scalar>(d: &Dataset<T>, c: &BalanceConfig) -> Result<(Dataset<T>, usize)> {
    if c.smote_neighbors == 0 || c.enn_neighbors == 0 {
        return Err(Error::config("neighbour counts must be at least 1"));
    }
    let x = d.to_matrix()?;
    let counts = d.class_counts();
    if counts.contains(&0) {
        return Err(Error::SingleClass);
    }
    let minority_label = u8::from(counts[1] < counts[0]);
    let minority: Vec<usize> = (0..d.n_rows()).filter(|&i| d.labels()[i] == minority_label).collect();
    if minority.len() < 2 {
        return Err(Error::TooFewRows("SMOTE needs at least 2 minority rows".into()));
    }
    let need = counts[0].abs_diff(counts[1]);
    if need == 0 {
        return Ok((d.clone(), 0));
    }

    let k = c.smote_neighbors.min(minority.len() - 1);
    let neighbours: Vec<Vec<usize>> = minority
        .par_iter()
        .map(|&i| {
            let scored = minority
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (sq_dist(x.row(i), x.row(j)), j))
                .collect();
            k_smallest(scored, k).into_iter().map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = rng::stream(c.seed, &[rng::tag::SMOTE]);
    let n = d.n_features();
    let mut values: Vec<Option<T>> = d.values().to_vec();
    values.reserve(need * n);
    for _ in 0..need {
        let pick = rng.random_range(0..minority.len());
        let base = x.row(minority[pick]);
        let other = x.row(neighbours[pick][rng.random_range(0..k)]);
        let u = T::of(rng.random::<f64>());
        values.extend(base.iter().zip(other).map(|(&b, &o)| Some(b + u * (o - b))));
    }
    let mut labels = d.labels().to_vec();
    labels.resize(d.n_rows() + need, minority_label);
    let mut ids = d.row_ids().to_vec();
    ids.extend((0..need as u64).map(|s| SYNTHETIC_ROW_ID | s));
    Ok((d.with_rows(values, labels, ids), need))
}

/// `keep[i]` is false when the strict majority of row `i`'s `k` nearest
/// other rows carries the other label.
pub fn enn_keep<T: Scalar>(x: &Matrix<T>, labels: &[u8], k: usize) -> Vec<bool> {
    let k = k.min(x.rows().saturating_sub(1));
    (0..x.rows())
        .into_par_iter()
        .map(|i| {
            let scored = (0..x.rows())
                .filter(|&j| j != i)
                .map(|j| (sq_dist(x.row(i), x.row(j)), j))
                .collect();
            let nearest = k_smallest(scored, k);
            let ones = nearest.iter().filter(|&&(_, j)| labels[j] == 1).count();
            let zeros = nearest.len() - ones;
            let disagree = match labels[i] {
                1 => zeros * 2 > nearest.len(),
                _ => ones * 2 > nearest.len(),
            };
            !disagree
        })
        .collect()
}
