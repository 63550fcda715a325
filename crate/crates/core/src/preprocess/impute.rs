use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::neighbors::k_smallest;
use crate::scalar::Scalar;

/// Euclidean distance over coordinates observed in both rows, rescaled by
/// `n / shared`. `None` when the rows share no observed coordinate.
pub fn nan_euclidean<T: Scalar>(a: &[Option<T>], b: &[Option<T>]) -> Option<T> {
    let mut shared = 0usize;
    let mut sum = T::zero();
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            shared += 1;
            sum = sum + (*x - *y) * (*x - *y);
        }
    }
    (shared > 0).then(|| (sum * T::of_usize(a.len()) / T::of_usize(shared)).sqrt())
}

/// Fills every missing cell with the mean of that feature over its `k`
/// nearest rows that observe it. Fewer than `k` donors means all of them
/// are used; a row sharing no coordinate with any donor gets the column mean.
pub fn knn_impute<T: Scalar>(d: &Dataset<T>, k: usize) -> Result<Dataset<T>> {
    impute_impl(d, d, k, true)
}

/// Fills the missing cells of `target` using rows of `reference` as donors.
/// Used to impute a test partition from its training partition.
pub fn knn_impute_from<T: Scalar>(reference: &Dataset<T>, target: &Dataset<T>, k: usize) -> Result<Dataset<T>> {
    if reference.n_features() != target.n_features() {
        return Err(Error::FeatureCount {
            expected: reference.n_features(),
            found: target.n_features(),
        });
    }
    impute_impl(reference, target, k, false)
}

fn impute_impl<T: Scalar>(reference: &Dataset<T>, target: &Dataset<T>, k: usize, same: bool) -> Result<Dataset<T>> {
    if k == 0 {
        return Err(Error::config("imputation needs k >= 1"));
    }
    if !target.has_missing() {
        return Ok(target.clone());
    }
    let n = target.n_features();
    let mut col_means = Vec::with_capacity(n);
    for j in 0..n {
        let (sum, count) = reference
            .column(j)
            .flatten()
            .fold((T::zero(), 0usize), |(s, c), v| (s + v, c + 1));
        if count == 0 {
            return Err(Error::AllMissing(reference.feature_names()[j].clone()));
        }
        col_means.push(sum / T::of_usize(count));
    }
    if let Some(row) = (0..target.n_rows()).find(|&i| target.row(i).iter().all(Option::is_none)) {
        return Err(Error::EmptyRow(row));
    }

    let filled: Vec<Vec<Option<T>>> = (0..target.n_rows())
        .into_par_iter()
        .map(|i| {
            let row = target.row(i);
            if row.iter().all(Option::is_some) {
                return row.to_vec();
            }
            let dists: Vec<(T, usize)> = (0..reference.n_rows())
                .filter(|&j| !(same && j == i))
                .filter_map(|j| nan_euclidean(row, reference.row(j)).map(|d| (d, j)))
                .collect();
            row.iter()
                .enumerate()
                .map(|(f, v)| {
                    v.or_else(|| {
                        let donors: Vec<(T, usize)> = dists
                            .iter()
                            .copied()
                            .filter(|&(_, j)| reference.value(j, f).is_some())
                            .collect();
                        let nearest = k_smallest(donors, k);
                        if nearest.is_empty() {
                            return Some(col_means[f]);
                        }
                        let sum: T = nearest
                            .iter()
                            .map(|&(_, j)| reference.value(j, f).expect("donor observes feature"))
                            .sum();
                        Some(sum / T::of_usize(nearest.len()))
                    })
                })
                .collect()
        })
        .collect();

    Ok(target.with_rows(
        filled.into_iter().flatten().collect(),
        target.labels().to_vec(),
        target.row_ids().to_vec(),
    ))
}
