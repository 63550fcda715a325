use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tukey fences for one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureBounds<T> {
    pub q1: T,
    pub q3: T,
    pub iqr: T,
    pub low: T,
    pub high: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierBounds<T> {
    pub k: T,
    pub features: Vec<FeatureBounds<T>>,
}

/// Quantile by linear interpolation between order statistics of a sorted slice.
pub fn quantile_sorted<T: Scalar>(sorted: &[T], q: f64) -> T {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = T::of(pos - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Quartiles over the observed values of every feature and fences at
/// `q1 − k·iqr`, `q3 + k·iqr`.
pub fn iqr_bounds<T: Scalar>(d: &Dataset<T>, k: T) -> Result<OutlierBounds<T>> {
    if !(k > T::zero()) {
        return Err(Error::config(format!("IQR multiplier {k} must be positive")));
    }
    let features = (0..d.n_features())
        .map(|j| {
            let mut col: Vec<T> = d.column(j).flatten().collect();
            if col.is_empty() {
                return Err(Error::AllMissing(d.feature_names()[j].clone()));
            }
            col.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
            let q1 = quantile_sorted(&col, 0.25);
            let q3 = quantile_sorted(&col, 0.75);
            let iqr = q3 - q1;
            Ok(FeatureBounds {
                q1,
                q3,
                iqr,
                low: q1 - k * iqr,
                high: q3 + k * iqr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OutlierBounds { k, features })
}

/// Replaces values strictly outside the fences with the missing marker.
/// Returns the new dataset and the number of replaced cells.
pub fn mark_outliers<T: Scalar>(d: &Dataset<T>, b: &OutlierBounds<T>) -> Result<(Dataset<T>, usize)> {
    let n = d.n_features();
    if b.features.len() != n {
        return Err(Error::FeatureCount {
            expected: n,
            found: b.features.len(),
        });
    }
    let mut replaced = 0;
    let values = d
        .values()
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let f = &b.features[idx % n];
            match *v {
                Some(x) if x < f.low || x > f.high => {
                    replaced += 1;
                    None
                }
                other => other,
            }
        })
        .collect();
    Ok((d.with_rows(values, d.labels().to_vec(), d.row_ids().to_vec()), replaced))
}
