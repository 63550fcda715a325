use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams<T> {
    pub mins: Vec<T>,
    pub maxs: Vec<T>,
}

/// Per-feature minimum and maximum over observed values.
pub fn minmax_fit<T: Scalar>(d: &Dataset<T>) -> Result<ScalerParams<T>> {
    if d.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut mins = Vec::with_capacity(d.n_features());
    let mut maxs = Vec::with_capacity(d.n_features());
    for j in 0..d.n_features() {
        let (lo, hi) = d
            .column(j)
            .flatten()
            .fold((None::<T>, None::<T>), |(lo, hi), v| {
                (Some(lo.map_or(v, |l| l.min(v))), Some(hi.map_or(v, |h| h.max(v))))
            });
        match (lo, hi) {
            (Some(lo), Some(hi)) => {
                mins.push(lo);
                maxs.push(hi);
            }
            _ => return Err(Error::AllMissing(d.feature_names()[j].clone())),
        }
    }
    Ok(ScalerParams { mins, maxs })
}

/// `(x − min) / (max − min)`; constant features map to 0. Values outside the
/// fitted range extrapolate past [0, 1].
pub fn minmax_apply<T: Scalar>(d: &Dataset<T>, p: &ScalerParams<T>) -> Result<Dataset<T>> {
    let n = d.n_features();
    if p.mins.len() != n || p.maxs.len() != n {
        return Err(Error::FeatureCount {
            expected: p.mins.len(),
            found: n,
        });
    }
    let values = d
        .values()
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let j = idx % n;
            let span = p.maxs[j] - p.mins[j];
            v.map(|x| if span > T::zero() { (x - p.mins[j]) / span } else { T::zero() })
        })
        .collect();
    Ok(d.with_rows(values, d.labels().to_vec(), d.row_ids().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn column<T: Scalar>(vals: &[T]) -> Dataset<T> {
        let rows = vals.iter().map(|&v| vec![Some(v)]).collect();
        Dataset::new(vec!["x".into()], rows, vec![0; vals.len()], "t").unwrap()
    }

    #[test]
    fn direct_formula() {
        let d = column(&[2.0, 4.0, 6.0]);
        let out = minmax_apply(&d, &minmax_fit(&d).unwrap()).unwrap();
        assert_eq!(out.column(0).flatten().collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn works_in_f32() {
        let d = column(&[2.0f32, 4.0, 6.0]);
        let out = minmax_apply(&d, &minmax_fit(&d).unwrap()).unwrap();
        assert_eq!(out.value(1, 0), Some(0.5f32));
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let d = column(&[3.0; 4]);
        let out = minmax_apply(&d, &minmax_fit(&d).unwrap()).unwrap();
        assert!(out.column(0).flatten().all(|v| v == 0.0));
    }

    #[test]
    fn extrapolates_without_clamping() {
        let p = minmax_fit(&column(&[0.0, 10.0])).unwrap();
        let out = minmax_apply(&column(&[15.0]), &p).unwrap();
        assert_eq!(out.value(0, 0), Some(1.5));
    }

    #[test]
    fn mismatched_width() {
        let p = minmax_fit(&column(&[0.0, 10.0])).unwrap();
        let wide = Dataset::new(vec!["a".into(), "b".into()], vec![vec![Some(1.0), Some(2.0)]], vec![0], "t").unwrap();
        assert!(matches!(minmax_apply(&wide, &p), Err(Error::FeatureCount { .. })));
    }

    proptest! {
        #[test]
        fn fitted_data_lands_in_unit_interval_and_is_idempotent(vals in prop::collection::vec(-1e9f64..1e9, 1..50)) {
            let d = column(&vals);
            let once = minmax_apply(&d, &minmax_fit(&d).unwrap()).unwrap();
            for v in once.column(0).flatten() {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let twice = minmax_apply(&once, &minmax_fit(&once).unwrap()).unwrap();
            for (a, b) in once.column(0).flatten().zip(twice.column(0).flatten()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
