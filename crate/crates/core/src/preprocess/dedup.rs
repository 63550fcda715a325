use std::collections::HashSet;

use crate::dataset::Dataset;
use crate::scalar::Scalar;

/// Removes rows identical to an earlier row in every feature, the missing
/// pattern and the label. The first occurrence is kept and order preserved.
pub fn drop_duplicates<T: Scalar>(d: &Dataset<T>) -> Dataset<T> {
    let mut seen = HashSet::with_capacity(d.n_rows());
    let keep: Vec<usize> = (0..d.n_rows())
        .filter(|&i| {
            let key: (Vec<Option<u64>>, u8) = (
                d.row(i).iter().map(|v| v.map(|x| canonical_bits(x.as_f64()))).collect(),
                d.labels()[i],
            );
            seen.insert(key)
        })
        .collect();
    d.select_rows(&keep)
}

// -0.0 and 0.0 compare equal as values, so they must hash alike.
fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: Vec<Vec<Option<f64>>>, labels: Vec<u8>) -> Dataset<f64> {
        Dataset::new(vec!["a".into(), "b".into()], rows, labels, "t").unwrap()
    }

    #[test]
    fn identical_rows_collapse() {
        let d = ds(vec![vec![Some(1.0), None], vec![Some(1.0), None], vec![Some(2.0), Some(3.0)]], vec![1, 1, 0]);
        let out = drop_duplicates(&d);
        assert_eq!(out.n_rows(), 2);
        assert_eq!(out.row_ids(), &[0, 2]);
    }

    #[test]
    fn label_difference_is_not_a_duplicate() {
        let d = ds(vec![vec![Some(1.0), Some(2.0)], vec![Some(1.0), Some(2.0)]], vec![0, 1]);
        assert_eq!(drop_duplicates(&d), d);
    }

    #[test]
    fn missing_pattern_matters() {
        let d = ds(vec![vec![Some(1.0), None], vec![Some(1.0), Some(0.0)]], vec![0, 0]);
        assert_eq!(drop_duplicates(&d).n_rows(), 2);
    }
}
