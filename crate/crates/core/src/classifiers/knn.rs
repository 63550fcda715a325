use rayon::prelude::*;

use crate::dataset::Matrix;
use crate::neighbors::k_smallest;
use crate::scalar::{sq_dist, Scalar};

use super::majority;

/// Lazy k-nearest-neighbour classifier (Euclidean).
#[derive(Debug, Clone, PartialEq)]
pub struct Knn<T> {
    k: usize,
    x: Matrix<T>,
    y: Vec<u8>,
}

impl<T: Scalar> Knn<T> {
    pub fn fit(x: &Matrix<T>, y: &[u8], k: usize) -> Self {
        Self {
            k,
            x: x.clone(),
            y: y.to_vec(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.x.cols()
    }

    pub fn predict(&self, rows: &Matrix<T>) -> Vec<u8> {
        (0..rows.rows())
            .into_par_iter()
            .map(|i| self.predict_row(rows.row(i)))
            .collect()
    }

    pub fn predict_row(&self, row: &[T]) -> u8 {
        let scored = (0..self.x.rows()).map(|j| (sq_dist(row, self.x.row(j)), j)).collect();
        knn_vote(&k_smallest(scored, self.k), &self.y)
    }
}

/// Majority label among `(distance, index)` neighbours; ties go to 0.
pub fn knn_vote<T>(neighbours: &[(T, usize)], labels: &[u8]) -> u8 {
    let ones = neighbours.iter().filter(|&&(_, j)| labels[j] == 1).count();
    majority(ones, neighbours.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_neighbour_recovers_training_labels() {
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![5.0, 5.0]]).unwrap();
        let knn = Knn::fit(&x, &[0, 1, 1], 1);
        assert_eq!(knn.predict(&x), vec![0, 1, 1]);
    }

    #[test]
    fn vote_ties_go_to_zero() {
        let x = Matrix::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        let knn = Knn::fit(&x, &[1, 0], 2);
        assert_eq!(knn.predict_row(&[1.0]), 0);
    }

    #[test]
    fn distance_ties_prefer_lower_index() {
        let x = Matrix::from_rows(&[vec![-1.0], vec![1.0]]).unwrap();
        assert_eq!(Knn::fit(&x, &[1, 0], 1).predict_row(&[0.0]), 1);
        assert_eq!(Knn::fit(&x, &[0, 1], 1).predict_row(&[0.0]), 0);
    }

    proptest! {
        #[test]
        fn invariant_under_feature_permutation(
            rows in prop::collection::vec(prop::collection::vec(-10i32..10, 3), 4..20),
            query in prop::collection::vec(-10i32..10, 3),
        ) {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let y: Vec<u8> = (0..x.len()).map(|i| (i % 2) as u8).collect();
            let q: Vec<f64> = query.iter().map(|&v| v as f64).collect();
            let perm = [2usize, 0, 1];
            let xp: Vec<Vec<f64>> = x.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
            let qp: Vec<f64> = perm.iter().map(|&j| q[j]).collect();
            let a = Knn::fit(&Matrix::from_rows(&x).unwrap(), &y, 3).predict_row(&q);
            let b = Knn::fit(&Matrix::from_rows(&xp).unwrap(), &y, 3).predict_row(&qp);
            prop_assert_eq!(a, b);
        }
    }
}
