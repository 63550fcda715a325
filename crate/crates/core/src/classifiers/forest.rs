use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Matrix;
use crate::rng;
use crate::scalar::Scalar;

use super::majority;
use super::tree::DecisionTree;

/// Features considered at each split.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    #[default]
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            MaxFeatures::All => n,
            MaxFeatures::Sqrt => ((n as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::Count(c) => c.clamp(1, n.max(1)),
        }
    }
}

/// Bagged CART trees with majority vote (ties to 0). Tree `i` draws from the
/// stream `(seed, tree i)` so results do not depend on thread scheduling.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest<T> {
    trees: Vec<DecisionTree<T>>,
    n_features: usize,
}

impl<T: Scalar> RandomForest<T> {
    pub fn fit(x: &Matrix<T>, y: &[u8], trees: usize, bootstrap: bool, max_features: MaxFeatures, seed: u64) -> Self {
        let n = x.rows();
        let trees = (0..trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = rng::stream(seed, &[rng::tag::TREE, t as u64]);
                let rows: Vec<usize> = if bootstrap {
                    (0..n).map(|_| rng.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                DecisionTree::grow(x, y, &rows, 2, max_features, &mut rng)
            })
            .collect();
        Self {
            trees,
            n_features: x.cols(),
        }
    }

    pub fn trees(&self) -> &[DecisionTree<T>] {
        &self.trees
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn predict_row(&self, row: &[T]) -> u8 {
        let ones = self.trees.iter().filter(|t| t.predict_row(row) == 1).count();
        majority(ones, self.trees.len())
    }
}
