use rand::seq::SliceRandom;

use crate::dataset::Matrix;
use crate::rng::{self, Rng};
use crate::scalar::Scalar;

use super::forest::MaxFeatures;
use super::majority;

#[derive(Debug, Clone, PartialEq)]
enum Node<T> {
    Leaf(u8),
    Split {
        feature: usize,
        threshold: T,
        left: usize,
        right: usize,
    },
}

/// CART classification tree with Gini impurity. Grows until leaves are pure
/// or hold fewer than `min_samples_split` rows; no depth limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<T> {
    nodes: Vec<Node<T>>,
    n_features: usize,
}

struct Grower<'a, T> {
    x: &'a Matrix<T>,
    y: &'a [u8],
    min_samples_split: usize,
    max_features: usize,
    rng: &'a mut Rng,
    nodes: Vec<Node<T>>,
}

impl<T: Scalar> DecisionTree<T> {
    /// Grows a tree on all rows; the feature sampling stream is
    /// `(seed, tree 0)`, matching the first tree of a forest.
    pub fn fit(x: &Matrix<T>, y: &[u8], min_samples_split: usize, max_features: MaxFeatures, seed: u64) -> Self {
        let mut rng = rng::stream(seed, &[rng::tag::TREE, 0]);
        let rows: Vec<usize> = (0..x.rows()).collect();
        Self::grow(x, y, &rows, min_samples_split, max_features, &mut rng)
    }

    pub(crate) fn grow(
        x: &Matrix<T>,
        y: &[u8],
        rows: &[usize],
        min_samples_split: usize,
        max_features: MaxFeatures,
        rng: &mut Rng,
    ) -> Self {
        let mut g = Grower {
            x,
            y,
            min_samples_split: min_samples_split.max(2),
            max_features: max_features.resolve(x.cols()),
            rng,
            nodes: Vec::new(),
        };
        g.build(rows.to_vec());
        Self {
            nodes: g.nodes,
            n_features: x.cols(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn predict_row(&self, row: &[T]) -> u8 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf(label) => return *label,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
            }
        }
    }
}

fn gini(ones: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = ones as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

impl<T: Scalar> Grower<'_, T> {
    fn build(&mut self, rows: Vec<usize>) -> usize {
        let id = self.nodes.len();
        let ones = rows.iter().filter(|&&i| self.y[i] == 1).count();
        self.nodes.push(Node::Leaf(majority(ones, rows.len())));
        if ones == 0 || ones == rows.len() || rows.len() < self.min_samples_split {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&rows, ones) else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x.get(i, feature) <= threshold);
        let left = self.build(l);
        let right = self.build(r);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    /// Draws features in random order and scores the first `max_features`;
    /// keeps drawing past that only while no valid split has been found.
    fn best_split(&mut self, rows: &[usize], ones: usize) -> Option<(usize, T)> {
        let mut order: Vec<usize> = (0..self.x.cols()).collect();
        if self.max_features < order.len() {
            order.shuffle(self.rng);
        }
        let n = rows.len();
        let mut best: Option<(f64, usize, T)> = None;
        let mut sorted: Vec<(T, u8)> = Vec::with_capacity(n);
        for (tried, &f) in order.iter().enumerate() {
            if tried >= self.max_features && best.is_some() {
                break;
            }
            sorted.clear();
            sorted.extend(rows.iter().map(|&i| (self.x.get(i, f), self.y[i])));
            sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));
            let mut left_ones = 0;
            for cut in 1..n {
                left_ones += usize::from(sorted[cut - 1].1 == 1);
                let (lo, hi) = (sorted[cut - 1].0, sorted[cut].0);
                if lo == hi {
                    continue;
                }
                let score = (cut as f64 * gini(left_ones, cut)
                    + (n - cut) as f64 * gini(ones - left_ones, n - cut))
                    / n as f64;
                if best.as_ref().is_none_or(|b| score < b.0) {
                    let mid = (lo + hi) / T::of(2.0);
                    let threshold = if mid < hi { mid } else { lo };
                    best = Some((score, f, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stump_on_threshold_data() {
        // Labels switch between 3 and 4: a single split at 3.5 classifies exactly.
        let x = Matrix::from_rows(&(0..8).map(|i| vec![i as f64]).collect::<Vec<_>>()).unwrap();
        let y = [0, 0, 0, 0, 1, 1, 1, 1];
        let t = DecisionTree::fit(&x, &y, 2, MaxFeatures::All, 0);
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.nodes[0], Node::Split { feature: 0, threshold: 3.5, left: 1, right: 2 });
        assert_eq!((0..8).map(|i| t.predict_row(&[i as f64])).collect::<Vec<_>>(), y);
        assert_eq!(t.predict_row(&[3.49]), 0);
        assert_eq!(t.predict_row(&[3.51]), 1);
    }

    #[test]
    fn grows_until_pure() {
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let y = [0, 1, 1, 0];
        let t = DecisionTree::fit(&x, &y, 2, MaxFeatures::All, 0);
        for i in 0..4 {
            assert_eq!(t.predict_row(x.row(i)), y[i]);
        }
    }

    #[test]
    fn identical_rows_with_mixed_labels_stop() {
        let x = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let t = DecisionTree::fit(&x, &[1, 0, 1], 2, MaxFeatures::All, 0);
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.predict_row(&[1.0]), 1);
    }
}
