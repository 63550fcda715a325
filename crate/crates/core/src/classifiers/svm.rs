use rand::seq::SliceRandom;

use crate::dataset::Matrix;
use crate::rng;
use crate::scalar::Scalar;

/// Linear SVM trained with Pegasos stochastic subgradient steps on the
/// regularised hinge loss. The bias is an extra always-one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvm<T> {
    weights: Vec<T>,
    objective: Vec<T>,
}

impl<T: Scalar> LinearSvm<T> {
    pub fn fit(x: &Matrix<T>, y: &[u8], lambda: f64, epochs: usize, seed: u64) -> Self {
        let mut rng = rng::stream(seed, &[rng::tag::SVM]);
        let lam = T::of(lambda);
        let radius = T::one() / lam.sqrt();
        let mut m = Self {
            weights: vec![T::zero(); x.cols() + 1],
            objective: Vec::with_capacity(epochs),
        };
        let mut order: Vec<usize> = (0..x.rows()).collect();
        let mut t = 0usize;
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = T::one() / (lam * T::of_usize(t));
                let sign = if y[i] == 1 { T::one() } else { -T::one() };
                let margin = sign * m.decision(x.row(i));
                let shrink = T::one() - eta * lam;
                for w in m.weights.iter_mut() {
                    *w = *w * shrink;
                }
                if margin < T::one() {
                    let (w, b) = m.weights.split_at_mut(x.cols());
                    for (w, &v) in w.iter_mut().zip(x.row(i)) {
                        *w = *w + eta * sign * v;
                    }
                    b[0] = b[0] + eta * sign;
                }
                let norm = m.weights.iter().map(|&w| w * w).sum::<T>().sqrt();
                if norm > radius {
                    let scale = radius / norm;
                    for w in m.weights.iter_mut() {
                        *w = *w * scale;
                    }
                }
            }
            let obj = m.primal_objective(x, y, lam);
            m.objective.push(obj);
        }
        m
    }

    pub fn n_features(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn epochs(&self) -> usize {
        self.objective.len()
    }

    /// Regularised hinge objective after each epoch.
    pub fn objective_history(&self) -> &[T] {
        &self.objective
    }

    pub fn decision(&self, row: &[T]) -> T {
        let n = row.len();
        row.iter()
            .zip(&self.weights[..n])
            .fold(self.weights[n], |acc, (&v, &w)| acc + v * w)
    }

    pub fn predict_row(&self, row: &[T]) -> u8 {
        u8::from(self.decision(row) > T::zero())
    }

    fn primal_objective(&self, x: &Matrix<T>, y: &[u8], lam: T) -> T {
        let hinge: T = (0..x.rows())
            .map(|i| {
                let sign = if y[i] == 1 { T::one() } else { -T::one() };
                (T::one() - sign * self.decision(x.row(i))).max(T::zero())
            })
            .sum();
        let reg = self.weights.iter().map(|&w| w * w).sum::<T>() * lam / T::of(2.0);
        reg + hinge / T::of_usize(x.rows())
    }
}
