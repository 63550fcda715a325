use crate::dataset::Matrix;
use crate::scalar::{sigmoid, Scalar};

/// Logistic regression trained by full-batch gradient descent on mean
/// binary cross-entropy, from zero weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticRegression<T> {
    weights: Vec<T>,
    bias: T,
    losses: Vec<T>,
}

/// `log(1 + e^z)` without overflow.
pub(crate) fn softplus<T: Scalar>(z: T) -> T {
    if z > T::zero() {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl<T: Scalar> LogisticRegression<T> {
    pub fn fit(x: &Matrix<T>, y: &[u8], learning_rate: f64, max_epochs: usize, tol: f64) -> Self {
        let mut m = Self {
            weights: vec![T::zero(); x.cols()],
            bias: T::zero(),
            losses: Vec::new(),
        };
        let lr = T::of(learning_rate);
        let tol = T::of(tol);
        let mut prev = m.loss(x, y);
        m.losses.push(prev);
        for _ in 0..max_epochs {
            let (gw, gb) = m.gradient(x, y);
            for (w, g) in m.weights.iter_mut().zip(&gw) {
                *w = *w - lr * *g;
            }
            m.bias = m.bias - lr * gb;
            let cur = m.loss(x, y);
            m.losses.push(cur);
            if (prev - cur).abs() < tol {
                break;
            }
            prev = cur;
        }
        m
    }

    /// Zero-weight model, which predicts probability 0.5 everywhere.
    pub fn zeros(n_features: usize) -> Self {
        Self {
            weights: vec![T::zero(); n_features],
            bias: T::zero(),
            losses: Vec::new(),
        }
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    /// Gradient steps taken.
    pub fn epochs(&self) -> usize {
        self.losses.len().saturating_sub(1)
    }

    /// Training loss before the first step and after every step.
    pub fn loss_history(&self) -> &[T] {
        &self.losses
    }

    fn logit(&self, row: &[T]) -> T {
        row.iter().zip(&self.weights).fold(self.bias, |acc, (&v, &w)| acc + v * w)
    }

    pub fn probability(&self, row: &[T]) -> T {
        sigmoid(self.logit(row))
    }

    /// 1 when the probability exceeds 0.5; exactly 0.5 goes to 0.
    pub fn predict_row(&self, row: &[T]) -> u8 {
        u8::from(self.probability(row) > T::of(0.5))
    }

    pub fn loss(&self, x: &Matrix<T>, y: &[u8]) -> T {
        let total: T = (0..x.rows())
            .map(|i| {
                let z = self.logit(x.row(i));
                softplus(z) - if y[i] == 1 { z } else { T::zero() }
            })
            .sum();
        total / T::of_usize(x.rows())
    }

    fn gradient(&self, x: &Matrix<T>, y: &[u8]) -> (Vec<T>, T) {
        let mut gw = vec![T::zero(); x.cols()];
        let mut gb = T::zero();
        for i in 0..x.rows() {
            let row = x.row(i);
            let err = self.probability(row) - T::of(f64::from(y[i]));
            for (g, &v) in gw.iter_mut().zip(row) {
                *g = *g + err * v;
            }
            gb = gb + err;
        }
        let n = T::of_usize(x.rows());
        (gw.into_iter().map(|g| g / n).collect(), gb / n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_predict_label_zero() {
        let m = LogisticRegression::<f64>::zeros(3);
        assert_eq!(m.probability(&[1.0, 2.0, 3.0]), 0.5);
        assert_eq!(m.predict_row(&[1.0, 2.0, 3.0]), 0);
    }

    #[test]
    fn loss_never_increases() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![(i % 10) as f64 / 10.0, (i * 7 % 13) as f64 / 13.0]).collect();
        let y: Vec<u8> = rows.iter().map(|r| u8::from(r[0] + 0.3 * r[1] > 0.55)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let m = LogisticRegression::fit(&x, &y, 0.1, 1000, 1e-6);
        for w in m.loss_history().windows(2) {
            assert!(w[1] <= w[0], "{} -> {}", w[0], w[1]);
        }
        assert!(m.epochs() >= 1);
    }

    #[test]
    fn softplus_is_stable() {
        assert_eq!(softplus(1000.0f64), 1000.0);
        assert!(softplus(-1000.0f64) >= 0.0);
        assert!((softplus(0.0f64) - 2f64.ln()).abs() < 1e-15);
    }
}
