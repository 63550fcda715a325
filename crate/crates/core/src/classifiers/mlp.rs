use rand::Rng as _;

use crate::dataset::Matrix;
use crate::rng;
use crate::scalar::{sigmoid, Scalar};

use super::logistic::softplus;

/// Fully connected network with logistic activations on every layer and a
/// single output unit, trained by full-batch gradient descent on mean binary
/// cross-entropy.
///
/// Parameters live in one flat vector: for each layer, its `out × in` weight
/// matrix (row-major) followed by its `out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp<T> {
    layers: Vec<usize>,
    params: Vec<T>,
    losses: Vec<T>,
}

impl<T: Scalar> Mlp<T> {
    /// Glorot-uniform weights from the `(seed, MLP_INIT)` stream, zero biases.
    pub fn init(n_features: usize, hidden: &[usize], seed: u64) -> Self {
        let mut layers = Vec::with_capacity(hidden.len() + 2);
        layers.push(n_features);
        layers.extend_from_slice(hidden);
        layers.push(1);
        let mut rng = rng::stream(seed, &[rng::tag::MLP_INIT]);
        let mut params = Vec::new();
        for w in layers.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| T::of(rng.random_range(-limit..limit))));
            params.extend((0..fan_out).map(|_| T::zero()));
        }
        Self {
            layers,
            params,
            losses: Vec::new(),
        }
    }

    pub fn fit(
        x: &Matrix<T>,
        y: &[u8],
        hidden: &[usize],
        learning_rate: f64,
        max_epochs: usize,
        tol: f64,
        seed: u64,
    ) -> Self {
        let mut m = Self::init(x.cols(), hidden, seed);
        let lr = T::of(learning_rate);
        let tol = T::of(tol);
        let (mut prev, mut grad) = m.loss_and_gradient(&m.params, x, y);
        m.losses.push(prev);
        for _ in 0..max_epochs {
            for (p, g) in m.params.iter_mut().zip(&grad) {
                *p = *p - lr * *g;
            }
            let (cur, g) = m.loss_and_gradient(&m.params, x, y);
            m.losses.push(cur);
            grad = g;
            if (prev - cur).abs() < tol {
                break;
            }
            prev = cur;
        }
        m
    }

    pub fn n_features(&self) -> usize {
        self.layers[0]
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn params(&self) -> &[T] {
        &self.params
    }

    /// Gradient steps taken.
    pub fn epochs(&self) -> usize {
        self.losses.len().saturating_sub(1)
    }

    pub fn loss_history(&self) -> &[T] {
        &self.losses
    }

    /// Output-unit pre-activation and every layer's activations.
    fn forward(&self, params: &[T], row: &[T]) -> (T, Vec<Vec<T>>) {
        let mut acts = vec![row.to_vec()];
        let mut offset = 0;
        let mut logit = T::zero();
        let last = self.layers.len() - 2;
        for (li, w) in self.layers.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &params[offset..offset + fan_in * fan_out];
            let biases = &params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
            offset += fan_in * fan_out + fan_out;
            let input = acts.last().expect("input layer");
            let z: Vec<T> = (0..fan_out)
                .map(|o| {
                    weights[o * fan_in..(o + 1) * fan_in]
                        .iter()
                        .zip(input)
                        .fold(biases[o], |acc, (&w, &a)| acc + w * a)
                })
                .collect();
            if li == last {
                logit = z[0];
            }
            acts.push(z.into_iter().map(sigmoid).collect());
        }
        (logit, acts)
    }

    pub fn probability(&self, row: &[T]) -> T {
        sigmoid(self.forward(&self.params, row).0)
    }

    pub fn predict_row(&self, row: &[T]) -> u8 {
        u8::from(self.probability(row) > T::of(0.5))
    }

    /// Mean cross-entropy at `params`.
    pub fn loss(&self, params: &[T], x: &Matrix<T>, y: &[u8]) -> T {
        let total: T = (0..x.rows())
            .map(|i| {
                let z = self.forward(params, x.row(i)).0;
                softplus(z) - if y[i] == 1 { z } else { T::zero() }
            })
            .sum();
        total / T::of_usize(x.rows())
    }

    /// Mean cross-entropy and its gradient by backpropagation.
    pub fn loss_and_gradient(&self, params: &[T], x: &Matrix<T>, y: &[u8]) -> (T, Vec<T>) {
        let mut grad = vec![T::zero(); params.len()];
        let mut total = T::zero();
        let n_layers = self.layers.len() - 1;
        let offsets: Vec<usize> = self
            .layers
            .windows(2)
            .scan(0, |off, w| {
                let here = *off;
                *off += w[0] * w[1] + w[1];
                Some(here)
            })
            .collect();

        for i in 0..x.rows() {
            let (logit, acts) = self.forward(params, x.row(i));
            let target = T::of(f64::from(y[i]));
            total = total + softplus(logit) - target * logit;
            // dL/dz at the output unit.
            let mut delta = vec![acts[n_layers][0] - target];
            for l in (0..n_layers).rev() {
                let (fan_in, fan_out) = (self.layers[l], self.layers[l + 1]);
                let off = offsets[l];
                let input = &acts[l];
                for o in 0..fan_out {
                    let row_grad = &mut grad[off + o * fan_in..off + (o + 1) * fan_in];
                    for (g, &a) in row_grad.iter_mut().zip(input) {
                        *g = *g + delta[o] * a;
                    }
                    grad[off + fan_in * fan_out + o] = grad[off + fan_in * fan_out + o] + delta[o];
                }
                if l > 0 {
                    let weights = &params[off..off + fan_in * fan_out];
                    delta = (0..fan_in)
                        .map(|k| {
                            let back: T = (0..fan_out).map(|o| weights[o * fan_in + k] * delta[o]).sum();
                            back * input[k] * (T::one() - input[k])
                        })
                        .collect();
                }
            }
        }
        let n = T::of_usize(x.rows());
        (total / n, grad.into_iter().map(|g| g / n).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> (Matrix<f64>, Vec<u8>) {
        let x = Matrix::from_rows(&[
            vec![0.1, 0.9, 0.3],
            vec![0.8, 0.2, 0.5],
            vec![0.4, 0.4, 0.9],
            vec![0.9, 0.7, 0.1],
            vec![0.2, 0.1, 0.6],
        ])
        .unwrap();
        (x, vec![0, 1, 1, 0, 1])
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (x, y) = toy();
        let m = Mlp::<f64>::init(3, &[10, 10], 4);
        let (_, analytic) = m.loss_and_gradient(m.params(), &x, &y);
        let h = 1e-6;
        let mut p = m.params().to_vec();
        for k in 0..p.len() {
            let orig = p[k];
            p[k] = orig + h;
            let up = m.loss(&p, &x, &y);
            p[k] = orig - h;
            let down = m.loss(&p, &x, &y);
            p[k] = orig;
            let numeric = (up - down) / (2.0 * h);
            let scale = numeric.abs().max(analytic[k].abs()).max(1e-8);
            assert!(
                (numeric - analytic[k]).abs() / scale < 1e-4,
                "param {k}: {numeric} vs {}",
                analytic[k]
            );
        }
    }

    #[test]
    fn learns_separable_blobs() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let base = if i < 20 { 0.15 } else { 0.85 };
                vec![base + (i % 5) as f64 * 0.02, base - (i % 3) as f64 * 0.03]
            })
            .collect();
        let y: Vec<u8> = (0..40).map(|i| u8::from(i >= 20)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let m = Mlp::fit(&x, &y, &[10, 10], 0.3, 5000, 1e-5, 1);
        let correct = (0..40).filter(|&i| m.predict_row(x.row(i)) == y[i]).count();
        assert_eq!(correct, 40);
        assert!(m.epochs() >= 1 && m.epochs() <= 5000);
    }

    #[test]
    fn parameter_layout() {
        let m = Mlp::<f64>::init(4, &[10, 10], 0);
        assert_eq!(m.layers(), &[4, 10, 10, 1]);
        assert_eq!(m.params().len(), 4 * 10 + 10 + 10 * 10 + 10 + 10 + 1);
    }
}
