use crate::model::{EmbeddingParams, Gradients};

/// Diagonal AdaGrad over an [`EmbeddingParams`]:
///
/// ```text
/// accum += g²
/// param -= lr * g / (sqrt(accum) + eps)
/// ```
///
/// Only rows present in the gradient are touched.
#[derive(Debug, Clone)]
pub struct AdaGrad {
    learning_rate: f64,
    epsilon: f64,
    dim: usize,
    accum_rows: Vec<f64>,
    accum_scale: f64,
    accum_bias: f64,
}

impl AdaGrad {
    pub fn new(params: &EmbeddingParams, learning_rate: f64, epsilon: f64) -> Self {
        AdaGrad {
            learning_rate,
            epsilon,
            dim: params.dim(),
            accum_rows: vec![0.0; params.values().len()],
            accum_scale: 0.0,
            accum_bias: 0.0,
        }
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.accum_rows
    }

    pub fn step(&mut self, params: &mut EmbeddingParams, grads: &Gradients) {
        let (lr, eps) = (self.learning_rate, self.epsilon);
        let update = |value: &mut f64, accum: &mut f64, g: f64| {
            if g == 0.0 {
                return;
            }
            *accum += g * g;
            *value -= lr * g / (accum.sqrt() + eps);
        };
        for (i, row) in grads.rows() {
            let acc = &mut self.accum_rows[i * self.dim..(i + 1) * self.dim];
            for ((v, a), &g) in params.row_mut(i).iter_mut().zip(acc).zip(row) {
                update(v, a, g);
            }
        }
        update(&mut params.scale, &mut self.accum_scale, grads.scale);
        update(&mut params.bias, &mut self.accum_bias, grads.bias);
    }
}
