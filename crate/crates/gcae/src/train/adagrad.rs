//! Adagrad updates with a per-parameter accumulator.
//!
//! For each coordinate: `accum += g^2; p -= lr * g / (sqrt(accum) + eps)`.
//! Tensors can declare frozen leading rows (the pad embedding); those are
//! never touched, so padding stays an exact zero through training.

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone)]
pub struct Adagrad {
    pub learning_rate: f64,
    pub eps: f64,
    accum: ModelParams,
}

impl Adagrad {
    pub fn new(params: &ModelParams, learning_rate: f64, eps: f64) -> Adagrad {
        Adagrad {
            learning_rate,
            eps,
            accum: params.zeros_like(),
        }
    }

    /// Applies one update from already-averaged gradients.
    pub fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) -> Result<()> {
        let mut param_views = params.tensors_mut();
        let mut accum_views = self.accum.tensors_mut();
        let grad_views = grads.tensors();
        if param_views.len() != grad_views.len() || param_views.len() != accum_views.len() {
            return Err(Error::shape(
                "adagrad step",
                param_views.len().to_string(),
                format!("{} grads, {} accumulators", grad_views.len(), accum_views.len()),
            ));
        }
        for ((p, a), g) in param_views
            .iter_mut()
            .zip(accum_views.iter_mut())
            .zip(grad_views.iter())
        {
            if p.name != g.name || p.data.len() != g.data.len() {
                return Err(Error::shape(
                    "adagrad step",
                    format!("{} ({})", p.name, p.data.len()),
                    format!("{} ({})", g.name, g.data.len()),
                ));
            }
            let start = p.frozen_rows * p.cols;
            for i in start..p.data.len() {
                let grad = g.data[i];
                a.data[i] += grad * grad;
                p.data[i] -= self.learning_rate * grad / (a.data[i].sqrt() + self.eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GateKind, Model, ModelConfig, ModelVariant};

    fn tiny_model() -> Model {
        let config = ModelConfig {
            vocab_size: 6,
            embed_dim: 3,
            widths: vec![2],
            filters_per_width: 2,
            class_count: 2,
            aspect_count: 2,
            term_width: 2,
            term_filters: 2,
        };
        Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &config, 5).unwrap()
    }

    #[test]
    fn update_matches_hand_computation() {
        let mut model = tiny_model();
        let mut opt = Adagrad::new(&model.params, 0.1, 1e-6);
        let before = model.params.output_bias[0];
        let mut grads = model.params.zeros_like();
        grads.output_bias[0] = 0.5;

        opt.step(&mut model.params, &grads).unwrap();
        // accum = 0.25, step = 0.1 * 0.5 / (0.5 + 1e-6)
        let first = 0.1 * 0.5 / (0.5 + 1e-6);
        assert!((model.params.output_bias[0] - (before - first)).abs() < 1e-12);

        opt.step(&mut model.params, &grads).unwrap();
        // accum = 0.5, step shrinks to 0.1 * 0.5 / (sqrt(0.5) + 1e-6)
        let second = 0.1 * 0.5 / (0.5f64.sqrt() + 1e-6);
        assert!(second < first);
        assert!(
            (model.params.output_bias[0] - (before - first - second)).abs() < 1e-12
        );
    }

    #[test]
    fn pad_embedding_row_stays_zero() {
        let mut model = tiny_model();
        let mut opt = Adagrad::new(&model.params, 0.1, 1e-6);
        let mut grads = model.params.zeros_like();
        // Even a gradient aimed straight at the pad row must not move it.
        for v in grads.word_embeddings.row_mut(0) {
            *v = 3.0;
        }
        for v in grads.word_embeddings.row_mut(1) {
            *v = 3.0;
        }
        opt.step(&mut model.params, &grads).unwrap();
        assert!(model.params.word_embeddings.row(0).iter().all(|&v| v == 0.0));
        assert!(model.params.word_embeddings.row(1).iter().all(|&v| v != 0.0));
    }

    #[test]
    fn zero_gradient_keeps_parameters() {
        let mut model = tiny_model();
        let snapshot = model.params.clone();
        let mut opt = Adagrad::new(&model.params, 0.1, 1e-6);
        let grads = model.params.zeros_like();
        opt.step(&mut model.params, &grads).unwrap();
        assert_eq!(model.params, snapshot);
    }
}
