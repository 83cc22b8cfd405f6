//! Gated convolutional models for aspect-based sentiment analysis.
//!
//! One model family covers four variants:
//!
//! - `gcae-acsa`: gated convolutions conditioned on an aspect-category
//!   embedding,
//! - `gcae-atsa`: the same, with the aspect vector produced by a small
//!   convolutional layer over the aspect-term tokens,
//! - `cnn`: an aspect-blind text classifier (tanh convolutions + max pooling),
//! - `gcn`: the gated architecture without any aspect input to the gate.
//!
//! Forward passes are read-only on the parameters, so concurrent evaluation
//! is safe; gradients are accumulated into caller-owned storage.

mod backward;
mod check;
mod checkpoint;
mod forward;
mod gate;
mod params;
mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use backward::backward;
pub use check::{check_gradients, GroupReport};
pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use forward::{forward, loss_and_signature, predict, AspectInput, BlockCache, ForwardCache, ForwardPass};
pub use gate::{gate_backward, gate_forward};
pub use params::{GateBranch, ModelParams, TensorView, TensorViewMut, TermCnn, WidthBlock};
pub use trace::{gate_trace, GateTrace};

/// Which unit combines the sentiment and gate branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    /// tanh(sentiment) * relu(gate)
    Gtru,
    /// tanh(sentiment) * sigmoid(gate)
    Gtu,
    /// sentiment * sigmoid(gate)
    Glu,
}

impl GateKind {
    pub fn parse(s: &str) -> Result<GateKind> {
        match s {
            "gtru" => Ok(GateKind::Gtru),
            "gtu" => Ok(GateKind::Gtu),
            "glu" => Ok(GateKind::Glu),
            other => Err(Error::Config(format!(
                "unknown gate '{other}' (expected gtru, gtu or glu)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Gtru => "gtru",
            GateKind::Gtu => "gtu",
            GateKind::Glu => "glu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Acsa,
    Atsa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    None,
    Cnn,
    Gcn,
}

/// Model variant selector: task, gating unit, and optional aspect-blind
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelVariant {
    pub task: Task,
    pub gate: GateKind,
    pub baseline: Baseline,
}

impl ModelVariant {
    pub fn gcae_acsa(gate: GateKind) -> Self {
        ModelVariant {
            task: Task::Acsa,
            gate,
            baseline: Baseline::None,
        }
    }

    pub fn gcae_atsa(gate: GateKind) -> Self {
        ModelVariant {
            task: Task::Atsa,
            gate,
            baseline: Baseline::None,
        }
    }

    pub fn cnn() -> Self {
        ModelVariant {
            task: Task::Acsa,
            gate: GateKind::Gtru,
            baseline: Baseline::Cnn,
        }
    }

    pub fn gcn(gate: GateKind) -> Self {
        ModelVariant {
            task: Task::Acsa,
            gate,
            baseline: Baseline::Gcn,
        }
    }

    /// True when the forward pass consumes the aspect input (both baselines
    /// ignore it).
    pub fn aspect_aware(&self) -> bool {
        self.baseline == Baseline::None
    }

    pub fn parse(name: &str, gate: GateKind) -> Result<ModelVariant> {
        match name {
            "gcae-acsa" => Ok(ModelVariant::gcae_acsa(gate)),
            "gcae-atsa" => Ok(ModelVariant::gcae_atsa(gate)),
            "cnn" => Ok(ModelVariant::cnn()),
            "gcn" => Ok(ModelVariant::gcn(gate)),
            other => Err(Error::Config(format!(
                "unknown variant '{other}' (expected gcae-acsa, gcae-atsa, cnn or gcn)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match (self.baseline, self.task) {
            (Baseline::Cnn, _) => "cnn",
            (Baseline::Gcn, _) => "gcn",
            (Baseline::None, Task::Acsa) => "gcae-acsa",
            (Baseline::None, Task::Atsa) => "gcae-atsa",
        }
    }
}

/// Dimensions of one model instance. The aspect-vector size `D_a` is the
/// embedding dimension for ACSA and the term-CNN filter count for ATSA.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub embed_dim: usize,
    pub widths: Vec<usize>,
    pub filters_per_width: usize,
    pub class_count: usize,
    /// Number of aspect categories (ACSA).
    pub aspect_count: usize,
    /// Width of the aspect-term convolution (ATSA).
    pub term_width: usize,
    /// Filter count of the aspect-term convolution (ATSA).
    pub term_filters: usize,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if self.vocab_size < 2 {
            errors.push("vocab_size must be at least 2 (pad + unk)".to_string());
        }
        if self.embed_dim == 0 {
            errors.push("embed_dim must be positive".to_string());
        }
        if self.widths.is_empty() {
            errors.push("widths must be nonempty".to_string());
        }
        if self.widths.iter().any(|&w| w == 0) {
            errors.push("filter widths must be positive".to_string());
        }
        if self.filters_per_width == 0 {
            errors.push("filters_per_width must be positive".to_string());
        }
        if self.class_count < 2 {
            errors.push("class_count must be at least 2".to_string());
        }
        if self.term_width == 0 || self.term_filters == 0 {
            errors.push("term_width and term_filters must be positive".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigList(errors))
        }
    }

    /// Aspect-vector dimension for the given task.
    pub fn aspect_dim(&self, task: Task) -> usize {
        match task {
            Task::Acsa => self.embed_dim,
            Task::Atsa => self.term_filters,
        }
    }

    /// Minimum padded sentence length: the widest configured filter.
    pub fn min_sentence_len(&self) -> usize {
        self.widths.iter().copied().max().unwrap_or(1)
    }
}

/// A variant descriptor, its dimensions, and its trainable weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub variant: ModelVariant,
    pub config: ModelConfig,
    pub params: ModelParams,
}

impl Model {
    /// Builds a model with seeded random initialization: embeddings uniform
    /// in (-0.25, 0.25) with a zeroed pad row, filters and the output layer
    /// uniform in +/- sqrt(6 / (fan_in + fan_out)), biases zero.
    pub fn new(variant: ModelVariant, config: &ModelConfig, seed: u64) -> Result<Model> {
        config.validate()?;
        let params = ModelParams::init(variant, config, seed);
        Ok(Model {
            variant,
            config: config.clone(),
            params,
        })
    }

    pub fn forward(&self, tokens: &[usize], aspect: Option<AspectInput<'_>>) -> Result<ForwardPass> {
        forward(self.variant, &self.config, &self.params, tokens, aspect)
    }

    /// Accumulates the gradient of the cross-entropy loss for one instance
    /// into `grads` (same shapes as the parameters) and returns the loss.
    pub fn backward(&self, cache: &ForwardCache, target: usize, grads: &mut ModelParams) -> Result<f64> {
        backward(self.variant, &self.params, cache, target, grads)
    }

    pub fn predict(&self, tokens: &[usize], aspect: Option<AspectInput<'_>>) -> Result<usize> {
        predict(self, tokens, aspect)
    }

    pub fn gate_trace(&self, tokens: &[usize], aspect: AspectInput<'_>) -> Result<GateTrace> {
        gate_trace(self, tokens, aspect)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_names_round_trip() {
        for name in ["gcae-acsa", "gcae-atsa", "cnn", "gcn"] {
            let v = ModelVariant::parse(name, GateKind::Gtru).unwrap();
            assert_eq!(v.name(), name);
        }
        assert!(ModelVariant::parse("lstm", GateKind::Gtru).is_err());
        assert!(GateKind::parse("sigmoid").is_err());
    }

    #[test]
    fn baselines_are_not_aspect_aware() {
        assert!(ModelVariant::gcae_acsa(GateKind::Gtru).aspect_aware());
        assert!(!ModelVariant::cnn().aspect_aware());
        assert!(!ModelVariant::gcn(GateKind::Gtru).aspect_aware());
    }

    #[test]
    fn config_validation_collects_all_errors() {
        let config = ModelConfig {
            vocab_size: 1,
            embed_dim: 0,
            widths: vec![],
            filters_per_width: 0,
            class_count: 1,
            aspect_count: 0,
            term_width: 0,
            term_filters: 0,
        };
        match config.validate() {
            Err(Error::ConfigList(errors)) => assert!(errors.len() >= 5, "{errors:?}"),
            other => panic!("expected ConfigList, got {other:?}"),
        }
    }
}
