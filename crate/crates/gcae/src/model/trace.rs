//! Per-word gate activity: how much each input position the relu gates let
//! through for a given aspect.
//!
//! Only meaningful for the relu-gated unit, whose exact zeros make "blocked"
//! well defined. The score of word `i` sums the relu'd gate pre-activations
//! of the window starting at `i`, over the narrowest configured filter width
//! (the attribution to the window's first word is sharpest there). Scores
//! are normalized to sum to 1; an all-blocked sentence yields all zeros.

use crate::error::{Error, Result};
use crate::model::forward::AspectInput;
use crate::model::{forward, GateKind, Model};

#[derive(Debug, Clone)]
pub struct GateTrace {
    /// One nonnegative score per input token; sums to 1 unless every window
    /// is fully blocked.
    pub scores: Vec<f64>,
    /// Filter width the trace was computed over.
    pub width: usize,
}

pub fn gate_trace(model: &Model, tokens: &[usize], aspect: AspectInput<'_>) -> Result<GateTrace> {
    if model.variant.gate != GateKind::Gtru || !model.variant.aspect_aware() {
        return Err(Error::Unsupported(format!(
            "gate tracing needs a relu-gated aspect-aware variant, got {} with {} gate",
            model.variant.name(),
            model.variant.gate.name()
        )));
    }
    if tokens.is_empty() {
        return Err(Error::Data("cannot trace an empty sentence".to_string()));
    }
    let width = model
        .params
        .blocks
        .iter()
        .map(|b| b.width)
        .min()
        .expect("validated configs have at least one width");

    // The full forward pass needs the sentence padded to the *widest* filter;
    // the trace itself only needs the narrowest, so run it standalone on a
    // minimally padded copy.
    let mut padded = tokens.to_vec();
    while padded.len() < width {
        padded.push(forward::PAD_ID);
    }
    let pass = {
        let mut trace_config = model.config.clone();
        trace_config.widths = vec![width];
        let block = model
            .params
            .blocks
            .iter()
            .find(|b| b.width == width)
            .expect("width taken from the block list");
        let mut trace_params = model.params.clone();
        trace_params.blocks = vec![block.clone()];
        // Output layer shape no longer matches the single block; bypass it by
        // evaluating only up to the gate pre-activations.
        let n_k = block.sentiment_filters.rows();
        trace_params.output_weights = crate::numeric::Matrix::zeros(model.config.class_count, n_k);
        forward::forward(
            model.variant,
            &trace_config,
            &trace_params,
            &padded,
            Some(aspect),
        )?
    };

    let gate_pre = pass.cache.blocks[0]
        .gate_pre
        .as_ref()
        .expect("aspect-aware variants always have a gate branch");
    let mut scores = vec![0.0; tokens.len()];
    for position in 0..gate_pre.cols() {
        let mut total = 0.0;
        for j in 0..gate_pre.rows() {
            let v = gate_pre[(j, position)];
            if v > 0.0 {
                total += v;
            }
        }
        // Attribute the window to its first word. Positions beyond the
        // original length only exist for sentences shorter than the filter.
        if position < scores.len() {
            scores[position] += total;
        } else {
            scores[0] += total;
        }
    }
    let sum: f64 = scores.iter().sum();
    if sum > 0.0 {
        for s in &mut scores {
            *s /= sum;
        }
    }
    Ok(GateTrace { scores, width })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelConfig, ModelVariant};

    fn tiny_config() -> ModelConfig {
        ModelConfig {
            vocab_size: 12,
            embed_dim: 4,
            widths: vec![2, 3],
            filters_per_width: 3,
            class_count: 3,
            aspect_count: 4,
            term_width: 2,
            term_filters: 5,
        }
    }

    #[test]
    fn scores_are_normalized_and_cover_all_tokens() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 31).unwrap();
        let tokens = [2usize, 3, 4, 5, 6, 7];
        let trace = model.gate_trace(&tokens, AspectInput::Category(1)).unwrap();
        assert_eq!(trace.scores.len(), tokens.len());
        assert_eq!(trace.width, 2);
        assert!(trace.scores.iter().all(|&s| s >= 0.0));
        let sum: f64 = trace.scores.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12 || sum == 0.0);
        // Width-2 windows leave exactly the last token without a window of
        // its own.
        assert_eq!(trace.scores.last(), Some(&0.0));
    }

    #[test]
    fn trace_depends_on_aspect() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 31).unwrap();
        let tokens = [2usize, 3, 4, 5, 6, 7];
        let a = model.gate_trace(&tokens, AspectInput::Category(0)).unwrap();
        let b = model.gate_trace(&tokens, AspectInput::Category(2)).unwrap();
        assert_ne!(a.scores, b.scores);
    }

    #[test]
    fn smooth_gates_are_rejected() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Glu), &tiny_config(), 31).unwrap();
        let err = model.gate_trace(&[2, 3, 4], AspectInput::Category(0)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        let cnn = Model::new(ModelVariant::cnn(), &tiny_config(), 31).unwrap();
        assert!(cnn.gate_trace(&[2, 3, 4], AspectInput::Category(0)).is_err());
    }

    #[test]
    fn short_sentences_attribute_to_the_first_word() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 31).unwrap();
        let trace = model.gate_trace(&[5], AspectInput::Category(1)).unwrap();
        assert_eq!(trace.scores.len(), 1);
        let sum: f64 = trace.scores.iter().sum();
        assert!(sum == 0.0 || (sum - 1.0).abs() < 1e-12);
    }
}
