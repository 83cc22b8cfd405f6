//! Forward evaluation: embeddings -> paired convolutions -> gate ->
//! max-over-time pooling -> softmax classifier.
//!
//! The pass records every intermediate needed by the analytic backward pass
//! in a [`ForwardCache`], so training never re-runs the forward computation.

use crate::error::{Error, Result};
use crate::model::{Baseline, GateKind, Model, ModelConfig, ModelParams, ModelVariant, Task};
use crate::numeric::{
    conv1d_forward, max_over_time, softmax, Activation, ConvOutput, Matrix, Pooled,
};

pub const PAD_ID: usize = 0;

/// Aspect conditioning for one instance: a category id for ACSA, the token
/// ids of the aspect term for ATSA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AspectInput<'a> {
    Category(usize),
    Term(&'a [usize]),
}

/// Cached state of the aspect-vector computation.
#[derive(Debug, Clone)]
pub(crate) enum AspectCache {
    /// Aspect-blind variants.
    None,
    Category {
        id: usize,
        vector: Vec<f64>,
    },
    Term {
        /// Term ids padded to at least the term-convolution width.
        padded_ids: Vec<usize>,
        embedded: Matrix,
        pre: ConvOutput,
        pooled: Pooled,
        vector: Vec<f64>,
    },
}

impl AspectCache {
    pub(crate) fn vector(&self) -> Option<&[f64]> {
        match self {
            AspectCache::None => None,
            AspectCache::Category { vector, .. } => Some(vector),
            AspectCache::Term { vector, .. } => Some(vector),
        }
    }
}

/// Per-width intermediates: both pre-activation matrices and the pooling
/// decision.
#[derive(Debug, Clone)]
pub struct BlockCache {
    pub(crate) sentiment_pre: ConvOutput,
    /// None for the plain-CNN baseline.
    pub(crate) gate_pre: Option<Matrix>,
    pub(crate) pooled: Pooled,
}

#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub(crate) token_ids: Vec<usize>,
    pub(crate) embedded: Matrix,
    pub(crate) aspect: AspectCache,
    pub(crate) blocks: Vec<BlockCache>,
    pub(crate) pooled_concat: Vec<f64>,
    pub logits: Vec<f64>,
}

impl ForwardCache {
    /// Discrete decisions of the pass: pooling argmax positions plus, where a
    /// relu sits in the computation, the sign of its pre-activation. Two
    /// evaluations with equal signatures lie on the same smooth piece of the
    /// loss, which is what the guarded gradient checker needs to know.
    pub fn signature(&self, variant: ModelVariant) -> Vec<u64> {
        let mut sig = Vec::new();
        if let AspectCache::Term { pre, pooled, .. } = &self.aspect {
            for &v in pre.features.as_slice() {
                sig.push(u64::from(v > 0.0));
            }
            sig.extend(pooled.argmax.iter().map(|&i| i as u64));
        }
        for block in &self.blocks {
            sig.extend(block.pooled.argmax.iter().map(|&i| i as u64));
            if variant.baseline != Baseline::Cnn && variant.gate == GateKind::Gtru {
                if let Some(gate_pre) = &block.gate_pre {
                    for &v in gate_pre.as_slice() {
                        sig.push(u64::from(v > 0.0));
                    }
                }
            }
        }
        sig
    }
}

/// Class probabilities plus everything the backward pass needs.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub probs: Vec<f64>,
    pub cache: ForwardCache,
}

fn embed(params: &ModelParams, ids: &[usize], context: &str) -> Result<Matrix> {
    let vocab = params.word_embeddings.rows();
    let d = params.word_embeddings.cols();
    let mut m = Matrix::zeros(ids.len(), d);
    for (pos, &id) in ids.iter().enumerate() {
        if id >= vocab {
            return Err(Error::Data(format!(
                "{context}: token id {id} out of range (vocab size {vocab})"
            )));
        }
        m.row_mut(pos).copy_from_slice(params.word_embeddings.row(id));
    }
    Ok(m)
}

fn aspect_cache(
    variant: ModelVariant,
    params: &ModelParams,
    aspect: Option<AspectInput<'_>>,
) -> Result<AspectCache> {
    if !variant.aspect_aware() {
        return Ok(AspectCache::None);
    }
    let aspect = aspect.ok_or_else(|| {
        Error::Data(format!(
            "variant {} requires an aspect input",
            variant.name()
        ))
    })?;
    match (variant.task, aspect) {
        (Task::Acsa, AspectInput::Category(id)) => {
            let table = params
                .aspect_embeddings
                .as_ref()
                .expect("category-conditioned variant carries aspect embeddings");
            if id >= table.rows() {
                return Err(Error::Data(format!(
                    "aspect id {id} out of range ({} categories)",
                    table.rows()
                )));
            }
            Ok(AspectCache::Category {
                id,
                vector: table.row(id).to_vec(),
            })
        }
        (Task::Atsa, AspectInput::Term(ids)) => {
            let term = params
                .term_cnn
                .as_ref()
                .expect("term-conditioned variant carries a term encoder");
            let mut padded_ids = ids.to_vec();
            while padded_ids.len() < term.width {
                padded_ids.push(PAD_ID);
            }
            let embedded = embed(params, &padded_ids, "aspect term")?;
            let pre = conv1d_forward(&embedded, &term.filters, &term.bias, term.width)?;
            let relu = Activation::Relu.forward(&pre.features);
            let pooled = max_over_time(&ConvOutput {
                features: relu,
                width: term.width,
            });
            let vector = pooled.values.clone();
            Ok(AspectCache::Term {
                padded_ids,
                embedded,
                pre,
                pooled,
                vector,
            })
        }
        (Task::Acsa, AspectInput::Term(_)) => Err(Error::Data(
            "category-conditioned variant got an aspect term".to_string(),
        )),
        (Task::Atsa, AspectInput::Category(_)) => Err(Error::Data(
            "term-conditioned variant got a category id".to_string(),
        )),
    }
}

/// Adds `dot(projection[j], aspect)` to every position of gate-filter j.
fn add_aspect_projection(gate_pre: &mut Matrix, projection: &Matrix, aspect: &[f64]) -> Result<()> {
    if projection.cols() != aspect.len() {
        return Err(Error::shape(
            "aspect projection",
            projection.cols().to_string(),
            aspect.len().to_string(),
        ));
    }
    for j in 0..gate_pre.rows() {
        let row = projection.row(j);
        let mut acc = 0.0;
        for d in 0..aspect.len() {
            acc += row[d] * aspect[d];
        }
        for v in gate_pre.row_mut(j) {
            *v += acc;
        }
    }
    Ok(())
}

pub fn forward(
    variant: ModelVariant,
    config: &ModelConfig,
    params: &ModelParams,
    tokens: &[usize],
    aspect: Option<AspectInput<'_>>,
) -> Result<ForwardPass> {
    let min_len = config.min_sentence_len();
    if tokens.len() < min_len {
        return Err(Error::Data(format!(
            "sentence of {} tokens is shorter than the widest filter ({min_len}); pad it first",
            tokens.len()
        )));
    }
    let embedded = embed(params, tokens, "sentence")?;
    let aspect = aspect_cache(variant, params, aspect)?;

    let mut blocks = Vec::with_capacity(params.blocks.len());
    let mut pooled_concat = Vec::with_capacity(params.blocks.len() * config.filters_per_width);
    for block in &params.blocks {
        let sentiment_pre = conv1d_forward(
            &embedded,
            &block.sentiment_filters,
            &block.sentiment_bias,
            block.width,
        )?;
        let (gated, gate_pre) = match &block.gate {
            None => (Activation::Tanh.forward(&sentiment_pre.features), None),
            Some(gate) => {
                let mut pre =
                    conv1d_forward(&embedded, &gate.filters, &gate.bias, block.width)?.features;
                if let Some(projection) = &gate.projection {
                    let vector = aspect
                        .vector()
                        .expect("projection present only on aspect-aware variants");
                    add_aspect_projection(&mut pre, projection, vector)?;
                }
                let gated = super::gate_forward(variant.gate, &sentiment_pre.features, &pre)?;
                (gated, Some(pre))
            }
        };
        let pooled = max_over_time(&ConvOutput {
            features: gated,
            width: block.width,
        });
        pooled_concat.extend_from_slice(&pooled.values);
        blocks.push(BlockCache {
            sentiment_pre,
            gate_pre,
            pooled,
        });
    }

    if pooled_concat.len() != params.output_weights.cols() {
        return Err(Error::shape(
            "pooled feature vector",
            params.output_weights.cols().to_string(),
            pooled_concat.len().to_string(),
        ));
    }
    let mut logits = params.output_bias.clone();
    for (c, logit) in logits.iter_mut().enumerate() {
        let row = params.output_weights.row(c);
        let mut acc = 0.0;
        for j in 0..pooled_concat.len() {
            acc += row[j] * pooled_concat[j];
        }
        *logit += acc;
    }
    let probs = softmax(&logits);

    Ok(ForwardPass {
        probs,
        cache: ForwardCache {
            token_ids: tokens.to_vec(),
            embedded,
            aspect,
            blocks,
            pooled_concat,
            logits,
        },
    })
}

/// Predicted class: argmax of the probabilities, lowest index on ties.
pub fn predict(model: &Model, tokens: &[usize], aspect: Option<AspectInput<'_>>) -> Result<usize> {
    let pass = model.forward(tokens, aspect)?;
    let mut best = 0;
    for (c, &p) in pass.probs.iter().enumerate() {
        if p > pass.probs[best] {
            best = c;
        }
    }
    Ok(best)
}

/// Loss together with the discrete signature of the pass; used by the
/// guarded gradient checker to discard perturbations that cross a relu kink
/// or flip a pooling argmax.
pub fn loss_and_signature(
    model: &Model,
    tokens: &[usize],
    aspect: Option<AspectInput<'_>>,
    target: usize,
) -> Result<(f64, Vec<u64>)> {
    let pass = model.forward(tokens, aspect)?;
    let (loss, _) = crate::numeric::softmax_cross_entropy(&pass.cache.logits, target)?;
    Ok((loss, pass.cache.signature(model.variant)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GateKind;

    fn tiny_config() -> ModelConfig {
        ModelConfig {
            vocab_size: 12,
            embed_dim: 5,
            widths: vec![2, 3],
            filters_per_width: 4,
            class_count: 3,
            aspect_count: 4,
            term_width: 2,
            term_filters: 6,
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 11).unwrap();
        let pass = model
            .forward(&[3, 4, 5, 6, 7], Some(AspectInput::Category(1)))
            .unwrap();
        let sum: f64 = pass.probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(pass.probs.iter().all(|&p| p > 0.0));
        assert_eq!(pass.probs.len(), 3);
    }

    #[test]
    fn output_depends_on_aspect_category() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 11).unwrap();
        let tokens = [3, 4, 5, 6, 7];
        let a = model.forward(&tokens, Some(AspectInput::Category(0))).unwrap();
        let b = model.forward(&tokens, Some(AspectInput::Category(2))).unwrap();
        assert_ne!(a.probs, b.probs);
    }

    #[test]
    fn aspect_blind_variants_ignore_the_aspect() {
        for variant in [ModelVariant::cnn(), ModelVariant::gcn(GateKind::Gtru)] {
            let model = Model::new(variant, &tiny_config(), 5).unwrap();
            let tokens = [2, 9, 1, 4, 8];
            let none = model.forward(&tokens, None).unwrap();
            let cat = model.forward(&tokens, Some(AspectInput::Category(3))).unwrap();
            assert_eq!(none.probs, cat.probs, "{}", variant.name());
        }
    }

    #[test]
    fn missing_aspect_is_an_error_for_aware_variants() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 1).unwrap();
        assert!(model.forward(&[1, 2, 3], None).is_err());
        // Wrong aspect kind for the task is also rejected.
        assert!(model.forward(&[1, 2, 3], Some(AspectInput::Term(&[2]))).is_err());
    }

    #[test]
    fn short_sentences_are_rejected_with_padding_hint() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 1).unwrap();
        let err = model
            .forward(&[4, 5], Some(AspectInput::Category(0)))
            .unwrap_err();
        assert!(err.to_string().contains("pad"), "{err}");
    }

    #[test]
    fn term_variant_pads_short_terms() {
        let model = Model::new(ModelVariant::gcae_atsa(GateKind::Gtru), &tiny_config(), 9).unwrap();
        // A single-token term is padded up to the term-conv width internally.
        let pass = model
            .forward(&[3, 4, 5, 6], Some(AspectInput::Term(&[7])))
            .unwrap();
        let sum: f64 = pass.probs.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
        match &pass.cache.aspect {
            AspectCache::Term { padded_ids, vector, .. } => {
                assert_eq!(padded_ids, &[7, PAD_ID]);
                assert_eq!(vector.len(), 6);
                // relu then max-over-time keeps the aspect vector nonnegative.
                assert!(vector.iter().all(|&v| v >= 0.0));
            }
            other => panic!("expected term cache, got {other:?}"),
        }
    }

    #[test]
    fn term_aspect_changes_output() {
        let model = Model::new(ModelVariant::gcae_atsa(GateKind::Gtru), &tiny_config(), 9).unwrap();
        let tokens = [3, 4, 5, 6, 7, 8];
        let a = model.forward(&tokens, Some(AspectInput::Term(&[4, 5]))).unwrap();
        let b = model.forward(&tokens, Some(AspectInput::Term(&[9, 10]))).unwrap();
        assert_ne!(a.probs, b.probs);
    }

    #[test]
    fn out_of_range_ids_are_rejected() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 1).unwrap();
        assert!(model
            .forward(&[1, 2, 99], Some(AspectInput::Category(0)))
            .is_err());
        assert!(model
            .forward(&[1, 2, 3], Some(AspectInput::Category(99)))
            .is_err());
    }

    #[test]
    fn signature_tracks_gate_sign_for_gtru_only() {
        let config = tiny_config();
        let tokens = [3, 4, 5, 6, 7];
        let gtru = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &config, 2).unwrap();
        let glu = Model::new(ModelVariant::gcae_acsa(GateKind::Glu), &config, 2).unwrap();
        let sig_gtru = gtru
            .forward(&tokens, Some(AspectInput::Category(0)))
            .unwrap()
            .cache
            .signature(gtru.variant);
        let sig_glu = glu
            .forward(&tokens, Some(AspectInput::Category(0)))
            .unwrap()
            .cache
            .signature(glu.variant);
        // Same pooling decisions count; gtru adds one sign bit per gate cell.
        assert!(sig_gtru.len() > sig_glu.len());
    }
}
