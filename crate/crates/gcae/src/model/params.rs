//! Parameter storage shared by all model variants.
//!
//! Gradients reuse the same struct ([`ModelParams::zeros_like`]) so the
//! optimizer can walk parameters and gradients in lockstep through the
//! named-tensor views.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{Baseline, ModelConfig, ModelVariant, Task};
use crate::numeric::Matrix;

/// Gate branch of one filter width: convolution weights plus the optional
/// aspect projection (absent in the no-aspect ablation).
#[derive(Debug, Clone, PartialEq)]
pub struct GateBranch {
    /// filters_per_width x (embed_dim * width)
    pub filters: Matrix,
    pub bias: Vec<f64>,
    /// filters_per_width x aspect_dim; each row is added (dotted with the
    /// aspect vector) to every position of that filter's pre-activation.
    pub projection: Option<Matrix>,
}

/// Paired sentiment/gate convolutions for one filter width.
#[derive(Debug, Clone, PartialEq)]
pub struct WidthBlock {
    pub width: usize,
    /// filters_per_width x (embed_dim * width)
    pub sentiment_filters: Matrix,
    pub sentiment_bias: Vec<f64>,
    /// None for the plain-CNN baseline (sentiment branch only).
    pub gate: Option<GateBranch>,
}

/// Small convolution that turns aspect-term token embeddings into a fixed
/// aspect vector (max over time of relu features).
#[derive(Debug, Clone, PartialEq)]
pub struct TermCnn {
    pub width: usize,
    /// term_filters x (embed_dim * width)
    pub filters: Matrix,
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// vocab_size x embed_dim; row 0 is the pad embedding and stays zero
    /// (the optimizer skips it).
    pub word_embeddings: Matrix,
    /// aspect_count x embed_dim, for category-conditioned variants.
    pub aspect_embeddings: Option<Matrix>,
    /// Aspect-term encoder, for term-conditioned variants.
    pub term_cnn: Option<TermCnn>,
    pub blocks: Vec<WidthBlock>,
    /// class_count x (filters_per_width * widths)
    pub output_weights: Matrix,
    pub output_bias: Vec<f64>,
}

/// Read-only view of one parameter tensor. Vectors are exposed as 1 x n.
pub struct TensorView<'a> {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: &'a [f64],
}

/// Mutable view of one parameter tensor. The first `frozen_rows` rows are
/// excluded from optimizer updates (only the pad embedding row uses this).
pub struct TensorViewMut<'a> {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: &'a mut [f64],
    pub frozen_rows: usize,
}

fn glorot(rng: &mut ChaCha8Rng, rows: usize, cols: usize, fan_in: usize, fan_out: usize) -> Matrix {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let mut m = Matrix::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = rng.random_range(-limit..limit);
    }
    m
}

impl ModelParams {
    pub(crate) fn init(variant: ModelVariant, config: &ModelConfig, seed: u64) -> ModelParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = config.embed_dim;
        let n_k = config.filters_per_width;
        let d_a = config.aspect_dim(variant.task);

        let mut word_embeddings = Matrix::zeros(config.vocab_size, d);
        for v in word_embeddings.as_mut_slice() {
            *v = rng.random_range(-0.25..0.25);
        }
        word_embeddings.row_mut(0).fill(0.0);

        let aspect_embeddings = if variant.aspect_aware() && variant.task == Task::Acsa {
            let mut m = Matrix::zeros(config.aspect_count.max(1), d);
            for v in m.as_mut_slice() {
                *v = rng.random_range(-0.25..0.25);
            }
            Some(m)
        } else {
            None
        };

        let term_cnn = if variant.aspect_aware() && variant.task == Task::Atsa {
            let fan_in = d * config.term_width;
            Some(TermCnn {
                width: config.term_width,
                filters: glorot(&mut rng, config.term_filters, fan_in, fan_in, config.term_filters),
                bias: vec![0.0; config.term_filters],
            })
        } else {
            None
        };

        let mut blocks = Vec::with_capacity(config.widths.len());
        for &width in &config.widths {
            let fan_in = d * width;
            let sentiment_filters = glorot(&mut rng, n_k, fan_in, fan_in, n_k);
            let gate = if variant.baseline == Baseline::Cnn {
                None
            } else {
                let filters = glorot(&mut rng, n_k, fan_in, fan_in, n_k);
                let projection = if variant.aspect_aware() {
                    Some(glorot(&mut rng, n_k, d_a, d_a, n_k))
                } else {
                    None
                };
                Some(GateBranch {
                    filters,
                    bias: vec![0.0; n_k],
                    projection,
                })
            };
            blocks.push(WidthBlock {
                width,
                sentiment_filters,
                sentiment_bias: vec![0.0; n_k],
                gate,
            });
        }

        let pooled_dim = n_k * config.widths.len();
        let output_weights = glorot(
            &mut rng,
            config.class_count,
            pooled_dim,
            pooled_dim,
            config.class_count,
        );

        ModelParams {
            word_embeddings,
            aspect_embeddings,
            term_cnn,
            blocks,
            output_weights,
            output_bias: vec![0.0; config.class_count],
        }
    }

    /// Same structure with every value set to zero; gradient storage.
    pub fn zeros_like(&self) -> ModelParams {
        let mut z = self.clone();
        for t in z.tensors_mut() {
            t.data.fill(0.0);
        }
        z
    }

    pub fn tensors(&self) -> Vec<TensorView<'_>> {
        fn view<'a>(name: &str, m: &'a Matrix) -> TensorView<'a> {
            TensorView {
                name: name.to_string(),
                rows: m.rows(),
                cols: m.cols(),
                data: m.as_slice(),
            }
        }
        fn vec_view<'a>(name: &str, v: &'a [f64]) -> TensorView<'a> {
            TensorView {
                name: name.to_string(),
                rows: 1,
                cols: v.len(),
                data: v,
            }
        }
        let mut out = Vec::new();
        out.push(view("word_embeddings", &self.word_embeddings));
        if let Some(a) = &self.aspect_embeddings {
            out.push(view("aspect_embeddings", a));
        }
        if let Some(t) = &self.term_cnn {
            out.push(view("term.filters", &t.filters));
            out.push(vec_view("term.bias", &t.bias));
        }
        for b in &self.blocks {
            let w = b.width;
            out.push(view(&format!("w{w}.sentiment_filters"), &b.sentiment_filters));
            out.push(vec_view(&format!("w{w}.sentiment_bias"), &b.sentiment_bias));
            if let Some(g) = &b.gate {
                out.push(view(&format!("w{w}.gate_filters"), &g.filters));
                out.push(vec_view(&format!("w{w}.gate_bias"), &g.bias));
                if let Some(p) = &g.projection {
                    out.push(view(&format!("w{w}.gate_projection"), p));
                }
            }
        }
        out.push(view("output.weights", &self.output_weights));
        out.push(vec_view("output.bias", &self.output_bias));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<TensorViewMut<'_>> {
        let mut out = Vec::new();
        {
            let rows = self.word_embeddings.rows();
            let cols = self.word_embeddings.cols();
            out.push(TensorViewMut {
                name: "word_embeddings".to_string(),
                rows,
                cols,
                data: self.word_embeddings.as_mut_slice(),
                frozen_rows: 1,
            });
        }
        if let Some(a) = &mut self.aspect_embeddings {
            let (rows, cols) = a.shape();
            out.push(TensorViewMut {
                name: "aspect_embeddings".to_string(),
                rows,
                cols,
                data: a.as_mut_slice(),
                frozen_rows: 0,
            });
        }
        if let Some(t) = &mut self.term_cnn {
            let (rows, cols) = t.filters.shape();
            out.push(TensorViewMut {
                name: "term.filters".to_string(),
                rows,
                cols,
                data: t.filters.as_mut_slice(),
                frozen_rows: 0,
            });
            let n = t.bias.len();
            out.push(TensorViewMut {
                name: "term.bias".to_string(),
                rows: 1,
                cols: n,
                data: &mut t.bias,
                frozen_rows: 0,
            });
        }
        for b in &mut self.blocks {
            let w = b.width;
            let (rows, cols) = b.sentiment_filters.shape();
            out.push(TensorViewMut {
                name: format!("w{w}.sentiment_filters"),
                rows,
                cols,
                data: b.sentiment_filters.as_mut_slice(),
                frozen_rows: 0,
            });
            let n = b.sentiment_bias.len();
            out.push(TensorViewMut {
                name: format!("w{w}.sentiment_bias"),
                rows: 1,
                cols: n,
                data: &mut b.sentiment_bias,
                frozen_rows: 0,
            });
            if let Some(g) = &mut b.gate {
                let (rows, cols) = g.filters.shape();
                out.push(TensorViewMut {
                    name: format!("w{w}.gate_filters"),
                    rows,
                    cols,
                    data: g.filters.as_mut_slice(),
                    frozen_rows: 0,
                });
                let n = g.bias.len();
                out.push(TensorViewMut {
                    name: format!("w{w}.gate_bias"),
                    rows: 1,
                    cols: n,
                    data: &mut g.bias,
                    frozen_rows: 0,
                });
                if let Some(p) = &mut g.projection {
                    let (rows, cols) = p.shape();
                    out.push(TensorViewMut {
                        name: format!("w{w}.gate_projection"),
                        rows,
                        cols,
                        data: p.as_mut_slice(),
                        frozen_rows: 0,
                    });
                }
            }
        }
        {
            let (rows, cols) = self.output_weights.shape();
            out.push(TensorViewMut {
                name: "output.weights".to_string(),
                rows,
                cols,
                data: self.output_weights.as_mut_slice(),
                frozen_rows: 0,
            });
        }
        {
            let n = self.output_bias.len();
            out.push(TensorViewMut {
                name: "output.bias".to_string(),
                rows: 1,
                cols: n,
                data: &mut self.output_bias,
                frozen_rows: 0,
            });
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.data.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.data.iter().all(|v| v.is_finite()))
    }

    /// Multiplies every value (used to turn gradient sums into batch means).
    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            for v in t.data {
                *v *= factor;
            }
        }
    }

    /// Resets every value to zero, keeping the structure (gradient reuse
    /// between batches without reallocating).
    pub fn zero(&mut self) {
        for t in self.tensors_mut() {
            t.data.fill(0.0);
        }
    }

    /// Elementwise sum with a same-structure value (merging per-worker
    /// gradient accumulators).
    pub fn add_assign(&mut self, other: &ModelParams) -> crate::Result<()> {
        let mut mine = self.tensors_mut();
        let theirs = other.tensors();
        if mine.len() != theirs.len() {
            return Err(crate::Error::shape(
                "add_assign",
                mine.len().to_string(),
                theirs.len().to_string(),
            ));
        }
        for (a, b) in mine.iter_mut().zip(theirs.iter()) {
            if a.name != b.name || a.data.len() != b.data.len() {
                return Err(crate::Error::shape(
                    "add_assign",
                    format!("{} ({})", a.name, a.data.len()),
                    format!("{} ({})", b.name, b.data.len()),
                ));
            }
            for (x, y) in a.data.iter_mut().zip(b.data.iter()) {
                *x += y;
            }
        }
        Ok(())
    }

    /// Replaces the word-embedding table, e.g. with pretrained vectors.
    /// The pad row is re-zeroed afterwards.
    pub fn set_word_embeddings(&mut self, table: Matrix) -> crate::Result<()> {
        if table.shape() != self.word_embeddings.shape() {
            return Err(crate::Error::shape(
                "word embedding table",
                format!("{:?}", self.word_embeddings.shape()),
                format!("{:?}", table.shape()),
            ));
        }
        self.word_embeddings = table;
        self.word_embeddings.row_mut(0).fill(0.0);
        Ok(())
    }
}
