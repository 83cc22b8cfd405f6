//! Analytic backward pass for the cross-entropy loss of one instance.
//!
//! Gradients are *accumulated* into a caller-owned [`ModelParams`] so a batch
//! can sum per-instance gradients and scale once. Word-embedding gradients
//! are sparse: only rows for tokens present in the instance (plus aspect-term
//! tokens) receive contributions. Chain through the aspect projection: the
//! projected scalar is broadcast over all positions in the forward pass, so
//! its coefficient in the backward pass is the row-sum of the gate
//! pre-activation gradient — the same quantity as the gate bias gradient.

use crate::error::{Error, Result};
use crate::model::forward::AspectCache;
use crate::model::{gate_backward, Baseline, ForwardCache, ModelParams, ModelVariant};
use crate::numeric::{
    conv1d_backward, max_over_time_backward, softmax_cross_entropy, Activation, Matrix,
};

fn add_matrix(dst: &mut Matrix, src: &Matrix, context: &str) -> Result<()> {
    if !dst.same_shape(src) {
        return Err(Error::shape(
            context,
            format!("{:?}", dst.shape()),
            format!("{:?}", src.shape()),
        ));
    }
    let d = dst.as_mut_slice();
    let s = src.as_slice();
    for i in 0..d.len() {
        d[i] += s[i];
    }
    Ok(())
}

fn add_slice(dst: &mut [f64], src: &[f64]) {
    debug_assert_eq!(dst.len(), src.len());
    for i in 0..dst.len() {
        dst[i] += src[i];
    }
}

pub fn backward(
    variant: ModelVariant,
    params: &ModelParams,
    cache: &ForwardCache,
    target: usize,
    grads: &mut ModelParams,
) -> Result<f64> {
    if cache.blocks.len() != params.blocks.len() || grads.blocks.len() != params.blocks.len() {
        return Err(Error::shape(
            "backward blocks",
            params.blocks.len().to_string(),
            format!("cache {} grads {}", cache.blocks.len(), grads.blocks.len()),
        ));
    }

    let (loss, dlogits) = softmax_cross_entropy(&cache.logits, target)?;

    // Output layer: logits = W_o e + b_o.
    let e = &cache.pooled_concat;
    for (c, &dl) in dlogits.iter().enumerate() {
        grads.output_bias[c] += dl;
        let g_row = grads.output_weights.row_mut(c);
        for j in 0..e.len() {
            g_row[j] += dl * e[j];
        }
    }
    let mut d_pooled = vec![0.0; e.len()];
    for (j, d) in d_pooled.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, &dl) in dlogits.iter().enumerate() {
            acc += dl * params.output_weights[(c, j)];
        }
        *d = acc;
    }

    let (len, dim) = cache.embedded.shape();
    let mut d_embedded = Matrix::zeros(len, dim);
    let mut d_aspect = cache.aspect.vector().map(|v| vec![0.0; v.len()]);

    let mut offset = 0;
    for (bi, pb) in params.blocks.iter().enumerate() {
        let cb = &cache.blocks[bi];
        let n_k = pb.sentiment_filters.rows();
        let upstream = &d_pooled[offset..offset + n_k];
        offset += n_k;

        let d_gated =
            max_over_time_backward(&cb.pooled.argmax, upstream, cb.sentiment_pre.positions());

        let (d_sentiment_pre, d_gate_pre) = match (&pb.gate, &cb.gate_pre) {
            (None, None) => (
                Activation::Tanh.backward(&cb.sentiment_pre.features, &d_gated)?,
                None,
            ),
            (Some(_), Some(gate_pre)) => {
                let (ds, da) =
                    gate_backward(variant.gate, &cb.sentiment_pre.features, gate_pre, &d_gated)?;
                (ds, Some(da))
            }
            _ => {
                return Err(Error::Data(
                    "forward cache does not match the parameter structure".to_string(),
                ))
            }
        };

        let (dx, dw, db) =
            conv1d_backward(&cache.embedded, &pb.sentiment_filters, pb.width, &d_sentiment_pre)?;
        add_matrix(&mut d_embedded, &dx, "sentence gradient")?;
        let gb = &mut grads.blocks[bi];
        add_matrix(&mut gb.sentiment_filters, &dw, "sentiment filter gradient")?;
        add_slice(&mut gb.sentiment_bias, &db);

        if let (Some(pg), Some(d_gate_pre)) = (&pb.gate, d_gate_pre) {
            let (dx_a, dw_a, db_a) =
                conv1d_backward(&cache.embedded, &pg.filters, pb.width, &d_gate_pre)?;
            add_matrix(&mut d_embedded, &dx_a, "sentence gradient (gate)")?;
            let gg = gb
                .gate
                .as_mut()
                .expect("gradient storage mirrors the parameter structure");
            add_matrix(&mut gg.filters, &dw_a, "gate filter gradient")?;
            add_slice(&mut gg.bias, &db_a);

            if let Some(projection) = &pg.projection {
                let vector = cache
                    .aspect
                    .vector()
                    .expect("projection implies an aspect vector");
                let d_aspect = d_aspect
                    .as_mut()
                    .expect("projection implies an aspect gradient");
                let g_proj = gg
                    .projection
                    .as_mut()
                    .expect("gradient storage mirrors the parameter structure");
                for j in 0..n_k {
                    // Row sum of d_gate_pre — already computed as the bias
                    // gradient by conv1d_backward.
                    let coeff = db_a[j];
                    let p_row = projection.row(j);
                    let gp_row = g_proj.row_mut(j);
                    for d in 0..vector.len() {
                        gp_row[d] += coeff * vector[d];
                        d_aspect[d] += coeff * p_row[d];
                    }
                }
            }
        }
    }

    // Scatter sentence gradients into the embedding rows that produced them.
    for (pos, &tok) in cache.token_ids.iter().enumerate() {
        add_slice(grads.word_embeddings.row_mut(tok), d_embedded.row(pos));
    }

    match (&cache.aspect, d_aspect) {
        (AspectCache::None, None) => {}
        (AspectCache::Category { id, .. }, Some(d_aspect)) => {
            let table = grads
                .aspect_embeddings
                .as_mut()
                .expect("gradient storage mirrors the parameter structure");
            add_slice(table.row_mut(*id), &d_aspect);
        }
        (
            AspectCache::Term {
                padded_ids,
                embedded,
                pre,
                pooled,
                ..
            },
            Some(d_aspect),
        ) => {
            let term = params
                .term_cnn
                .as_ref()
                .expect("term cache implies a term encoder");
            let d_relu = max_over_time_backward(&pooled.argmax, &d_aspect, pre.positions());
            let d_pre = Activation::Relu.backward(&pre.features, &d_relu)?;
            let (dxt, dwt, dbt) = conv1d_backward(embedded, &term.filters, term.width, &d_pre)?;
            let g_term = grads
                .term_cnn
                .as_mut()
                .expect("gradient storage mirrors the parameter structure");
            add_matrix(&mut g_term.filters, &dwt, "term filter gradient")?;
            add_slice(&mut g_term.bias, &dbt);
            for (pos, &tok) in padded_ids.iter().enumerate() {
                add_slice(grads.word_embeddings.row_mut(tok), dxt.row(pos));
            }
        }
        _ => {
            return Err(Error::Data(
                "aspect cache does not match the parameter structure".to_string(),
            ))
        }
    }

    if variant.baseline == Baseline::Cnn && grads.blocks.iter().any(|b| b.gate.is_some()) {
        return Err(Error::Data(
            "gradient storage has gate branches but the variant does not".to_string(),
        ));
    }

    Ok(loss)
}
