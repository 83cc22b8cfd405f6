//! Valid 1-D convolution over a token-major sentence matrix.
//!
//! The sentence is stored as an `L x D` matrix (one row per token, `D`
//! embedding dimensions), so the receptive field of width `k` starting at
//! position `i` is the contiguous slice of rows `i..i+k`. A filter row of
//! length `D*k` is laid out window-major: element `t*D + d` multiplies
//! dimension `d` of token `i + t`.
//!
//! The accumulation order is fixed (ascending flat index, i.e. innermost over
//! `D`, then over the window offset) so results can be compared bit-exactly
//! against a brute-force reference.

use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// Feature map produced by [`conv1d_forward`]: one row per filter, one column
/// per window position.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvOutput {
    pub features: Matrix,
    /// Receptive-field width `k` of the convolution that produced this output.
    pub width: usize,
}

impl ConvOutput {
    /// Number of window positions `L_k = L - k + 1`.
    pub fn positions(&self) -> usize {
        self.features.cols()
    }
}

fn check_shapes(sentence: &Matrix, filters: &Matrix, bias: &[f64], width: usize) -> Result<()> {
    let (len, dim) = sentence.shape();
    if width == 0 || len < width {
        return Err(Error::shape(
            "conv1d",
            format!("sentence length >= width {width}"),
            format!("length {len}"),
        ));
    }
    if filters.cols() != dim * width {
        return Err(Error::shape(
            "conv1d",
            format!("filter row length {} (D={dim} x k={width})", dim * width),
            format!("filter row length {}", filters.cols()),
        ));
    }
    if bias.len() != filters.rows() {
        return Err(Error::shape(
            "conv1d",
            format!("{} bias entries", filters.rows()),
            format!("{} bias entries", bias.len()),
        ));
    }
    Ok(())
}

/// Slides each filter across the sentence and records the raw (pre-activation)
/// feature per position: `features[j][i] = dot(filters[j], window(i)) + bias[j]`.
///
/// No activation is applied here; gate variants share this kernel and apply
/// their own nonlinearities.
pub fn conv1d_forward(
    sentence: &Matrix,
    filters: &Matrix,
    bias: &[f64],
    width: usize,
) -> Result<ConvOutput> {
    check_shapes(sentence, filters, bias, width)?;
    let (len, dim) = sentence.shape();
    let positions = len - width + 1;
    let n_filters = filters.rows();
    let flat = sentence.as_slice();

    let mut features = Matrix::zeros(n_filters, positions);
    for j in 0..n_filters {
        let f_row = filters.row(j);
        let out_row = features.row_mut(j);
        for (i, out) in out_row.iter_mut().enumerate() {
            let window = &flat[i * dim..(i + width) * dim];
            let mut acc = 0.0;
            for (w, x) in f_row.iter().zip(window) {
                acc += w * x;
            }
            *out = acc + bias[j];
        }
    }
    Ok(ConvOutput { features, width })
}

/// Exact analytic gradients of `sum(upstream .* features)` with respect to the
/// sentence, the filters, and the bias.
pub fn conv1d_backward(
    sentence: &Matrix,
    filters: &Matrix,
    width: usize,
    upstream: &Matrix,
) -> Result<(Matrix, Matrix, Vec<f64>)> {
    let (len, dim) = sentence.shape();
    check_shapes(sentence, filters, &vec![0.0; filters.rows()], width)?;
    let positions = len - width + 1;
    if upstream.shape() != (filters.rows(), positions) {
        return Err(Error::shape(
            "conv1d_backward",
            format!("upstream {}x{positions}", filters.rows()),
            format!("upstream {}x{}", upstream.rows(), upstream.cols()),
        ));
    }

    let mut grad_sentence = Matrix::zeros(len, dim);
    let mut grad_filters = Matrix::zeros(filters.rows(), filters.cols());
    let mut grad_bias = vec![0.0; filters.rows()];

    let flat = sentence.as_slice();
    let grad_flat = grad_sentence.as_mut_slice();
    for j in 0..filters.rows() {
        let f_row = filters.row(j);
        let gf_row = grad_filters.row_mut(j);
        for i in 0..positions {
            let g = upstream[(j, i)];
            grad_bias[j] += g;
            let window = &flat[i * dim..(i + width) * dim];
            let grad_window = &mut grad_flat[i * dim..(i + width) * dim];
            for p in 0..dim * width {
                gf_row[p] += g * window[p];
                grad_window[p] += g * f_row[p];
            }
        }
    }
    Ok((grad_sentence, grad_filters, grad_bias))
}
