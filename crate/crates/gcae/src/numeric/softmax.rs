//! Numerically stable softmax and cross-entropy loss.

use crate::error::{Error, Result};

/// Softmax with the max-subtraction trick.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Cross-entropy loss of the target class together with the gradient
/// `softmax(logits) - onehot(target)`.
///
/// The loss is computed as `logsumexp(logits) - logits[target]`, which equals
/// `-log(softmax(logits)[target])` without overflow for large logits.
pub fn softmax_cross_entropy(logits: &[f64], target: usize) -> Result<(f64, Vec<f64>)> {
    if logits.len() < 2 {
        return Err(Error::shape(
            "softmax_cross_entropy",
            "at least 2 classes".to_string(),
            format!("{} classes", logits.len()),
        ));
    }
    if target >= logits.len() {
        return Err(Error::shape(
            "softmax_cross_entropy",
            format!("target < {}", logits.len()),
            format!("target {target}"),
        ));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|&v| (v - max).exp()).sum();
    let loss = max + sum.ln() - logits[target];

    let mut grad = softmax(logits);
    grad[target] -= 1.0;
    Ok((loss, grad))
}
