//! Gating units that combine the sentiment and gate pre-activations.
//!
//! All three units are elementwise over matrices of shape
//! `filters x positions`:
//!
//! - `gtru`: tanh(s) * relu(a) — relu admits exact zeros, so features whose
//!   gate pre-activation is negative are blocked completely,
//! - `gtu`:  tanh(s) * sigmoid(a),
//! - `glu`:  s * sigmoid(a).

use crate::error::{Error, Result};
use crate::model::GateKind;
use crate::numeric::{Activation, Matrix};

/// Elementwise gated output for matching pre-activation matrices.
pub fn gate_forward(kind: GateKind, sentiment: &Matrix, gate: &Matrix) -> Result<Matrix> {
    if sentiment.shape() != gate.shape() {
        return Err(Error::shape(
            "gate branches",
            format!("{:?}", sentiment.shape()),
            format!("{:?}", gate.shape()),
        ));
    }
    let mut out = Matrix::zeros(sentiment.rows(), sentiment.cols());
    let s = sentiment.as_slice();
    let a = gate.as_slice();
    let o = out.as_mut_slice();
    match kind {
        GateKind::Gtru => {
            for i in 0..o.len() {
                o[i] = s[i].tanh() * Activation::Relu.apply(a[i]);
            }
        }
        GateKind::Gtu => {
            for i in 0..o.len() {
                o[i] = s[i].tanh() * Activation::Sigmoid.apply(a[i]);
            }
        }
        GateKind::Glu => {
            for i in 0..o.len() {
                o[i] = s[i] * Activation::Sigmoid.apply(a[i]);
            }
        }
    }
    Ok(out)
}

/// Gradients with respect to both pre-activation matrices.
///
/// For c = f(s) * g(a): dc/ds = f'(s) * g(a) and dc/da = f(s) * g'(a),
/// applied elementwise and scaled by `upstream`.
pub fn gate_backward(
    kind: GateKind,
    sentiment: &Matrix,
    gate: &Matrix,
    upstream: &Matrix,
) -> Result<(Matrix, Matrix)> {
    if sentiment.shape() != gate.shape() || sentiment.shape() != upstream.shape() {
        return Err(Error::shape(
            "gate backward",
            format!("{:?}", sentiment.shape()),
            format!("s={:?} a={:?} up={:?}", sentiment.shape(), gate.shape(), upstream.shape()),
        ));
    }
    let mut d_s = Matrix::zeros(sentiment.rows(), sentiment.cols());
    let mut d_a = Matrix::zeros(sentiment.rows(), sentiment.cols());
    let s = sentiment.as_slice();
    let a = gate.as_slice();
    let up = upstream.as_slice();
    let ds = d_s.as_mut_slice();
    let da = d_a.as_mut_slice();
    for i in 0..up.len() {
        let (fs, dfs, ga, dga) = match kind {
            GateKind::Gtru => {
                let t = s[i].tanh();
                (
                    t,
                    1.0 - t * t,
                    Activation::Relu.apply(a[i]),
                    Activation::Relu.derivative(a[i]),
                )
            }
            GateKind::Gtu => {
                let t = s[i].tanh();
                let g = Activation::Sigmoid.apply(a[i]);
                (t, 1.0 - t * t, g, g * (1.0 - g))
            }
            GateKind::Glu => {
                let g = Activation::Sigmoid.apply(a[i]);
                (s[i], 1.0, g, g * (1.0 - g))
            }
        };
        ds[i] = up[i] * dfs * ga;
        da[i] = up[i] * fs * dga;
    }
    Ok((d_s, d_a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(v: f64) -> Matrix {
        Matrix::from_vec(1, 1, vec![v]).unwrap()
    }

    #[test]
    fn gtru_blocks_negative_gate_exactly() {
        let out = gate_forward(GateKind::Gtru, &single(3.0), &single(-5.0)).unwrap();
        assert_eq!(out[(0, 0)], 0.0);
    }

    #[test]
    fn gtru_passes_positive_gate() {
        // relu(2) * tanh(0.5) = 2 * 0.46211715... = 0.9242343...
        let out = gate_forward(GateKind::Gtru, &single(0.5), &single(2.0)).unwrap();
        assert!((out[(0, 0)] - 0.924_234_3).abs() < 1e-6);
    }

    #[test]
    fn gtu_output_is_bounded_by_one() {
        for s in [-30.0, -2.0, 0.0, 1.5, 50.0] {
            for a in [-10.0, 0.0, 0.3, 10.0] {
                let out = gate_forward(GateKind::Gtu, &single(s), &single(a)).unwrap();
                assert!(out[(0, 0)].abs() <= 1.0, "gtu({s}, {a}) = {}", out[(0, 0)]);
            }
        }
    }

    #[test]
    fn glu_is_linear_in_sentiment() {
        let a = single(0.7);
        let one = gate_forward(GateKind::Glu, &single(1.0), &a).unwrap();
        let three = gate_forward(GateKind::Glu, &single(3.0), &a).unwrap();
        assert!((three[(0, 0)] - 3.0 * one[(0, 0)]).abs() < 1e-12);
    }

    #[test]
    fn backward_matches_finite_differences() {
        let eps = 1e-6;
        for kind in [GateKind::Gtru, GateKind::Gtu, GateKind::Glu] {
            for (s0, a0) in [(0.3, 0.8), (-1.2, 0.4), (0.9, -0.6), (1.7, 2.1)] {
                let up = single(1.0);
                let (ds, da) = gate_backward(kind, &single(s0), &single(a0), &up).unwrap();
                let f = |s: f64, a: f64| gate_forward(kind, &single(s), &single(a)).unwrap()[(0, 0)];
                let nds = (f(s0 + eps, a0) - f(s0 - eps, a0)) / (2.0 * eps);
                let nda = (f(s0, a0 + eps) - f(s0, a0 - eps)) / (2.0 * eps);
                assert!((ds[(0, 0)] - nds).abs() < 1e-7, "{kind:?} ds at ({s0},{a0})");
                assert!((da[(0, 0)] - nda).abs() < 1e-7, "{kind:?} da at ({s0},{a0})");
            }
        }
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(3, 2);
        assert!(gate_forward(GateKind::Gtru, &a, &b).is_err());
        assert!(gate_backward(GateKind::Glu, &a, &a, &b).is_err());
    }
}
