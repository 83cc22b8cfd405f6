//! Elementwise activations with analytic derivatives.

use crate::error::{Error, Result};
use crate::numeric::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
    Sigmoid,
}

impl Activation {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Relu => {
                if x > 0.0 {
                    x
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    /// Derivative evaluated at the pre-activation `x`. The relu derivative at
    /// exactly zero is defined as 0.
    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => {
                let t = x.tanh();
                1.0 - t * t
            }
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = 1.0 / (1.0 + (-x).exp());
                s * (1.0 - s)
            }
        }
    }

    pub fn forward(self, x: &Matrix) -> Matrix {
        x.map(|v| self.apply(v))
    }

    /// Returns `upstream .* derivative-at-x`.
    pub fn backward(self, x: &Matrix, upstream: &Matrix) -> Result<Matrix> {
        if !x.same_shape(upstream) {
            return Err(Error::shape(
                "activation_backward",
                format!("{}x{}", x.rows(), x.cols()),
                format!("{}x{}", upstream.rows(), upstream.cols()),
            ));
        }
        let mut out = Matrix::zeros(x.rows(), x.cols());
        for ((o, &xi), &u) in out
            .as_mut_slice()
            .iter_mut()
            .zip(x.as_slice())
            .zip(upstream.as_slice())
        {
            *o = u * self.derivative(xi);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_values() {
        assert_eq!(Activation::Relu.apply(-1.0), 0.0);
        assert_eq!(Activation::Relu.apply(2.0), 2.0);
        assert_eq!(Activation::Tanh.apply(0.0), 0.0);
        assert_eq!(Activation::Sigmoid.apply(0.0), 0.5);
    }

    #[test]
    fn relu_derivative_at_kink_is_zero() {
        assert_eq!(Activation::Relu.derivative(0.0), 0.0);
        assert_eq!(Activation::Relu.derivative(-0.0), 0.0);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // Random-ish points away from the relu kink.
        let points = [-1.7, -0.4, 0.3, 0.9, 2.1];
        let eps = 1e-6;
        for act in [Activation::Tanh, Activation::Relu, Activation::Sigmoid] {
            for &x in &points {
                let numeric = (act.apply(x + eps) - act.apply(x - eps)) / (2.0 * eps);
                let analytic = act.derivative(x);
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
                assert!(rel < 1e-6, "{act:?} at {x}: analytic {analytic} numeric {numeric}");
            }
        }
    }

    #[test]
    fn backward_scales_upstream() {
        let x = Matrix::from_vec(1, 3, vec![-1.0, 0.0, 2.0]).unwrap();
        let upstream = Matrix::from_vec(1, 3, vec![5.0, 5.0, 5.0]).unwrap();
        let grad = Activation::Relu.backward(&x, &upstream).unwrap();
        assert_eq!(grad.as_slice(), &[0.0, 0.0, 5.0]);
    }
}
