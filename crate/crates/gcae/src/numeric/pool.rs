//! Max-over-time pooling.

use crate::numeric::{ConvOutput, Matrix};

/// Per-filter maximum with the winning position recorded for backprop.
#[derive(Debug, Clone, PartialEq)]
pub struct Pooled {
    pub values: Vec<f64>,
    pub argmax: Vec<usize>,
}

/// Takes the maximal feature per filter row. Ties break toward the lowest
/// position index.
pub fn max_over_time(conv: &ConvOutput) -> Pooled {
    let features = &conv.features;
    let mut values = Vec::with_capacity(features.rows());
    let mut argmax = Vec::with_capacity(features.rows());
    for j in 0..features.rows() {
        let row = features.row(j);
        let mut best = row[0];
        let mut best_i = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > best {
                best = v;
                best_i = i;
            }
        }
        values.push(best);
        argmax.push(best_i);
    }
    Pooled { values, argmax }
}

/// Routes the upstream gradient to the argmax position of each filter row;
/// every other position receives zero.
pub fn max_over_time_backward(argmax: &[usize], upstream: &[f64], positions: usize) -> Matrix {
    debug_assert_eq!(argmax.len(), upstream.len());
    let mut grad = Matrix::zeros(argmax.len(), positions);
    for (j, (&i, &g)) in argmax.iter().zip(upstream).enumerate() {
        grad[(j, i)] = g;
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conv_of(rows: &[Vec<f64>]) -> ConvOutput {
        ConvOutput {
            features: Matrix::from_rows(rows).unwrap(),
            width: 1,
        }
    }

    #[test]
    fn takes_row_maximum() {
        let pooled = max_over_time(&conv_of(&[vec![3.0, 1.0, 2.0]]));
        assert_eq!(pooled.values, vec![3.0]);
        assert_eq!(pooled.argmax, vec![0]);
    }

    #[test]
    fn ties_break_to_lowest_index() {
        let pooled = max_over_time(&conv_of(&[vec![1.0, 3.0, 3.0]]));
        assert_eq!(pooled.values, vec![3.0]);
        assert_eq!(pooled.argmax, vec![1]);
    }

    #[test]
    fn backward_routes_to_argmax_only() {
        let pooled = max_over_time(&conv_of(&[vec![1.0, 4.0, 2.0], vec![5.0, 0.0, 0.0]]));
        let grad = max_over_time_backward(&pooled.argmax, &[10.0, -3.0], 3);
        assert_eq!(grad.row(0), &[0.0, 10.0, 0.0]);
        assert_eq!(grad.row(1), &[-3.0, 0.0, 0.0]);
    }
}
