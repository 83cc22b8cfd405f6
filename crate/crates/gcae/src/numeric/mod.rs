//! Dense numeric primitives with forward and backward passes.
//!
//! Everything here is a pure function of its inputs and safe to call
//! concurrently on shared read-only data. All arithmetic is in 64-bit floats
//! so finite-difference checks have headroom.

mod activation;
mod conv;
mod grad_check;
mod matrix;
mod pool;
mod softmax;

pub use activation::Activation;
pub use conv::{conv1d_backward, conv1d_forward, ConvOutput};
pub use grad_check::{grad_check, grad_check_guarded, GradCheckReport};
pub use matrix::Matrix;
pub use pool::{max_over_time, max_over_time_backward, Pooled};
pub use softmax::{softmax, softmax_cross_entropy};
