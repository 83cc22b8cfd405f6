//! Epoch loop: shuffle, mini-batch gradient averaging, Adagrad step.
//!
//! One shuffle stream (seeded once) spans all epochs, so a training run is a
//! pure function of (initial model, data order, config, seed, mode). The
//! serialized mode is bit-for-bit reproducible; the fan-out mode computes
//! identical per-instance gradients but merges them in worker order, so
//! float summation order — and therefore low-order bits — can differ between
//! runs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::EncodedInstance;
use crate::error::{Error, Result};
use crate::model::{AspectInput, Model, ModelParams};
use crate::train::{Adagrad, TrainConfig};

/// How batch gradients are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    /// One thread, fixed order, bit-for-bit reproducible.
    Serialized,
    /// Per-instance gradients in parallel, merged per worker.
    FanOut,
}

impl ExecMode {
    pub fn parse(s: &str) -> Result<ExecMode> {
        match s {
            "serialized" => Ok(ExecMode::Serialized),
            "fanout" => Ok(ExecMode::FanOut),
            other => Err(Error::Config(format!(
                "unknown execution mode '{other}' (expected serialized or fanout)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExecMode::Serialized => "serialized",
            ExecMode::FanOut => "fanout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    /// 1-based epoch number.
    pub epoch: usize,
    pub mean_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub val_accuracy: Option<f64>,
}

fn aspect_for<'a>(model: &Model, inst: &'a EncodedInstance) -> Option<AspectInput<'a>> {
    if model.variant.aspect_aware() {
        Some(inst.aspect_input())
    } else {
        None
    }
}

/// Accumulates the gradient of one instance; returns its loss.
fn instance_grad(model: &Model, inst: &EncodedInstance, grads: &mut ModelParams) -> Result<f64> {
    let pass = model.forward(&inst.tokens, aspect_for(model, inst))?;
    model.backward(&pass.cache, inst.target, grads)
}

/// Fraction of instances whose predicted class matches the target.
pub fn evaluate(model: &Model, data: &[EncodedInstance]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::Data("cannot evaluate on an empty split".to_string()));
    }
    let mut correct = 0usize;
    for inst in data {
        if model.predict(&inst.tokens, aspect_for(model, inst))? == inst.target {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

fn batch_grads_serialized(
    model: &Model,
    data: &[EncodedInstance],
    batch: &[usize],
    grads: &mut ModelParams,
) -> Result<f64> {
    let mut loss_sum = 0.0;
    for &i in batch {
        loss_sum += instance_grad(model, &data[i], grads)?;
    }
    Ok(loss_sum)
}

fn batch_grads_fanout(
    model: &Model,
    data: &[EncodedInstance],
    batch: &[usize],
    grads: &mut ModelParams,
) -> Result<f64> {
    let (partial, loss_sum) = batch
        .par_iter()
        .try_fold(
            || (model.params.zeros_like(), 0.0),
            |(mut g, mut l), &i| -> Result<(ModelParams, f64)> {
                l += instance_grad(model, &data[i], &mut g)?;
                Ok((g, l))
            },
        )
        .try_reduce(
            || (model.params.zeros_like(), 0.0),
            |(mut a, la), (b, lb)| {
                a.add_assign(&b)?;
                Ok((a, la + lb))
            },
        )?;
    grads.add_assign(&partial)?;
    Ok(loss_sum)
}

/// Trains in place for `epochs` epochs, evaluating on `val_data` (when
/// given) after each. Aborts with an error the moment a loss stops being
/// finite; the model is left at its last finite state.
pub fn train_epochs(
    model: &mut Model,
    train_data: &[EncodedInstance],
    val_data: Option<&[EncodedInstance]>,
    config: &TrainConfig,
    epochs: usize,
    shuffle_seed: u64,
    exec: ExecMode,
) -> Result<Vec<EpochStats>> {
    train_epochs_timed(model, train_data, val_data, config, epochs, shuffle_seed, exec)
        .map(|(history, _)| history)
}

/// [`train_epochs`] plus wall-clock seconds per epoch, for benchmarking.
/// Timings are returned out-of-band so training records stay
/// machine-independent.
pub fn train_epochs_timed(
    model: &mut Model,
    train_data: &[EncodedInstance],
    val_data: Option<&[EncodedInstance]>,
    config: &TrainConfig,
    epochs: usize,
    shuffle_seed: u64,
    exec: ExecMode,
) -> Result<(Vec<EpochStats>, Vec<f64>)> {
    if train_data.is_empty() {
        return Err(Error::Data("cannot train on an empty split".to_string()));
    }
    let mut optimizer = Adagrad::new(&model.params, config.learning_rate, config.adagrad_eps);
    let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
    let mut indices: Vec<usize> = (0..train_data.len()).collect();
    let mut grads = model.params.zeros_like();
    let mut history = Vec::with_capacity(epochs);
    let mut epoch_seconds = Vec::with_capacity(epochs);

    for epoch in 1..=epochs {
        let epoch_started = std::time::Instant::now();
        indices.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for batch in indices.chunks(config.batch_size) {
            grads.zero();
            let batch_loss = match exec {
                ExecMode::Serialized => batch_grads_serialized(model, train_data, batch, &mut grads)?,
                ExecMode::FanOut => batch_grads_fanout(model, train_data, batch, &mut grads)?,
            };
            if !batch_loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "training loss in epoch {epoch}"
                )));
            }
            loss_sum += batch_loss;
            grads.scale(1.0 / batch.len() as f64);
            optimizer.step(&mut model.params, &grads)?;
        }
        if !model.params.is_finite() {
            return Err(Error::NonFinite(format!("model parameters after epoch {epoch}")));
        }
        let val_accuracy = match val_data {
            Some(val) => Some(evaluate(model, val)?),
            None => None,
        };
        history.push(EpochStats {
            epoch,
            mean_loss: loss_sum / train_data.len() as f64,
            val_accuracy,
        });
        epoch_seconds.push(epoch_started.elapsed().as_secs_f64());
    }
    Ok((history, epoch_seconds))
}
