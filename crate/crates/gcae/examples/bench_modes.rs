//! Single-thread vs fan-out training on identical data.
//!
//! Serialized mode is bit-for-bit reproducible; fan-out accumulates
//! per-instance gradients across worker threads, which reorders float
//! summation, so its results may differ in the last bits while staying
//! statistically equivalent. Final accuracies of both modes are printed
//! for comparison.
//!
//!     cargo run --release --example bench_modes

use gcae::data::{encode_instances, synthetic, Vocab};
use gcae::model::{GateKind, Model, ModelVariant, Task};
use gcae::train::{evaluate, train_epochs_timed, ExecMode, TrainConfig};

fn main() -> gcae::Result<()> {
    let (train, test) = synthetic::splits(42, 200, 50);
    let vocab = Vocab::build(&train, Task::Acsa);
    let mut config = TrainConfig::default();
    config.learning_rate = 0.05;
    config.embed_dim = 30;
    config.filters_per_width = 50;
    let model_config = config.model_config(&vocab);
    let min_len = model_config.min_sentence_len();
    let enc_train = encode_instances(&train, &vocab, Task::Acsa, min_len)?;
    let enc_test = encode_instances(&test, &vocab, Task::Acsa, min_len)?;
    println!(
        "{} instances, {} worker threads available",
        enc_train.len(),
        rayon::current_num_threads()
    );

    for exec in [ExecMode::Serialized, ExecMode::FanOut] {
        let mut model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &model_config, 1)?;
        let started = std::time::Instant::now();
        let (_, epoch_seconds) = train_epochs_timed(
            &mut model,
            &enc_train,
            None,
            &config,
            10,
            2,
            exec,
        )?;
        let total = started.elapsed().as_secs_f64();
        let mean_epoch = epoch_seconds.iter().sum::<f64>() / epoch_seconds.len() as f64;
        let accuracy = evaluate(&model, &enc_test)?;
        println!(
            "{:<10} {:>6.2}s total, {:>6.3}s/epoch, accuracy {accuracy:.3}",
            exec.name(),
            total,
            mean_epoch
        );
    }
    Ok(())
}
