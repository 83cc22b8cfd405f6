//! Gate ablation on the synthetic corpus: the three gating units against
//! the aspect-blind baselines, identical data and dimensions throughout.
//!
//! Every test sentence carries opposite sentiments on two aspects, so
//! aspect-blind models (cnn, gcn) are pinned at exactly 0.5 while
//! aspect-conditioned ones can exceed it.
//!
//!     cargo run --release --example compare_gates

use gcae::data::{encode_instances, synthetic, Vocab};
use gcae::model::{GateKind, Model, ModelVariant, Task};
use gcae::train::{evaluate, train_epochs, ExecMode, TrainConfig};

fn main() -> gcae::Result<()> {
    let (train, test) = synthetic::splits(42, 150, 50);
    let vocab = Vocab::build(&train, Task::Acsa);
    let mut config = TrainConfig::default();
    config.learning_rate = 0.05;
    config.embed_dim = 30;
    config.filters_per_width = 50;
    let model_config = config.model_config(&vocab);
    let min_len = model_config.min_sentence_len();
    let enc_train = encode_instances(&train, &vocab, Task::Acsa, min_len)?;
    let enc_test = encode_instances(&test, &vocab, Task::Acsa, min_len)?;

    let variants = [
        ModelVariant::gcae_acsa(GateKind::Gtru),
        ModelVariant::gcae_acsa(GateKind::Gtu),
        ModelVariant::gcae_acsa(GateKind::Glu),
        ModelVariant::gcn(GateKind::Gtru),
        ModelVariant::cnn(),
    ];
    println!(
        "{} train / {} test instances (all hard)\n",
        enc_train.len(),
        enc_test.len()
    );
    println!("{:<12} {:<6} {:>9} {:>8}", "variant", "gate", "accuracy", "time");
    for variant in variants {
        let started = std::time::Instant::now();
        let mut model = Model::new(variant, &model_config, 1)?;
        train_epochs(&mut model, &enc_train, None, &config, 20, 2, ExecMode::Serialized)?;
        let accuracy = evaluate(&model, &enc_test)?;
        println!(
            "{:<12} {:<6} {:>9.3} {:>7.1}s",
            variant.name(),
            variant.gate.name(),
            accuracy,
            started.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
