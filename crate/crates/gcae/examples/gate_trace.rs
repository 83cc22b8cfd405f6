//! Where do the gates let signal through? Trains a small relu-gated model
//! on the synthetic corpus, then scores each word of one sentence under
//! two different aspects. The same sentence yields different score
//! profiles: mass concentrates on the clause about the queried aspect.
//!
//!     cargo run --release --example gate_trace

use gcae::data::{encode_instances, synthetic, tokenize, Vocab};
use gcae::model::{AspectInput, GateKind, Model, ModelVariant, Task};
use gcae::train::{train_epochs, ExecMode, TrainConfig};

fn bar(score: f64) -> String {
    "#".repeat((score * 40.0).round() as usize)
}

fn main() -> gcae::Result<()> {
    let (train, _) = synthetic::splits(42, 150, 10);
    let vocab = Vocab::build(&train, Task::Acsa);
    let mut config = TrainConfig::default();
    config.learning_rate = 0.05;
    config.embed_dim = 30;
    config.filters_per_width = 50;
    let model_config = config.model_config(&vocab);
    let enc = encode_instances(&train, &vocab, Task::Acsa, model_config.min_sentence_len())?;

    let mut model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &model_config, 9)?;
    train_epochs(&mut model, &enc, None, &config, 15, 10, ExecMode::Serialized)?;

    let sentence = "the meal was great but the staff was rude .";
    let words = tokenize(sentence);
    let tokens: Vec<usize> = words.iter().map(|w| vocab.token_id(w)).collect();
    println!("\"{sentence}\"\n");

    for aspect in ["food", "service"] {
        let id = vocab.aspect_id(aspect)?;
        let trace = model.gate_trace(&tokens, AspectInput::Category(id))?;
        let predicted = model.predict(&tokens, Some(AspectInput::Category(id)))?;
        println!(
            "aspect {aspect} -> {}",
            vocab.class_of(predicted).map(|p| p.as_str()).unwrap_or("?")
        );
        for (word, score) in words.iter().zip(&trace.scores) {
            println!("  {word:<8} {score:.3} {}", bar(*score));
        }
        println!();
    }
    Ok(())
}
