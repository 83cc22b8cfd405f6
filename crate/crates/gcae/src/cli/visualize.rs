//! `visualize`: per-word gate scores for one sentence under one aspect,
//! as CSV ready for bar plotting.

use std::path::PathBuf;

use crate::data::{tokenize, Vocab};
use crate::error::{Error, Result};
use crate::model::{load_checkpoint, AspectInput, Task};

#[derive(Debug, Clone)]
pub struct VisualizeArgs {
    pub checkpoint: PathBuf,
    /// Vocabulary file the checkpoint was trained with (verified by hash).
    pub vocab: PathBuf,
    pub sentence: String,
    /// Aspect category name (category models) or aspect term text
    /// (term models).
    pub aspect: String,
    /// CSV destination; stdout when absent.
    pub out: Option<PathBuf>,
}

/// Quotes a CSV field only when it needs it (commas, quotes, newlines —
/// single punctuation tokens can be any of these).
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn cmd_visualize(args: &VisualizeArgs) -> Result<()> {
    let (model, vocab_hash) = load_checkpoint(&args.checkpoint)?;
    let vocab = Vocab::load(&args.vocab)?;
    if vocab.hash() != vocab_hash {
        return Err(Error::Data(format!(
            "{} does not match the vocabulary this checkpoint was trained with \
             (hash {} vs {})",
            args.vocab.display(),
            vocab.hash(),
            vocab_hash
        )));
    }

    let words = tokenize(&args.sentence);
    if words.is_empty() {
        return Err(Error::Data("the sentence holds no tokens".to_string()));
    }
    let tokens: Vec<usize> = words.iter().map(|w| vocab.token_id(w)).collect();

    let term_ids: Vec<usize>;
    let aspect = match model.variant.task {
        Task::Acsa => AspectInput::Category(vocab.aspect_id(&args.aspect)?),
        Task::Atsa => {
            let term_words = tokenize(&args.aspect);
            if term_words.is_empty() {
                return Err(Error::Data("the aspect term holds no tokens".to_string()));
            }
            term_ids = term_words.iter().map(|w| vocab.token_id(w)).collect();
            AspectInput::Term(&term_ids)
        }
    };

    let trace = model.gate_trace(&tokens, aspect)?;
    let prediction = model.predict(&tokens, Some(aspect))?;

    let mut csv = String::from("word,score\n");
    for (word, score) in words.iter().zip(&trace.scores) {
        csv.push_str(&format!("{},{}\n", csv_field(word), score));
    }

    eprintln!(
        "aspect '{}' -> predicted {} (gate width {})",
        args.aspect,
        vocab
            .class_of(prediction)
            .map(|p| p.as_str())
            .unwrap_or("?"),
        trace.width
    );
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}
