//! Labeled instances: one record per (sentence, aspect) pair.
//!
//! A sentence mentioning three aspects yields three instances sharing the
//! same `sentence_id`; the id is the grouping key for the hard subset (only
//! sentences whose aspects disagree on polarity).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sentiment label, in canonical index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
    Conflict,
}

impl Polarity {
    /// Fixed class-index order; datasets without the later labels simply use
    /// a prefix of it.
    pub const CANONICAL: [Polarity; 4] = [
        Polarity::Positive,
        Polarity::Negative,
        Polarity::Neutral,
        Polarity::Conflict,
    ];

    pub fn parse(s: &str) -> Result<Polarity> {
        match s {
            "positive" => Ok(Polarity::Positive),
            "negative" => Ok(Polarity::Negative),
            "neutral" => Ok(Polarity::Neutral),
            "conflict" => Ok(Polarity::Conflict),
            other => Err(Error::Data(format!("unknown polarity '{other}'"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
            Polarity::Conflict => "conflict",
        }
    }
}

/// One (sentence, aspect, polarity) triple. For category-level data `aspect`
/// is the category name and `aspect_tokens` is `None`; for term-level data
/// `aspect` is the term's surface form and `aspect_tokens` its tokenization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledInstance {
    pub sentence_id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub aspect: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub aspect_tokens: Option<Vec<String>>,
    pub polarity: Polarity,
}

/// Instances of sentences whose aspects carry at least two distinct
/// polarities. Order is preserved; applying this twice is a no-op because
/// membership only depends on each sentence's own label set.
pub fn hard_subset(instances: &[LabeledInstance]) -> Vec<LabeledInstance> {
    let mut labels: BTreeMap<&str, Vec<Polarity>> = BTreeMap::new();
    for inst in instances {
        labels.entry(&inst.sentence_id).or_default().push(inst.polarity);
    }
    let hard: std::collections::BTreeSet<&str> = labels
        .iter()
        .filter(|(_, polarities)| {
            polarities.iter().any(|&p| p != polarities[0])
        })
        .map(|(id, _)| *id)
        .collect();
    instances
        .iter()
        .filter(|inst| hard.contains(inst.sentence_id.as_str()))
        .cloned()
        .collect()
}

/// Per-class instance counts plus the sentence count, for dataset summaries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStats {
    pub instances: usize,
    pub sentences: usize,
    pub by_class: BTreeMap<String, usize>,
}

pub fn split_stats(instances: &[LabeledInstance]) -> SplitStats {
    let mut by_class = BTreeMap::new();
    let mut sentences = std::collections::BTreeSet::new();
    for inst in instances {
        *by_class.entry(inst.polarity.as_str().to_string()).or_insert(0) += 1;
        sentences.insert(&inst.sentence_id);
    }
    SplitStats {
        instances: instances.len(),
        sentences: sentences.len(),
        by_class,
    }
}

/// Writes one JSON object per line.
pub fn write_jsonl(path: &Path, instances: &[LabeledInstance]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    for inst in instances {
        let line = serde_json::to_string(inst)
            .map_err(|e| Error::Data(format!("encoding instance: {e}")))?;
        writeln!(w, "{line}").map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(())
}

/// Reads instances back; parse failures carry the 1-based line number.
pub fn read_jsonl(path: &Path) -> Result<Vec<LabeledInstance>> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let inst: LabeledInstance = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            message: format!("line {}: {e}", i + 1),
        })?;
        out.push(inst);
    }
    Ok(out)
}
