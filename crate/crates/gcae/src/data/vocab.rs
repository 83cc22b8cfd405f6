//! Token, aspect and class vocabularies, plus instance encoding.
//!
//! Token ids: 0 is the padding token, 1 the unknown token; the rest are
//! training-corpus tokens ordered by descending frequency (ties broken
//! lexicographically) so the mapping is deterministic for a given corpus.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::instances::{LabeledInstance, Polarity};
use crate::error::{Error, Result};
use crate::model::{AspectInput, Task};

pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";
pub const PAD_ID: usize = 0;
pub const UNK_ID: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    aspects: Vec<String>,
    classes: Vec<Polarity>,
    token_index: HashMap<String, usize>,
    aspect_index: HashMap<String, usize>,
}

/// On-disk JSON form; indices are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct VocabFile {
    tokens: Vec<String>,
    aspects: Vec<String>,
    classes: Vec<Polarity>,
}

impl Vocab {
    /// Builds the vocabulary from training instances. Aspect names become a
    /// category list only for the category task; term-level aspects are free
    /// text encoded through the token vocabulary instead.
    pub fn build(instances: &[LabeledInstance], task: Task) -> Vocab {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for inst in instances {
            for tok in &inst.tokens {
                *counts.entry(tok).or_insert(0) += 1;
            }
            if let Some(aspect_tokens) = &inst.aspect_tokens {
                for tok in aspect_tokens {
                    *counts.entry(tok).or_insert(0) += 1;
                }
            }
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut tokens = Vec::with_capacity(ranked.len() + 2);
        tokens.push(PAD_TOKEN.to_string());
        tokens.push(UNK_TOKEN.to_string());
        tokens.extend(ranked.into_iter().map(|(t, _)| t.to_string()));

        let aspects = match task {
            Task::Acsa => {
                let mut names: Vec<String> =
                    instances.iter().map(|i| i.aspect.clone()).collect();
                names.sort();
                names.dedup();
                names
            }
            Task::Atsa => Vec::new(),
        };

        let classes = Polarity::CANONICAL
            .iter()
            .copied()
            .filter(|p| instances.iter().any(|i| i.polarity == *p))
            .collect();

        Vocab::assemble(tokens, aspects, classes)
    }

    fn assemble(tokens: Vec<String>, aspects: Vec<String>, classes: Vec<Polarity>) -> Vocab {
        let token_index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let aspect_index = aspects
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), i))
            .collect();
        Vocab {
            tokens,
            aspects,
            classes,
            token_index,
            aspect_index,
        }
    }

    /// Token id, falling back to the unknown id.
    pub fn token_id(&self, token: &str) -> usize {
        self.token_index.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn aspect_id(&self, name: &str) -> Result<usize> {
        self.aspect_index.get(name).copied().ok_or_else(|| {
            Error::Data(format!(
                "aspect '{name}' not in the training aspect set {:?}",
                self.aspects
            ))
        })
    }

    pub fn class_id(&self, polarity: Polarity) -> Result<usize> {
        self.classes
            .iter()
            .position(|&p| p == polarity)
            .ok_or_else(|| {
                Error::Data(format!(
                    "label '{}' never appears in the training data",
                    polarity.as_str()
                ))
            })
    }

    pub fn class_of(&self, id: usize) -> Option<Polarity> {
        self.classes.get(id).copied()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn aspects(&self) -> &[String] {
        &self.aspects
    }

    pub fn classes(&self) -> &[Polarity] {
        &self.classes
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn aspect_count(&self) -> usize {
        self.aspects.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file =
            File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        let out = VocabFile {
            tokens: self.tokens.clone(),
            aspects: self.aspects.clone(),
            classes: self.classes.clone(),
        };
        serde_json::to_writer_pretty(BufWriter::new(file), &out)
            .map_err(|e| Error::Data(format!("encoding vocabulary: {e}")))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Vocab> {
        let file =
            File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
        let raw: VocabFile =
            serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        if raw.tokens.first().map(String::as_str) != Some(PAD_TOKEN)
            || raw.tokens.get(1).map(String::as_str) != Some(UNK_TOKEN)
        {
            return Err(Error::Parse {
                path: path.display().to_string(),
                message: format!("ids 0 and 1 must be {PAD_TOKEN} and {UNK_TOKEN}"),
            });
        }
        let vocab = Vocab::assemble(raw.tokens, raw.aspects, raw.classes);
        if vocab.token_index.len() != vocab.tokens.len() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                message: "duplicate tokens in vocabulary".to_string(),
            });
        }
        Ok(vocab)
    }

    /// SHA-256 over the canonical JSON form; stored in checkpoints so weights
    /// can refuse a mismatched token mapping.
    pub fn hash(&self) -> String {
        let out = VocabFile {
            tokens: self.tokens.clone(),
            aspects: self.aspects.clone(),
            classes: self.classes.clone(),
        };
        let bytes = serde_json::to_vec(&out).expect("vocabulary serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

/// Id-level instance ready for the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedInstance {
    pub tokens: Vec<usize>,
    pub aspect: EncodedAspect,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EncodedAspect {
    Category(usize),
    Term(Vec<usize>),
}

impl EncodedInstance {
    pub fn aspect_input(&self) -> AspectInput<'_> {
        match &self.aspect {
            EncodedAspect::Category(id) => AspectInput::Category(*id),
            EncodedAspect::Term(ids) => AspectInput::Term(ids),
        }
    }
}

/// Encodes instances to ids, padding every sentence to at least `min_len`
/// (the widest filter) with the pad token. Out-of-vocabulary tokens map to
/// the unknown id; an unseen aspect category or label is an error.
pub fn encode_instances(
    instances: &[LabeledInstance],
    vocab: &Vocab,
    task: Task,
    min_len: usize,
) -> Result<Vec<EncodedInstance>> {
    let mut out = Vec::with_capacity(instances.len());
    for inst in instances {
        let mut tokens: Vec<usize> = inst.tokens.iter().map(|t| vocab.token_id(t)).collect();
        while tokens.len() < min_len {
            tokens.push(PAD_ID);
        }
        let aspect = match task {
            Task::Acsa => EncodedAspect::Category(vocab.aspect_id(&inst.aspect)?),
            Task::Atsa => {
                let aspect_tokens = inst.aspect_tokens.as_ref().ok_or_else(|| {
                    Error::Data(format!(
                        "sentence {}: term-level encoding needs aspect tokens",
                        inst.sentence_id
                    ))
                })?;
                if aspect_tokens.is_empty() {
                    return Err(Error::Data(format!(
                        "sentence {}: empty aspect term",
                        inst.sentence_id
                    )));
                }
                EncodedAspect::Term(aspect_tokens.iter().map(|t| vocab.token_id(t)).collect())
            }
        };
        out.push(EncodedInstance {
            tokens,
            aspect,
            target: vocab.class_id(inst.polarity)?,
        });
    }
    Ok(out)
}
