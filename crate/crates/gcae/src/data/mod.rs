//! Corpus handling: XML readers, instance records, vocabularies, pretrained
//! vectors, the multi-year merged corpus, and a synthetic benchmark corpus.

pub mod embeddings;
pub mod instances;
pub mod merge;
pub mod semeval;
pub mod synthetic;
pub mod tokenize;
pub mod vocab;

pub use embeddings::{load_embeddings, EmbeddingStats};
pub use instances::{
    hard_subset, read_jsonl, split_stats, write_jsonl, LabeledInstance, Polarity, SplitStats,
};
pub use merge::{restaurant_large, MergeStats, LARGE_ASPECTS};
pub use semeval::{parse_semeval_file, parse_semeval_str, ParsedCorpus, SkipRecord, XmlLayout};
pub use tokenize::tokenize;
pub use vocab::{encode_instances, EncodedAspect, EncodedInstance, Vocab, PAD_ID, UNK_ID};
