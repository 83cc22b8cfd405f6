//! Deterministic synthetic corpus for end-to-end checks and benchmarks.
//!
//! Every sentence names two different aspects with *opposite* sentiments
//! ("the meal was great but the staff was rude ."), and yields two
//! instances — one per aspect. Consequences, by construction:
//!
//! - every sentence belongs to the hard subset;
//! - any aspect-blind classifier answers both instances of a sentence
//!   identically and therefore scores exactly 50% on it;
//! - an aspect-conditioned model can reach 100%, since the aspect's noun and
//!   the adjacent adjective fully determine the label.
//!
//! Adjectives are shared across aspects, so the task cannot be solved from
//! word identity alone — the model has to connect the queried aspect to the
//! right clause.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::instances::{LabeledInstance, Polarity};
use crate::data::tokenize::tokenize;

const ASPECTS: [(&str, [&str; 3]); 6] = [
    ("ambience", ["ambience", "decor", "atmosphere"]),
    ("drinks", ["drinks", "wine", "cocktails"]),
    ("food", ["food", "meal", "dish"]),
    ("location", ["location", "neighborhood", "view"]),
    ("price", ["price", "bill", "cost"]),
    ("service", ["service", "staff", "waiter"]),
];

const POSITIVE: [&str; 8] = [
    "great", "amazing", "friendly", "lovely", "excellent", "wonderful", "delightful", "superb",
];
const NEGATIVE: [&str; 8] = [
    "terrible", "awful", "rude", "bland", "horrible", "dirty", "disappointing", "noisy",
];
const CONNECTORS: [&str; 3] = ["but", "yet", "while"];

fn build_sentence(
    id: usize,
    first: usize,
    second: usize,
    first_positive: bool,
    rng: &mut ChaCha8Rng,
) -> (String, [LabeledInstance; 2]) {
    let (aspect_a, nouns_a) = ASPECTS[first];
    let (aspect_b, nouns_b) = ASPECTS[second];
    let noun_a = nouns_a[rng.random_range(0..nouns_a.len())];
    let noun_b = nouns_b[rng.random_range(0..nouns_b.len())];
    let (adj_a, adj_b, pol_a, pol_b) = if first_positive {
        (
            POSITIVE[rng.random_range(0..POSITIVE.len())],
            NEGATIVE[rng.random_range(0..NEGATIVE.len())],
            Polarity::Positive,
            Polarity::Negative,
        )
    } else {
        (
            NEGATIVE[rng.random_range(0..NEGATIVE.len())],
            POSITIVE[rng.random_range(0..POSITIVE.len())],
            Polarity::Negative,
            Polarity::Positive,
        )
    };
    let connector = CONNECTORS[rng.random_range(0..CONNECTORS.len())];
    let text =
        format!("the {noun_a} was {adj_a} {connector} the {noun_b} was {adj_b} .");
    let tokens = tokenize(&text);
    let sentence_id = format!("syn-{id:04}");
    let make = |aspect: &str, polarity| LabeledInstance {
        sentence_id: sentence_id.clone(),
        text: text.clone(),
        tokens: tokens.clone(),
        aspect: aspect.to_string(),
        aspect_tokens: None,
        polarity,
    };
    let pair = [make(aspect_a, pol_a), make(aspect_b, pol_b)];
    (text, pair)
}

/// Generates `sentences` unique sentences (2 instances each). The first 30
/// cover every ordered aspect pair once so small corpora still see every
/// aspect; the rest are sampled.
pub fn generate(seed: u64, sentences: usize) -> Vec<LabeledInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(sentences * 2);
    let mut id = 0;

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for a in 0..ASPECTS.len() {
        for b in 0..ASPECTS.len() {
            if a != b {
                pairs.push((a, b));
            }
        }
    }

    let mut attempts = 0usize;
    while id < sentences {
        let (first, second) = if id < pairs.len() {
            pairs[id]
        } else {
            let a = rng.random_range(0..ASPECTS.len());
            let mut b = rng.random_range(0..ASPECTS.len());
            while b == a {
                b = rng.random_range(0..ASPECTS.len());
            }
            (a, b)
        };
        let first_positive = rng.random_bool(0.5);
        let (text, pair) = build_sentence(id, first, second, first_positive, &mut rng);
        attempts += 1;
        assert!(
            attempts < sentences * 200,
            "synthetic template space exhausted at {id} sentences"
        );
        if !seen.insert(text) {
            continue;
        }
        out.extend(pair);
        id += 1;
    }
    out
}

/// Disjoint train/test splits drawn from one unique-sentence pool.
pub fn splits(
    seed: u64,
    train_sentences: usize,
    test_sentences: usize,
) -> (Vec<LabeledInstance>, Vec<LabeledInstance>) {
    let all = generate(seed, train_sentences + test_sentences);
    let cut = train_sentences * 2;
    let train = all[..cut].to_vec();
    let test = all[cut..].to_vec();
    (train, test)
}
