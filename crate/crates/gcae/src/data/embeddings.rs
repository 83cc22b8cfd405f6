//! Pretrained word-vector loading.
//!
//! File format: one token per line followed by its values, space-separated.
//! Only vocabulary tokens are kept. Vocabulary tokens absent from the file
//! get seeded uniform(-0.25, 0.25) rows — drawn in ascending id order so the
//! result depends only on (vocabulary, file content, seed) — and the pad row
//! is zeroed last.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::vocab::{Vocab, PAD_ID};
use crate::error::{Error, Result};
use crate::numeric::Matrix;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EmbeddingStats {
    /// Vocabulary tokens found in the file.
    pub found: usize,
    /// Vocabulary tokens that fell back to random initialization.
    pub missing: usize,
    /// File lines dropped as malformed (wrong field count, bad floats).
    pub skipped_lines: usize,
}

/// Reads pretrained vectors for `vocab` into a `token_count x dim` matrix.
///
/// The first well-formed line fixes the file's dimension; if it disagrees
/// with `dim` the load fails (a wrong-dimension file is a configuration
/// mistake, not noise). Later lines with a different field count are counted
/// as malformed and skipped.
pub fn load_embeddings(
    path: &Path,
    vocab: &Vocab,
    dim: usize,
    seed: u64,
) -> Result<(Matrix, EmbeddingStats)> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let reader = BufReader::new(file);

    let mut rows: Vec<Option<Vec<f64>>> = vec![None; vocab.token_count()];
    let mut stats = EmbeddingStats::default();
    let mut file_dim: Option<usize> = None;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let Some(token) = fields.next() else {
            stats.skipped_lines += 1;
            continue;
        };
        let values: std::result::Result<Vec<f64>, _> =
            fields.map(|f| f.parse::<f64>()).collect();
        let values = match values {
            Ok(v) if !v.is_empty() => v,
            _ => {
                stats.skipped_lines += 1;
                continue;
            }
        };
        match file_dim {
            None => {
                if values.len() != dim {
                    return Err(Error::Parse {
                        path: path.display().to_string(),
                        message: format!(
                            "line {}: file has {}-dimensional vectors, expected {dim}",
                            lineno + 1,
                            values.len()
                        ),
                    });
                }
                file_dim = Some(values.len());
            }
            Some(d) if values.len() != d => {
                stats.skipped_lines += 1;
                continue;
            }
            Some(_) => {}
        }
        let id = vocab.token_id(token);
        // token_id falls back to the unknown id for non-vocabulary tokens;
        // only accept exact matches.
        if vocab.tokens()[id] == token && rows[id].is_none() {
            rows[id] = Some(values);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table = Matrix::zeros(vocab.token_count(), dim);
    for id in 0..vocab.token_count() {
        match &rows[id] {
            Some(values) => {
                stats.found += 1;
                table.row_mut(id).copy_from_slice(values);
            }
            None => {
                stats.missing += 1;
                for v in table.row_mut(id) {
                    *v = rng.random_range(-0.25..0.25);
                }
            }
        }
    }
    table.row_mut(PAD_ID).fill(0.0);
    Ok((table, stats))
}
