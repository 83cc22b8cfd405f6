//! Training hyperparameters and their `key = value` file format.
//!
//! The file format is flat: one assignment per line, `#` comments, unknown
//! keys rejected. All problems in a file are collected and reported together
//! so a config can be fixed in one pass.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::Vocab;
use crate::error::{Error, Result};
use crate::model::ModelConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub adagrad_eps: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Cross-validation folds used to pick the stopping epoch.
    pub folds: usize,
    /// Independent repetitions of the whole select-retrain-evaluate cycle.
    pub runs: usize,
    pub seed: u64,
    pub embed_dim: usize,
    pub widths: Vec<usize>,
    pub filters_per_width: usize,
    pub term_width: usize,
    pub term_filters: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-2,
            adagrad_eps: 1e-6,
            batch_size: 32,
            max_epochs: 30,
            folds: 5,
            runs: 5,
            seed: 42,
            embed_dim: 300,
            widths: vec![3, 4, 5],
            filters_per_width: 100,
            term_width: 3,
            term_filters: 100,
        }
    }
}

fn parse_widths(value: &str) -> std::result::Result<Vec<usize>, String> {
    let widths: std::result::Result<Vec<usize>, _> = value
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect();
    widths.map_err(|e| format!("expected comma-separated widths: {e}"))
}

impl TrainConfig {
    /// Applies one assignment; the error is a human-readable reason.
    fn apply(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(value: &str) -> std::result::Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            value.parse::<T>().map_err(|e| e.to_string())
        }
        match key {
            "learning_rate" => self.learning_rate = num(value)?,
            "adagrad_eps" => self.adagrad_eps = num(value)?,
            "batch_size" => self.batch_size = num(value)?,
            "max_epochs" => self.max_epochs = num(value)?,
            "folds" => self.folds = num(value)?,
            "runs" => self.runs = num(value)?,
            "seed" => self.seed = num(value)?,
            "embed_dim" => self.embed_dim = num(value)?,
            "widths" => self.widths = parse_widths(value)?,
            "filters_per_width" => self.filters_per_width = num(value)?,
            "term_width" => self.term_width = num(value)?,
            "term_filters" => self.term_filters = num(value)?,
            _ => return Err("unknown key".to_string()),
        }
        Ok(())
    }

    /// Public single-assignment entry point (used for command-line
    /// overrides).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.apply(key, value)
            .map_err(|reason| Error::Config(format!("{key} = {value}: {reason}")))
    }

    /// Reads a config file on top of the defaults, collecting every problem.
    pub fn from_file(path: &Path) -> Result<TrainConfig> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let mut config = TrainConfig::default();
        let mut errors = Vec::new();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                errors.push(format!("line {}: expected key = value", lineno + 1));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if let Err(reason) = config.apply(key, value) {
                errors.push(format!("line {}: {key} = {value}: {reason}", lineno + 1));
            }
        }
        if let Err(Error::ConfigList(validation)) = config.validate() {
            errors.extend(validation);
        }
        if errors.is_empty() {
            Ok(config)
        } else {
            Err(Error::ConfigList(errors))
        }
    }

    /// Checks ranges, collecting every violation.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            errors.push(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if !(self.adagrad_eps.is_finite() && self.adagrad_eps > 0.0) {
            errors.push(format!("adagrad_eps must be positive, got {}", self.adagrad_eps));
        }
        if self.batch_size == 0 {
            errors.push("batch_size must be at least 1".to_string());
        }
        if self.max_epochs == 0 {
            errors.push("max_epochs must be at least 1".to_string());
        }
        if self.folds < 2 {
            errors.push(format!("folds must be at least 2, got {}", self.folds));
        }
        if self.runs == 0 {
            errors.push("runs must be at least 1".to_string());
        }
        if self.embed_dim == 0 {
            errors.push("embed_dim must be positive".to_string());
        }
        if self.widths.is_empty() || self.widths.iter().any(|&w| w == 0) {
            errors.push(format!("widths must be nonempty and positive, got {:?}", self.widths));
        }
        if self.filters_per_width == 0 {
            errors.push("filters_per_width must be positive".to_string());
        }
        if self.term_width == 0 || self.term_filters == 0 {
            errors.push("term_width and term_filters must be positive".to_string());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigList(errors))
        }
    }

    /// Model dimensions implied by this config and a built vocabulary.
    /// An aspect-free vocabulary (term-level data) still gets one aspect
    /// slot so the dimensions always validate.
    pub fn model_config(&self, vocab: &Vocab) -> ModelConfig {
        ModelConfig {
            vocab_size: vocab.token_count(),
            embed_dim: self.embed_dim,
            widths: self.widths.clone(),
            filters_per_width: self.filters_per_width,
            class_count: vocab.class_count(),
            aspect_count: vocab.aspect_count().max(1),
            term_width: self.term_width,
            term_filters: self.term_filters,
        }
    }
}
