//! `grad-check`: analytic backward pass vs central finite differences on a
//! small model, one line per parameter tensor.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{check_gradients, AspectInput, Model, ModelConfig, ModelVariant, Task};

pub const GRAD_CHECK_EPS: f64 = 1e-5;
pub const GRAD_CHECK_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimPreset {
    /// The reference configuration: 8-dim embeddings, 7-token sentence,
    /// widths [2, 3], 4 filters each, 3 classes.
    Small,
    /// Cut-down dimensions for quick smoke runs.
    Micro,
}

impl DimPreset {
    pub fn parse(s: &str) -> Result<DimPreset> {
        match s {
            "small" => Ok(DimPreset::Small),
            "micro" => Ok(DimPreset::Micro),
            other => Err(Error::Config(format!(
                "unknown dims preset '{other}' (small, micro)"
            ))),
        }
    }

    pub fn config(self) -> (ModelConfig, usize) {
        match self {
            DimPreset::Small => (
                ModelConfig {
                    vocab_size: 14,
                    embed_dim: 8,
                    widths: vec![2, 3],
                    filters_per_width: 4,
                    class_count: 3,
                    aspect_count: 4,
                    term_width: 2,
                    term_filters: 4,
                },
                7,
            ),
            DimPreset::Micro => (
                ModelConfig {
                    vocab_size: 8,
                    embed_dim: 3,
                    widths: vec![2],
                    filters_per_width: 2,
                    class_count: 3,
                    aspect_count: 2,
                    term_width: 2,
                    term_filters: 2,
                },
                4,
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct GradCheckArgs {
    pub variant: ModelVariant,
    pub dims: DimPreset,
    pub seed: u64,
    /// Tensor name whose gradient gets deliberately corrupted before the
    /// comparison; the named group must then fail. Debug aid for the
    /// checker itself.
    pub corrupt: Option<String>,
}

pub fn cmd_grad_check(args: &GradCheckArgs) -> Result<()> {
    let (config, sentence_len) = args.dims.config();
    let model = Model::new(args.variant, &config, args.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(1));
    let tokens: Vec<usize> = (0..sentence_len)
        .map(|_| rng.random_range(2..config.vocab_size))
        .collect();
    let term: Vec<usize> = (0..config.term_width)
        .map(|_| rng.random_range(2..config.vocab_size))
        .collect();
    let aspect = if args.variant.aspect_aware() {
        Some(match args.variant.task {
            Task::Acsa => AspectInput::Category(rng.random_range(0..config.aspect_count)),
            Task::Atsa => AspectInput::Term(&term),
        })
    } else {
        None
    };
    let target = rng.random_range(0..config.class_count);

    if let Some(name) = &args.corrupt {
        let names: Vec<String> = model.params.tensors().iter().map(|t| t.name.clone()).collect();
        if !names.iter().any(|n| n == name) {
            return Err(Error::Config(format!(
                "--corrupt '{name}' names no tensor of {}; known tensors: {}",
                args.variant.name(),
                names.join(", ")
            )));
        }
    }

    let reports = check_gradients(
        &model,
        &tokens,
        aspect,
        target,
        GRAD_CHECK_EPS,
        GRAD_CHECK_TOL,
        args.corrupt.as_deref(),
    )?;

    println!(
        "{} | seed {} | sentence {:?} | target class {target}",
        args.variant.name(),
        args.seed,
        tokens
    );
    println!(
        "{:<24} {:>8} {:>9} {:>13}  status",
        "tensor", "checked", "excluded", "max rel err"
    );
    let mut failed = Vec::new();
    for group in &reports {
        let ok = group.passed();
        println!(
            "{:<24} {:>8} {:>9} {:>13.3e}  {}",
            group.name,
            group.report.checked,
            group.report.excluded,
            group.report.max_rel_err,
            if ok { "pass" } else { "FAIL" }
        );
        if !ok {
            failed.push(group.name.clone());
        }
    }
    if let Some(name) = &args.corrupt {
        println!("(gradient for '{name}' was deliberately corrupted)");
    }
    if failed.is_empty() {
        println!(
            "all {} tensors within {GRAD_CHECK_TOL:.0e} of finite differences",
            reports.len()
        );
        Ok(())
    } else {
        Err(Error::GradCheck(format!(
            "{} of {} tensors exceeded {GRAD_CHECK_TOL:.0e}: {}",
            failed.len(),
            reports.len(),
            failed.join(", ")
        )))
    }
}
