//! `bench`: wall-clock timing of training in single-thread and fan-out
//! modes over the same prepared data, plus a parallel-evaluation
//! consistency check. Output shape is pinned by `schemas/timing.schema.json`.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::EncodedInstance;
use crate::error::{Error, Result};
use crate::model::{Model, ModelVariant};
use crate::train::{evaluate, train_epochs_timed, ExecMode, REPORT_VERSION};

use super::manifest::{ensure_dir, write_artifact, RunManifest};
use super::train_cmd::{load_data_dir, resolve_config};

#[derive(Debug, Clone)]
pub struct BenchArgs {
    pub variant: ModelVariant,
    pub config: Option<PathBuf>,
    pub sets: Vec<String>,
    pub data: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeTiming {
    pub epoch_seconds: Vec<f64>,
    pub total_seconds: f64,
    pub final_accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingReport {
    pub version: String,
    pub variant: String,
    pub train_instances: usize,
    pub test_instances: usize,
    pub threads: usize,
    pub data_load_seconds: f64,
    pub serialized: ModeTiming,
    pub fanout: ModeTiming,
    /// Parallel per-instance evaluation agreed with serial evaluation on
    /// every prediction.
    pub parallel_eval_matches: bool,
}

fn predictions_serial(model: &Model, data: &[EncodedInstance]) -> Result<Vec<usize>> {
    data.iter()
        .map(|inst| {
            let aspect = model.variant.aspect_aware().then(|| inst.aspect_input());
            model.predict(&inst.tokens, aspect)
        })
        .collect()
}

fn predictions_parallel(model: &Model, data: &[EncodedInstance]) -> Result<Vec<usize>> {
    data.par_iter()
        .map(|inst| {
            let aspect = model.variant.aspect_aware().then(|| inst.aspect_input());
            model.predict(&inst.tokens, aspect)
        })
        .collect()
}

pub fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let config = resolve_config(args.config.as_deref(), &args.sets)?;
    ensure_dir(&args.out)?;
    let snapshot = serde_json::json!({
        "variant": args.variant.name(),
        "gate": args.variant.gate.name(),
        "data": args.data.display().to_string(),
        "train_config": config,
    });
    let mut manifest = RunManifest::new("bench", snapshot);

    let load_started = Instant::now();
    let loaded = load_data_dir(
        &args.data,
        args.variant,
        &config,
        args.embeddings.as_deref(),
        None,
        &mut manifest,
    )?;
    let data_load_seconds = load_started.elapsed().as_secs_f64();
    let model_config = config.model_config(&loaded.vocab);

    let run_mode = |exec: ExecMode| -> Result<(ModeTiming, Model)> {
        let mut model = Model::new(args.variant, &model_config, config.seed)?;
        if let Some(table) = &loaded.embeddings {
            model.params.set_word_embeddings(table.clone())?;
        }
        let total_started = Instant::now();
        let (_, epoch_seconds) = train_epochs_timed(
            &mut model,
            &loaded.train,
            None,
            &config,
            config.max_epochs,
            config.seed.wrapping_add(1),
            exec,
        )?;
        let total_seconds = total_started.elapsed().as_secs_f64();
        let final_accuracy = evaluate(&model, &loaded.test)?;
        Ok((
            ModeTiming {
                epoch_seconds,
                total_seconds,
                final_accuracy,
            },
            model,
        ))
    };

    let (serialized, model) = run_mode(ExecMode::Serialized)?;
    let (fanout, _) = run_mode(ExecMode::FanOut)?;
    let parallel_eval_matches =
        predictions_serial(&model, &loaded.test)? == predictions_parallel(&model, &loaded.test)?;

    let report = TimingReport {
        version: REPORT_VERSION.to_string(),
        variant: args.variant.name().to_string(),
        train_instances: loaded.train.len(),
        test_instances: loaded.test.len(),
        threads: rayon::current_num_threads(),
        data_load_seconds,
        serialized,
        fanout,
        parallel_eval_matches,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Data(format!("serializing timing report: {e}")))?;
    write_artifact(&mut manifest, &args.out, "timing.json", &json)?;
    manifest.write(&args.out)?;

    println!(
        "data load {:.3}s | {} epochs over {} instances",
        report.data_load_seconds,
        report.serialized.epoch_seconds.len(),
        report.train_instances
    );
    println!(
        "serialized: {:.3}s total, accuracy {:.4}",
        report.serialized.total_seconds, report.serialized.final_accuracy
    );
    println!(
        "fan-out ({} threads): {:.3}s total, accuracy {:.4}",
        report.threads, report.fanout.total_seconds, report.fanout.final_accuracy
    );
    println!(
        "parallel evaluation matches serial: {}",
        report.parallel_eval_matches
    );
    println!("wrote {}", args.out.display());
    Ok(())
}
