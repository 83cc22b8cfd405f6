//! `train`: the full protocol over a prepared data directory, leaving a
//! checkpoint, a report, per-run histories, and a manifest behind.

use std::path::{Path, PathBuf};

use crate::data::{read_jsonl, load_embeddings, EncodedInstance, Vocab};
use crate::data::encode_instances;
use crate::error::{Error, Result};
use crate::model::{save_checkpoint, ModelVariant, Task};
use crate::numeric::Matrix;
use crate::train::{
    deterministic_view, history_csv, run_protocol, ExecMode, TrainConfig,
};

use super::manifest::{ensure_dir, write_artifact, RunManifest};

#[derive(Debug, Clone)]
pub struct TrainArgs {
    pub variant: ModelVariant,
    pub config: Option<PathBuf>,
    /// `key=value` overrides applied on top of the config file.
    pub sets: Vec<String>,
    pub data: PathBuf,
    pub embeddings: Option<PathBuf>,
    pub exec: ExecMode,
    pub out: PathBuf,
}

/// Builds the effective config: file (or defaults), then overrides, then a
/// final validation so every problem is reported before any compute.
pub fn resolve_config(file: Option<&Path>, sets: &[String]) -> Result<TrainConfig> {
    let mut config = match file {
        Some(path) => TrainConfig::from_file(path)?,
        None => TrainConfig::default(),
    };
    for entry in sets {
        let (key, value) = entry.split_once('=').ok_or_else(|| {
            Error::Config(format!("--set needs key=value, got '{entry}'"))
        })?;
        config.set(key.trim(), value.trim())?;
    }
    config.validate()?;
    Ok(config)
}

pub struct LoadedData {
    pub vocab: Vocab,
    pub train: Vec<EncodedInstance>,
    pub test: Vec<EncodedInstance>,
    pub hard: Option<Vec<EncodedInstance>>,
    pub embeddings: Option<Matrix>,
}

/// Reads a prepared directory and encodes it for `variant`'s task,
/// recording every file it touched in the manifest.
pub fn load_data_dir(
    data: &Path,
    variant: ModelVariant,
    config: &TrainConfig,
    embeddings_path: Option<&Path>,
    min_len: Option<usize>,
    manifest: &mut RunManifest,
) -> Result<LoadedData> {
    let vocab_path = data.join("vocab.json");
    manifest.record_input(&vocab_path)?;
    let vocab = Vocab::load(&vocab_path)?;
    if variant.task == Task::Acsa && vocab.aspect_count() == 0 {
        return Err(Error::Data(format!(
            "{} holds no aspect categories; it was prepared for atsa, but {} needs acsa data",
            vocab_path.display(),
            variant.name()
        )));
    }

    let min_len = min_len.unwrap_or_else(|| config.model_config(&vocab).min_sentence_len());
    let mut read_split = |name: &str, required: bool| -> Result<Option<Vec<EncodedInstance>>> {
        let path = data.join(name);
        if !path.exists() {
            if required {
                return Err(Error::Data(format!(
                    "{} is missing; run prepare first",
                    path.display()
                )));
            }
            return Ok(None);
        }
        manifest.record_input(&path)?;
        let instances = read_jsonl(&path)?;
        if instances.is_empty() {
            return Ok(None);
        }
        Ok(Some(encode_instances(&instances, &vocab, variant.task, min_len)?))
    };
    let train = read_split("train.jsonl", true)?
        .ok_or_else(|| Error::Data("train.jsonl holds no instances".to_string()))?;
    let test = read_split("test.jsonl", true)?
        .ok_or_else(|| Error::Data("test.jsonl holds no instances".to_string()))?;
    let hard = read_split("hard.jsonl", false)?;

    let embeddings = match embeddings_path {
        Some(path) => {
            manifest.record_input(path)?;
            let (table, stats) = load_embeddings(path, &vocab, config.embed_dim, config.seed)?;
            println!(
                "embeddings: {} found, {} randomly initialized, {} malformed lines skipped",
                stats.found, stats.missing, stats.skipped_lines
            );
            Some(table)
        }
        None => None,
    };
    Ok(LoadedData { vocab, train, test, hard, embeddings })
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let config = resolve_config(args.config.as_deref(), &args.sets)?;
    ensure_dir(&args.out)?;
    let snapshot = serde_json::json!({
        "variant": args.variant.name(),
        "gate": args.variant.gate.name(),
        "exec": args.exec.name(),
        "data": args.data.display().to_string(),
        "embeddings": args.embeddings.as_ref().map(|p| p.display().to_string()),
        "train_config": config,
    });
    let mut manifest = RunManifest::new("train", snapshot);

    let loaded = load_data_dir(
        &args.data,
        args.variant,
        &config,
        args.embeddings.as_deref(),
        None,
        &mut manifest,
    )?;
    let model_config = config.model_config(&loaded.vocab);

    let (report, model) = run_protocol(
        args.variant,
        &model_config,
        loaded.embeddings.as_ref(),
        &loaded.train,
        &loaded.test,
        loaded.hard.as_deref(),
        &config,
        args.exec,
    )?;

    let full = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::Data(format!("serializing report: {e}")))?;
    write_artifact(&mut manifest, &args.out, "report.json", &full)?;
    let stable = serde_json::to_string_pretty(&deterministic_view(&report))
        .map_err(|e| Error::Data(format!("serializing report view: {e}")))?;
    write_artifact(&mut manifest, &args.out, "report.stable.json", &stable)?;
    for run in &report.runs {
        write_artifact(
            &mut manifest,
            &args.out,
            &format!("history_run{}.csv", run.run_index),
            &history_csv(&run.history),
        )?;
    }
    save_checkpoint(&model, &loaded.vocab.hash(), &args.out.join("model.ckpt"))?;
    manifest.record_output("model.ckpt");
    manifest.write(&args.out)?;

    println!(
        "{} ({} mode): test accuracy {:.4} +/- {:.4} over {} runs",
        report.variant,
        report.exec_mode,
        report.test_accuracy_mean,
        report.test_accuracy_std,
        report.runs.len()
    );
    if let (Some(mean), Some(std)) = (report.hard_accuracy_mean, report.hard_accuracy_std) {
        println!("hard subset accuracy {mean:.4} +/- {std:.4}");
    }
    for run in &report.runs {
        println!(
            "run {}: best epoch {}, test accuracy {:.4}",
            run.run_index, run.best_epoch, run.test_accuracy
        );
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
