//! The full evaluation protocol: repeated (select, retrain, test) cycles.
//!
//! Each run r derives its seed as `config.seed + r`, picks a stopping epoch
//! by cross-validation on the training split, retrains a fresh model on the
//! whole split for that many epochs, and evaluates on the held-out test
//! split (and optionally its hard subset). The report carries per-run
//! records plus mean and sample standard deviation across runs.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::EncodedInstance;
use crate::error::Result;
use crate::model::{Model, ModelConfig, ModelVariant};
use crate::numeric::Matrix;
use crate::train::{cross_validate, evaluate, train_epochs, EpochStats, ExecMode, TrainConfig};

/// Report format tag; bump alongside breaking layout changes.
pub const REPORT_VERSION: &str = concat!("gcae-v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_index: usize,
    pub seed: u64,
    pub best_epoch: usize,
    pub test_accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hard_accuracy: Option<f64>,
    pub history: Vec<EpochStats>,
    /// Wall-clock seconds for this run (volatile; excluded from the
    /// deterministic view).
    pub train_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub version: String,
    pub variant: String,
    pub exec_mode: String,
    pub train_config: TrainConfig,
    pub model_config: ModelConfig,
    pub runs: Vec<RunRecord>,
    pub test_accuracy_mean: f64,
    pub test_accuracy_std: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hard_accuracy_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hard_accuracy_std: Option<f64>,
    pub wall_clock_seconds: f64,
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Runs the whole protocol; returns the report and the retrained model of
/// the final run (for checkpointing).
#[allow(clippy::too_many_arguments)]
pub fn run_protocol(
    variant: ModelVariant,
    model_config: &ModelConfig,
    embeddings: Option<&Matrix>,
    train_data: &[EncodedInstance],
    test_data: &[EncodedInstance],
    hard_data: Option<&[EncodedInstance]>,
    config: &TrainConfig,
    exec: ExecMode,
) -> Result<(ProtocolReport, Model)> {
    let started = Instant::now();
    let mut runs = Vec::with_capacity(config.runs);
    let mut last_model = None;

    for run_index in 0..config.runs {
        let run_started = Instant::now();
        let seed = config.seed.wrapping_add(run_index as u64);
        let cv = cross_validate(variant, model_config, embeddings, train_data, config, seed, exec)?;

        let mut model = Model::new(variant, model_config, seed)?;
        if let Some(table) = embeddings {
            model.params.set_word_embeddings(table.clone())?;
        }
        let history = train_epochs(
            &mut model,
            train_data,
            None,
            config,
            cv.best_epoch,
            seed.wrapping_add(1),
            exec,
        )?;

        let test_accuracy = evaluate(&model, test_data)?;
        let hard_accuracy = match hard_data {
            Some(hard) => Some(evaluate(&model, hard)?),
            None => None,
        };
        runs.push(RunRecord {
            run_index,
            seed,
            best_epoch: cv.best_epoch,
            test_accuracy,
            hard_accuracy,
            history,
            train_seconds: run_started.elapsed().as_secs_f64(),
        });
        last_model = Some(model);
    }

    let test_accs: Vec<f64> = runs.iter().map(|r| r.test_accuracy).collect();
    let (test_accuracy_mean, test_accuracy_std) = mean_std(&test_accs);
    let (hard_accuracy_mean, hard_accuracy_std) = if hard_data.is_some() {
        let hard_accs: Vec<f64> = runs.iter().filter_map(|r| r.hard_accuracy).collect();
        let (m, s) = mean_std(&hard_accs);
        (Some(m), Some(s))
    } else {
        (None, None)
    };

    let report = ProtocolReport {
        version: REPORT_VERSION.to_string(),
        variant: variant.name().to_string(),
        exec_mode: exec.name().to_string(),
        train_config: config.clone(),
        model_config: model_config.clone(),
        runs,
        test_accuracy_mean,
        test_accuracy_std,
        hard_accuracy_mean,
        hard_accuracy_std,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((report, last_model.expect("runs >= 1 is validated")))
}

/// The report with volatile timing fields nulled out: two runs of the same
/// serialized-mode training must agree on this view exactly.
pub fn deterministic_view(report: &ProtocolReport) -> serde_json::Value {
    let mut value = serde_json::to_value(report).expect("report serializes");
    if let Some(obj) = value.as_object_mut() {
        obj.remove("wall_clock_seconds");
        if let Some(runs) = obj.get_mut("runs").and_then(|r| r.as_array_mut()) {
            for run in runs {
                if let Some(run_obj) = run.as_object_mut() {
                    run_obj.remove("train_seconds");
                }
            }
        }
    }
    value
}

/// Per-epoch training history as CSV (empty validation column when the
/// epoch had no validation split).
pub fn history_csv(history: &[EpochStats]) -> String {
    let mut out = String::from("epoch,mean_loss,val_accuracy\n");
    for stats in history {
        let val = stats
            .val_accuracy
            .map(|v| format!("{v}"))
            .unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", stats.epoch, stats.mean_loss, val));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{encode_instances, hard_subset, synthetic, Vocab};
    use crate::model::{GateKind, Task};

    fn setup() -> (
        Vec<EncodedInstance>,
        Vec<EncodedInstance>,
        TrainConfig,
        ModelConfig,
    ) {
        let (train, test) = synthetic::splits(77, 30, 8);
        let vocab = Vocab::build(&train, Task::Acsa);
        let mut config = TrainConfig::default();
        config.embed_dim = 8;
        config.widths = vec![2, 3];
        config.filters_per_width = 6;
        config.batch_size = 16;
        config.max_epochs = 2;
        config.folds = 3;
        config.runs = 2;
        let model_config = config.model_config(&vocab);
        let min_len = model_config.min_sentence_len();
        let hard = hard_subset(&test);
        assert_eq!(hard, test); // synthetic sentences are all hard
        (
            encode_instances(&train, &vocab, Task::Acsa, min_len).unwrap(),
            encode_instances(&test, &vocab, Task::Acsa, min_len).unwrap(),
            config,
            model_config,
        )
    }

    #[test]
    fn report_carries_per_run_records_and_aggregates() {
        let (train, test, config, model_config) = setup();
        let (report, model) = run_protocol(
            ModelVariant::gcae_acsa(GateKind::Gtru),
            &model_config,
            None,
            &train,
            &test,
            Some(&test),
            &config,
            ExecMode::Serialized,
        )
        .unwrap();
        assert_eq!(report.runs.len(), 2);
        assert_eq!(report.runs[0].seed, config.seed);
        assert_eq!(report.runs[1].seed, config.seed + 1);
        for run in &report.runs {
            assert!(run.best_epoch >= 1 && run.best_epoch <= config.max_epochs);
            assert_eq!(run.history.len(), run.best_epoch);
            assert!((0.0..=1.0).contains(&run.test_accuracy));
            assert!((0.0..=1.0).contains(&run.hard_accuracy.unwrap()));
        }
        assert!(report.test_accuracy_std >= 0.0);
        assert!(report.hard_accuracy_mean.is_some());
        assert_eq!(report.version, REPORT_VERSION);
        assert!(model.params.is_finite());
    }

    #[test]
    fn deterministic_view_is_reproducible_and_timing_free() {
        let (train, test, config, model_config) = setup();
        let run = || {
            let (report, _) = run_protocol(
                ModelVariant::gcae_acsa(GateKind::Gtru),
                &model_config,
                None,
                &train,
                &test,
                None,
                &config,
                ExecMode::Serialized,
            )
            .unwrap();
            report
        };
        let a = run();
        let b = run();
        assert_eq!(deterministic_view(&a), deterministic_view(&b));
        let text = serde_json::to_string(&deterministic_view(&a)).unwrap();
        assert!(!text.contains("seconds"), "volatile field leaked: {text}");
    }

    #[test]
    fn mean_std_uses_sample_variance() {
        let (m, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert!((m - 5.0).abs() < 1e-12);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        let (m1, s1) = mean_std(&[0.8]);
        assert_eq!((m1, s1), (0.8, 0.0));
    }

    #[test]
    fn history_csv_layout() {
        let history = vec![
            EpochStats {
                epoch: 1,
                mean_loss: 0.75,
                val_accuracy: Some(0.5),
            },
            EpochStats {
                epoch: 2,
                mean_loss: 0.5,
                val_accuracy: None,
            },
        ];
        let csv = history_csv(&history);
        assert_eq!(csv, "epoch,mean_loss,val_accuracy\n1,0.75,0.5\n2,0.5,\n");
    }
}
