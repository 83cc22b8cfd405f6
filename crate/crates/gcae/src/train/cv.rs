//! Stopping-epoch selection by k-fold cross-validation.
//!
//! The training split is cut into k contiguous folds (sizes differ by at
//! most one). Each fold serves once as the validation set while a fresh
//! model trains on the rest; the chosen epoch maximizes the mean validation
//! accuracy across folds, with ties going to the smaller epoch (earlier
//! stop, less overfitting for the same evidence).

use log::warn;

use crate::data::EncodedInstance;
use crate::error::{Error, Result};
use crate::model::{Model, ModelConfig, ModelVariant};
use crate::numeric::Matrix;
use crate::train::{train_epochs, EpochStats, ExecMode, TrainConfig};

#[derive(Debug, Clone)]
pub struct CvOutcome {
    /// 1-based epoch count to retrain for.
    pub best_epoch: usize,
    /// Mean validation accuracy per epoch (index 0 = epoch 1).
    pub mean_val_accuracy: Vec<f64>,
    pub fold_histories: Vec<Vec<EpochStats>>,
    /// Folds skipped because their validation slice was empty.
    pub skipped_folds: usize,
}

/// Contiguous fold boundaries: `n` items into `k` ranges whose sizes differ
/// by at most one (the first `n % k` folds take the extra item).
pub fn fold_ranges(n: usize, k: usize) -> Vec<(usize, usize)> {
    let base = n / k;
    let rem = n % k;
    let mut ranges = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < rem);
        ranges.push((start, start + size));
        start += size;
    }
    ranges
}

/// Smallest epoch index (1-based) achieving the maximum mean accuracy.
pub(crate) fn select_best(mean_val_accuracy: &[f64]) -> usize {
    let mut best = 0;
    for (i, &acc) in mean_val_accuracy.iter().enumerate() {
        if acc > mean_val_accuracy[best] {
            best = i;
        }
    }
    best + 1
}

pub fn cross_validate(
    variant: ModelVariant,
    model_config: &ModelConfig,
    embeddings: Option<&Matrix>,
    data: &[EncodedInstance],
    config: &TrainConfig,
    run_seed: u64,
    exec: ExecMode,
) -> Result<CvOutcome> {
    if data.is_empty() {
        return Err(Error::Data(
            "cannot cross-validate on an empty split".to_string(),
        ));
    }
    let ranges = fold_ranges(data.len(), config.folds);
    let mut fold_histories = Vec::new();
    let mut skipped_folds = 0usize;

    for (fold, &(start, end)) in ranges.iter().enumerate() {
        if start == end {
            warn!(
                "fold {fold} has no validation instances ({} instances across {} folds); skipping it",
                data.len(),
                config.folds
            );
            skipped_folds += 1;
            continue;
        }
        let val = &data[start..end];
        let mut train: Vec<EncodedInstance> = Vec::with_capacity(data.len() - val.len());
        train.extend_from_slice(&data[..start]);
        train.extend_from_slice(&data[end..]);
        if train.is_empty() {
            warn!("fold {fold} has no training instances; skipping it");
            skipped_folds += 1;
            continue;
        }

        let mut model = Model::new(variant, model_config, run_seed.wrapping_add(100 + fold as u64))?;
        if let Some(table) = embeddings {
            model.params.set_word_embeddings(table.clone())?;
        }
        let history = train_epochs(
            &mut model,
            &train,
            Some(val),
            config,
            config.max_epochs,
            run_seed.wrapping_add(200 + fold as u64),
            exec,
        )?;
        fold_histories.push(history);
    }

    if fold_histories.is_empty() {
        return Err(Error::Data(format!(
            "all {} folds were degenerate for {} instances",
            config.folds,
            data.len()
        )));
    }

    let mut mean_val_accuracy = vec![0.0; config.max_epochs];
    for history in &fold_histories {
        for stats in history {
            mean_val_accuracy[stats.epoch - 1] +=
                stats.val_accuracy.expect("folds always validate");
        }
    }
    for acc in &mut mean_val_accuracy {
        *acc /= fold_histories.len() as f64;
    }

    Ok(CvOutcome {
        best_epoch: select_best(&mean_val_accuracy),
        mean_val_accuracy,
        fold_histories,
        skipped_folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{encode_instances, synthetic, Vocab};
    use crate::model::{GateKind, Task};

    #[test]
    fn fold_ranges_cover_everything_evenly() {
        assert_eq!(fold_ranges(10, 5), [(0, 2), (2, 4), (4, 6), (6, 8), (8, 10)]);
        let ranges = fold_ranges(11, 5);
        assert_eq!(ranges[0], (0, 3));
        assert_eq!(ranges.last(), Some(&(9, 11)));
        let sizes: Vec<usize> = ranges.iter().map(|(s, e)| e - s).collect();
        assert!(sizes.iter().all(|&s| s == 2 || s == 3));
        assert_eq!(sizes.iter().sum::<usize>(), 11);
        // Fewer items than folds: trailing folds are empty.
        let small = fold_ranges(3, 5);
        assert_eq!(small.iter().filter(|(s, e)| s == e).count(), 2);
    }

    #[test]
    fn ties_pick_the_smaller_epoch() {
        assert_eq!(select_best(&[0.5, 0.7, 0.7, 0.6]), 2);
        assert_eq!(select_best(&[0.9]), 1);
        assert_eq!(select_best(&[0.3, 0.3, 0.3]), 1);
    }

    fn setup(sentences: usize) -> (Vec<EncodedInstance>, TrainConfig, ModelConfig) {
        let train = synthetic::generate(31, sentences);
        let vocab = Vocab::build(&train, Task::Acsa);
        let mut config = TrainConfig::default();
        config.embed_dim = 8;
        config.widths = vec![2, 3];
        config.filters_per_width = 6;
        config.batch_size = 16;
        config.max_epochs = 3;
        config.folds = 3;
        let model_config = config.model_config(&vocab);
        let encoded =
            encode_instances(&train, &vocab, Task::Acsa, model_config.min_sentence_len()).unwrap();
        (encoded, config, model_config)
    }

    #[test]
    fn cross_validation_selects_an_epoch_within_budget() {
        let (data, config, model_config) = setup(30);
        let outcome = cross_validate(
            ModelVariant::gcae_acsa(GateKind::Gtru),
            &model_config,
            None,
            &data,
            &config,
            5,
            ExecMode::Serialized,
        )
        .unwrap();
        assert!(outcome.best_epoch >= 1 && outcome.best_epoch <= config.max_epochs);
        assert_eq!(outcome.mean_val_accuracy.len(), config.max_epochs);
        assert_eq!(outcome.fold_histories.len(), config.folds);
        assert_eq!(outcome.skipped_folds, 0);
        for acc in &outcome.mean_val_accuracy {
            assert!((0.0..=1.0).contains(acc));
        }
    }

    #[test]
    fn tiny_splits_skip_empty_folds_instead_of_failing() {
        let (data, mut config, model_config) = setup(2);
        // 4 instances across 6 folds: at least two folds must be empty.
        config.folds = 6;
        let outcome = cross_validate(
            ModelVariant::gcae_acsa(GateKind::Gtru),
            &model_config,
            None,
            &data[..4],
            &config,
            5,
            ExecMode::Serialized,
        )
        .unwrap();
        assert_eq!(outcome.skipped_folds, 2);
        assert_eq!(outcome.fold_histories.len(), 4);
    }

    #[test]
    fn empty_data_is_an_error() {
        let (_, config, model_config) = setup(2);
        assert!(cross_validate(
            ModelVariant::gcae_acsa(GateKind::Gtru),
            &model_config,
            None,
            &[],
            &config,
            5,
            ExecMode::Serialized,
        )
        .is_err());
    }
}
