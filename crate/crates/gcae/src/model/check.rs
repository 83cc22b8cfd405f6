//! Whole-model gradient verification.
//!
//! Runs the central-difference checker tensor by tensor against the analytic
//! backward pass, using the forward pass's discrete signature to exclude
//! coordinates whose perturbation crosses a relu kink or flips a pooling
//! argmax (central differences are meaningless across those).

use crate::error::Result;
use crate::model::forward::loss_and_signature;
use crate::model::{AspectInput, Model};
use crate::numeric::{grad_check_guarded, GradCheckReport};

/// Check outcome for one named parameter tensor.
#[derive(Debug, Clone)]
pub struct GroupReport {
    pub name: String,
    pub report: GradCheckReport,
}

impl GroupReport {
    pub fn passed(&self) -> bool {
        self.report.passed()
    }
}

/// Compares analytic gradients against central differences for every
/// parameter tensor of `model` on a single instance.
///
/// `corrupt` names a tensor whose analytic gradient is deliberately skewed
/// before the comparison; the checker must then flag that tensor. This
/// exercises the detection path end to end (a checker that cannot fail is
/// not evidence of anything).
pub fn check_gradients(
    model: &Model,
    tokens: &[usize],
    aspect: Option<AspectInput<'_>>,
    target: usize,
    eps: f64,
    tol: f64,
    corrupt: Option<&str>,
) -> Result<Vec<GroupReport>> {
    let pass = model.forward(tokens, aspect)?;
    let mut analytic = model.params.zeros_like();
    model.backward(&pass.cache, target, &mut analytic)?;

    let names: Vec<String> = model.params.tensors().iter().map(|t| t.name.clone()).collect();
    let mut work = model.clone();
    let mut reports = Vec::with_capacity(names.len());

    for (gi, name) in names.iter().enumerate() {
        let mut buf: Vec<f64> = model.params.tensors()[gi].data.to_vec();
        let mut analytic_group: Vec<f64> = analytic.tensors()[gi].data.to_vec();
        if corrupt == Some(name.as_str()) {
            for v in &mut analytic_group {
                *v = *v * 1.5 + 0.05;
            }
        }

        let report = grad_check_guarded(
            |p: &[f64]| {
                work.params.tensors_mut()[gi].data.copy_from_slice(p);
                loss_and_signature(&work, tokens, aspect, target)
                    .expect("evaluating a shape-compatible perturbation")
            },
            &mut buf,
            &analytic_group,
            eps,
            tol,
        )?;
        // Leave the scratch model exactly at the original parameters.
        work.params.tensors_mut()[gi].data.copy_from_slice(&buf);
        reports.push(GroupReport {
            name: name.clone(),
            report,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GateKind, ModelConfig, ModelVariant};

    fn tiny_config() -> ModelConfig {
        ModelConfig {
            vocab_size: 12,
            embed_dim: 4,
            widths: vec![2, 3],
            filters_per_width: 3,
            class_count: 3,
            aspect_count: 4,
            term_width: 2,
            term_filters: 5,
        }
    }

    #[test]
    fn analytic_gradients_match_central_differences_for_all_variants() {
        let cases: Vec<(ModelVariant, Option<AspectInput<'static>>)> = vec![
            (
                ModelVariant::gcae_acsa(GateKind::Gtru),
                Some(AspectInput::Category(1)),
            ),
            (
                ModelVariant::gcae_acsa(GateKind::Gtu),
                Some(AspectInput::Category(2)),
            ),
            (
                ModelVariant::gcae_acsa(GateKind::Glu),
                Some(AspectInput::Category(0)),
            ),
            (
                ModelVariant::gcae_atsa(GateKind::Gtru),
                Some(AspectInput::Term(&[4, 5])),
            ),
            (ModelVariant::cnn(), None),
            (ModelVariant::gcn(GateKind::Gtru), None),
        ];
        for (variant, aspect) in cases {
            let model = Model::new(variant, &tiny_config(), 23).unwrap();
            let reports =
                check_gradients(&model, &[2, 3, 4, 5, 6], aspect, 1, 1e-5, 1e-4, None).unwrap();
            assert!(!reports.is_empty());
            for r in &reports {
                assert!(
                    r.passed(),
                    "{}: tensor {} max_rel_err {} (checked {}, excluded {})",
                    variant.name(),
                    r.name,
                    r.report.max_rel_err,
                    r.report.checked,
                    r.report.excluded
                );
                // The guard may exclude kink crossings but must not exclude
                // whole tensors.
                assert!(r.report.checked > 0, "{}: nothing checked", r.name);
            }
        }
    }

    #[test]
    fn corrupted_tensor_is_flagged() {
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Gtru), &tiny_config(), 23).unwrap();
        let reports = check_gradients(
            &model,
            &[2, 3, 4, 5, 6],
            Some(AspectInput::Category(1)),
            1,
            1e-5,
            1e-4,
            Some("output.weights"),
        )
        .unwrap();
        let corrupted = reports.iter().find(|r| r.name == "output.weights").unwrap();
        assert!(!corrupted.passed(), "corruption went undetected");
        for r in reports.iter().filter(|r| r.name != "output.weights") {
            assert!(r.passed(), "{} should still pass", r.name);
        }
    }

    #[test]
    fn scratch_model_state_does_not_leak_between_groups() {
        // Two consecutive runs must produce identical reports; a stale
        // perturbation left in the scratch model would differ.
        let model = Model::new(ModelVariant::gcae_acsa(GateKind::Glu), &tiny_config(), 4).unwrap();
        let run = || {
            check_gradients(
                &model,
                &[2, 3, 4, 5],
                Some(AspectInput::Category(3)),
                0,
                1e-5,
                1e-4,
                None,
            )
            .unwrap()
            .iter()
            .map(|r| (r.name.clone(), r.report.max_rel_err))
            .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
