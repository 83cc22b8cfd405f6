//! Verifies the hand-written backward pass of every model variant against
//! central finite differences, tensor by tensor.
//!
//! Coordinates whose perturbation crosses a relu kink or flips a pooling
//! argmax are excluded (the loss is not differentiable there); the
//! excluded count is reported so a silently-degenerate check would be
//! visible.
//!
//!     cargo run --release --example grad_check

use gcae::model::{
    check_gradients, AspectInput, GateKind, Model, ModelConfig, ModelVariant,
};

fn main() -> gcae::Result<()> {
    let config = ModelConfig {
        vocab_size: 14,
        embed_dim: 8,
        widths: vec![2, 3],
        filters_per_width: 4,
        class_count: 3,
        aspect_count: 4,
        term_width: 2,
        term_filters: 4,
    };
    let tokens = [2usize, 5, 9, 3, 12, 7, 4];
    let term = [6usize, 11];
    let cases: Vec<(ModelVariant, Option<AspectInput<'_>>)> = vec![
        (ModelVariant::gcae_acsa(GateKind::Gtru), Some(AspectInput::Category(1))),
        (ModelVariant::gcae_acsa(GateKind::Gtu), Some(AspectInput::Category(2))),
        (ModelVariant::gcae_acsa(GateKind::Glu), Some(AspectInput::Category(0))),
        (ModelVariant::gcae_atsa(GateKind::Gtru), Some(AspectInput::Term(&term))),
        (ModelVariant::cnn(), None),
        (ModelVariant::gcn(GateKind::Gtru), None),
    ];

    let mut all_ok = true;
    for (variant, aspect) in cases {
        let model = Model::new(variant, &config, 23)?;
        let reports = check_gradients(&model, &tokens, aspect, 1, 1e-5, 1e-4, None)?;
        let worst = reports
            .iter()
            .map(|r| r.report.max_rel_err)
            .fold(0.0f64, f64::max);
        let checked: usize = reports.iter().map(|r| r.report.checked).sum();
        let excluded: usize = reports.iter().map(|r| r.report.excluded).sum();
        let ok = reports.iter().all(|r| r.passed());
        all_ok &= ok;
        println!(
            "{:<20} {} tensors, {checked} coords checked, {excluded} excluded, worst {worst:.2e} -> {}",
            format!("{} ({})", variant.name(), variant.gate.name()),
            reports.len(),
            if ok { "pass" } else { "FAIL" }
        );
    }
    assert!(all_ok, "a gradient check failed");
    println!("all variants match finite differences within 1e-4");
    Ok(())
}
