//! The data pipeline on the bundled annotation fixtures: parsing both XML
//! layouts, building the merged eight-category corpus, extracting the
//! hard subset, building a vocabulary, and loading pretrained embeddings.
//!
//!     cargo run --example prepare_fixtures

use std::path::Path;

use gcae::data::{
    hard_subset, load_embeddings, parse_semeval_file, restaurant_large, split_stats, Vocab,
};
use gcae::model::Task;

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn main() -> gcae::Result<()> {
    // Category annotations, flat layout.
    let train = parse_semeval_file(&fixture("acsa_train.xml"), Task::Acsa)?;
    println!(
        "acsa_train.xml ({:?} layout): {} instances, {} skipped",
        train.layout,
        train.instances.len(),
        train.skipped.len()
    );
    let stats = split_stats(&train.instances);
    println!("  per class: {:?}", stats.by_class);

    // Term annotations with offset validation; two records are skipped on
    // purpose (a NULL target and a span that does not match its text).
    let terms = parse_semeval_file(&fixture("atsa_train.xml"), Task::Atsa)?;
    println!(
        "atsa_train.xml: {} instances, {} skipped",
        terms.instances.len(),
        terms.skipped.len()
    );
    for skip in &terms.skipped {
        println!("  skipped {}: {}", skip.sentence_id, skip.reason);
    }

    // Three files spanning both layouts merge into one corpus with eight
    // aspect categories, majority-vote opinion collapsing, and
    // duplicate removal.
    let parts = vec![
        parse_semeval_file(&fixture("merge_2014.xml"), Task::Acsa)?,
        parse_semeval_file(&fixture("merge_2015.xml"), Task::Acsa)?,
        parse_semeval_file(&fixture("merge_2016.xml"), Task::Acsa)?,
    ];
    let (merged, merge_stats) = restaurant_large(&parts)?;
    println!(
        "merged corpus: {} -> {} instances ({} duplicates removed)",
        merge_stats.input_instances,
        merge_stats.output_instances,
        merge_stats.duplicates_removed
    );
    for inst in &merged {
        println!("  [{}] {} -> {:?}", inst.sentence_id, inst.aspect, inst.polarity);
    }

    // The hard subset: only sentences whose aspects disagree in polarity.
    let hard = hard_subset(&train.instances);
    println!(
        "hard subset of acsa_train: {} of {} instances",
        hard.len(),
        train.instances.len()
    );

    // Vocabulary + embedding lookup; tokens absent from the embedding file
    // get seeded random vectors, malformed lines are counted and skipped.
    let vocab = Vocab::build(&train.instances, Task::Acsa);
    let (table, emb_stats) = load_embeddings(&fixture("embeddings_8d.txt"), &vocab, 8, 7)?;
    println!(
        "vocab: {} tokens, {} aspects; embeddings {}x{}: {} found, {} random, {} lines skipped",
        vocab.token_count(),
        vocab.aspect_count(),
        table.rows(),
        table.cols(),
        emb_stats.found,
        emb_stats.missing,
        emb_stats.skipped_lines
    );
    Ok(())
}
