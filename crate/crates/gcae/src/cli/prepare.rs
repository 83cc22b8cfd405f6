//! `prepare`: XML annotation files in, JSON-lines splits + vocabulary out.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::data::{
    hard_subset, parse_semeval_file, restaurant_large, split_stats, write_jsonl, LabeledInstance,
    MergeStats, ParsedCorpus, SplitStats, Vocab, XmlLayout,
};
use crate::error::{Error, Result};
use crate::model::Task;

use super::manifest::{ensure_dir, write_artifact, RunManifest};

#[derive(Debug, Clone)]
pub struct PrepareArgs {
    pub task: Task,
    /// When set, every input file must use this layout; otherwise the
    /// layout is detected per file (merging mixes both).
    pub schema: Option<XmlLayout>,
    pub train: Vec<PathBuf>,
    pub test: Vec<PathBuf>,
    pub merge_large: bool,
    pub out: PathBuf,
    pub expect: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct SkipEntry {
    file: String,
    sentence_id: String,
    reason: String,
}

#[derive(Debug, Clone, Serialize)]
struct MergeSummary {
    train: MergeStats,
    test: MergeStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectRow {
    pub key: String,
    pub expected: usize,
    pub actual: usize,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize)]
struct PrepareStats {
    train: SplitStats,
    test: SplitStats,
    hard: SplitStats,
    vocab_tokens: usize,
    vocab_aspects: Vec<String>,
    vocab_classes: Vec<String>,
    skipped: Vec<SkipEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    merge: Option<MergeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expect: Option<Vec<ExpectRow>>,
}

fn parse_inputs(
    paths: &[PathBuf],
    task: Task,
    schema: Option<XmlLayout>,
    manifest: &mut RunManifest,
    skipped: &mut Vec<SkipEntry>,
) -> Result<Vec<ParsedCorpus>> {
    let mut parts = Vec::with_capacity(paths.len());
    for path in paths {
        manifest.record_input(path)?;
        let parsed = parse_semeval_file(path, task)?;
        if let Some(expected) = schema {
            if parsed.layout != expected {
                return Err(Error::Data(format!(
                    "{}: file uses the {:?} layout but --schema asked for {:?}",
                    path.display(),
                    parsed.layout,
                    expected
                )));
            }
        }
        for skip in &parsed.skipped {
            skipped.push(SkipEntry {
                file: path.display().to_string(),
                sentence_id: skip.sentence_id.clone(),
                reason: skip.reason.clone(),
            });
        }
        parts.push(parsed);
    }
    Ok(parts)
}

fn collect_split(
    parts: Vec<ParsedCorpus>,
    merge_large: bool,
) -> Result<(Vec<LabeledInstance>, Option<MergeStats>)> {
    if merge_large {
        let (instances, stats) = restaurant_large(&parts)?;
        Ok((instances, Some(stats)))
    } else {
        let instances = parts.into_iter().flat_map(|p| p.instances).collect();
        Ok((instances, None))
    }
}

/// Flattens split statistics into lookup keys for `--expect` files:
/// `train.instances`, `test.sentences`, `hard.positive`, and so on.
fn stat_keys(splits: &[(&str, &SplitStats)]) -> BTreeMap<String, usize> {
    let mut keys = BTreeMap::new();
    for (name, stats) in splits {
        keys.insert(format!("{name}.instances"), stats.instances);
        keys.insert(format!("{name}.sentences"), stats.sentences);
        for (class, count) in &stats.by_class {
            keys.insert(format!("{name}.{class}"), *count);
        }
    }
    keys
}

/// Reads an expectation file (`key = count` lines, `#` comments) and
/// compares against the computed statistics. Unknown keys are errors so
/// typos cannot silently "pass"; classes absent from the data compare
/// against zero.
fn compare_expectations(
    path: &Path,
    keys: &BTreeMap<String, usize>,
) -> Result<Vec<ExpectRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            message: format!("line {}: expected 'key = count', got '{raw}'", lineno + 1),
        })?;
        let key = key.trim();
        let expected: usize = value.trim().parse().map_err(|_| Error::Parse {
            path: path.display().to_string(),
            message: format!("line {}: '{}' is not a count", lineno + 1, value.trim()),
        })?;
        let (prefix, suffix) = key.split_once('.').unwrap_or((key, ""));
        let known_split = matches!(prefix, "train" | "test" | "hard");
        let actual = match keys.get(key) {
            Some(v) => *v,
            // a class name the data never produced still counts as zero
            None if known_split && crate::data::Polarity::parse(suffix).is_ok() => 0,
            None => {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    message: format!(
                        "line {}: unknown statistic '{key}' (known: {})",
                        lineno + 1,
                        keys.keys().cloned().collect::<Vec<_>>().join(", ")
                    ),
                })
            }
        };
        rows.push(ExpectRow {
            key: key.to_string(),
            expected,
            actual,
            matched: expected == actual,
        });
    }
    Ok(rows)
}

fn print_split(name: &str, stats: &SplitStats) {
    let classes: Vec<String> = stats
        .by_class
        .iter()
        .map(|(c, n)| format!("{c} {n}"))
        .collect();
    println!(
        "{name:>5}: {} instances over {} sentences ({})",
        stats.instances,
        stats.sentences,
        classes.join(", ")
    );
}

pub fn cmd_prepare(args: &PrepareArgs) -> Result<()> {
    if args.merge_large && args.task != Task::Acsa {
        return Err(Error::Config(
            "--merge-large builds a category-level corpus and needs --task acsa".to_string(),
        ));
    }
    if args.train.is_empty() || args.test.is_empty() {
        return Err(Error::Config(
            "need at least one --train and one --test input file".to_string(),
        ));
    }
    ensure_dir(&args.out)?;
    let config = serde_json::json!({
        "task": match args.task { Task::Acsa => "acsa", Task::Atsa => "atsa" },
        "schema": args.schema.map(|s| format!("{s:?}")),
        "merge_large": args.merge_large,
        "train": args.train.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "test": args.test.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    let mut manifest = RunManifest::new("prepare", config);
    let mut skipped = Vec::new();

    let train_parts = parse_inputs(&args.train, args.task, args.schema, &mut manifest, &mut skipped)?;
    let test_parts = parse_inputs(&args.test, args.task, args.schema, &mut manifest, &mut skipped)?;
    let (train, merge_train) = collect_split(train_parts, args.merge_large)?;
    let (test, merge_test) = collect_split(test_parts, args.merge_large)?;
    if train.is_empty() {
        return Err(Error::Data(
            "no usable training instances survived parsing".to_string(),
        ));
    }
    let hard = hard_subset(&test);
    let vocab = Vocab::build(&train, args.task);

    write_jsonl(&args.out.join("train.jsonl"), &train)?;
    manifest.record_output("train.jsonl");
    write_jsonl(&args.out.join("test.jsonl"), &test)?;
    manifest.record_output("test.jsonl");
    write_jsonl(&args.out.join("hard.jsonl"), &hard)?;
    manifest.record_output("hard.jsonl");
    vocab.save(&args.out.join("vocab.json"))?;
    manifest.record_output("vocab.json");

    let mut stats = PrepareStats {
        train: split_stats(&train),
        test: split_stats(&test),
        hard: split_stats(&hard),
        vocab_tokens: vocab.token_count(),
        vocab_aspects: vocab.aspects().to_vec(),
        vocab_classes: vocab.classes().iter().map(|c| c.as_str().to_string()).collect(),
        skipped,
        merge: match (merge_train, merge_test) {
            (Some(train), Some(test)) => Some(MergeSummary { train, test }),
            _ => None,
        },
        expect: None,
    };
    if let Some(expect_path) = &args.expect {
        manifest.record_input(expect_path)?;
        let keys = stat_keys(&[
            ("train", &stats.train),
            ("test", &stats.test),
            ("hard", &stats.hard),
        ]);
        stats.expect = Some(compare_expectations(expect_path, &keys)?);
    }

    let stats_json = serde_json::to_string_pretty(&stats)
        .map_err(|e| Error::Data(format!("serializing stats: {e}")))?;
    write_artifact(&mut manifest, &args.out, "stats.json", &stats_json)?;
    manifest.write(&args.out)?;

    print_split("train", &stats.train);
    print_split("test", &stats.test);
    print_split("hard", &stats.hard);
    println!(
        "vocab: {} tokens, {} aspects, classes [{}]",
        stats.vocab_tokens,
        stats.vocab_aspects.len(),
        stats.vocab_classes.join(", ")
    );
    if !stats.skipped.is_empty() {
        println!("skipped {} annotations (see stats.json)", stats.skipped.len());
    }
    if let Some(summary) = &stats.merge {
        println!(
            "merge: {} -> {} train instances ({} opinion groups collapsed, {} duplicates removed)",
            summary.train.input_instances,
            summary.train.output_instances,
            summary.train.collapsed_opinions,
            summary.train.duplicates_removed
        );
    }
    if let Some(rows) = &stats.expect {
        let mismatches = rows.iter().filter(|r| !r.matched).count();
        for row in rows {
            println!(
                "expect {}: {} vs {} -> {}",
                row.key,
                row.expected,
                row.actual,
                if row.matched { "MATCH" } else { "MISMATCH" }
            );
        }
        println!("expectations: {} checked, {mismatches} mismatched", rows.len());
    }
    println!("wrote {}", args.out.display());
    Ok(())
}
