//! Readers for the two aspect-annotation XML layouts in the wild.
//!
//! Flat layout: `<sentences><sentence><text/>` with `<aspectCategories>` /
//! `<aspectTerms>` children. Review layout: `<Reviews>` nesting sentences
//! inside reviews, annotations as `<Opinions><Opinion target=... category=...>`.
//! The root element tells them apart.
//!
//! A file that is not well-formed XML is a hard error. A sentence or
//! annotation that cannot be used (missing text, unknown polarity, offsets
//! that do not match the term, placeholder NULL targets) is recorded and
//! skipped so one bad record never discards a corpus.

use std::path::Path;

use roxmltree::{Document, Node};

use crate::data::instances::{LabeledInstance, Polarity};
use crate::data::tokenize::tokenize;
use crate::error::{Error, Result};
use crate::model::Task;

/// Which XML layout a file used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XmlLayout {
    /// `<sentences>` root with aspectCategories/aspectTerms annotations.
    Flat,
    /// `<Reviews>` root with Opinion annotations.
    Reviews,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipRecord {
    pub sentence_id: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ParsedCorpus {
    pub instances: Vec<LabeledInstance>,
    pub skipped: Vec<SkipRecord>,
    pub layout: XmlLayout,
}

pub fn parse_semeval_file(path: &Path, task: Task) -> Result<ParsedCorpus> {
    let xml = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_semeval_str(&xml, &path.display().to_string(), task)
}

pub fn parse_semeval_str(xml: &str, source_name: &str, task: Task) -> Result<ParsedCorpus> {
    let doc = Document::parse(xml).map_err(|e| Error::Parse {
        path: source_name.to_string(),
        message: e.to_string(),
    })?;
    let root = doc.root_element();
    let layout = match root.tag_name().name() {
        "sentences" => XmlLayout::Flat,
        "Reviews" => XmlLayout::Reviews,
        other => {
            return Err(Error::Parse {
                path: source_name.to_string(),
                message: format!("unexpected root element <{other}> (expected <sentences> or <Reviews>)"),
            })
        }
    };

    let mut out = ParsedCorpus {
        instances: Vec::new(),
        skipped: Vec::new(),
        layout,
    };
    let mut anon = 0usize;
    match layout {
        XmlLayout::Flat => {
            for sentence in children_named(root, "sentence") {
                parse_sentence(sentence, task, layout, &mut out, &mut anon);
            }
        }
        XmlLayout::Reviews => {
            for review in children_named(root, "Review") {
                for sentences in children_named(review, "sentences") {
                    for sentence in children_named(sentences, "sentence") {
                        parse_sentence(sentence, task, layout, &mut out, &mut anon);
                    }
                }
            }
        }
    }
    Ok(out)
}

fn children_named<'a, 'input>(
    node: Node<'a, 'input>,
    name: &'static str,
) -> impl Iterator<Item = Node<'a, 'input>> {
    node.children()
        .filter(move |n| n.is_element() && n.tag_name().name() == name)
}

fn parse_sentence(
    sentence: Node<'_, '_>,
    task: Task,
    layout: XmlLayout,
    out: &mut ParsedCorpus,
    anon: &mut usize,
) {
    let id = match sentence.attribute("id") {
        Some(id) => id.to_string(),
        None => {
            *anon += 1;
            format!("unnamed-{anon}")
        }
    };
    let text = children_named(sentence, "text")
        .next()
        .and_then(|t| t.text())
        .unwrap_or("")
        .to_string();
    if text.trim().is_empty() {
        out.skipped.push(SkipRecord {
            sentence_id: id,
            reason: "missing or empty <text>".to_string(),
        });
        return;
    }
    let tokens = tokenize(&text);

    match (task, layout) {
        (Task::Acsa, XmlLayout::Flat) => {
            for group in children_named(sentence, "aspectCategories") {
                for node in children_named(group, "aspectCategory") {
                    category_instance(node, "category", &id, &text, &tokens, out);
                }
            }
        }
        (Task::Acsa, XmlLayout::Reviews) => {
            for group in children_named(sentence, "Opinions") {
                for node in children_named(group, "Opinion") {
                    category_instance(node, "category", &id, &text, &tokens, out);
                }
            }
        }
        (Task::Atsa, XmlLayout::Flat) => {
            for group in children_named(sentence, "aspectTerms") {
                for node in children_named(group, "aspectTerm") {
                    term_instance(node, "term", &id, &text, &tokens, out);
                }
            }
        }
        (Task::Atsa, XmlLayout::Reviews) => {
            for group in children_named(sentence, "Opinions") {
                for node in children_named(group, "Opinion") {
                    term_instance(node, "target", &id, &text, &tokens, out);
                }
            }
        }
    }
}

fn category_instance(
    node: Node<'_, '_>,
    attr: &str,
    id: &str,
    text: &str,
    tokens: &[String],
    out: &mut ParsedCorpus,
) {
    let Some(category) = node.attribute(attr) else {
        out.skipped.push(SkipRecord {
            sentence_id: id.to_string(),
            reason: format!("annotation without a {attr} attribute"),
        });
        return;
    };
    match required_polarity(node) {
        Ok(polarity) => out.instances.push(LabeledInstance {
            sentence_id: id.to_string(),
            text: text.to_string(),
            tokens: tokens.to_vec(),
            aspect: category.to_string(),
            aspect_tokens: None,
            polarity,
        }),
        Err(reason) => out.skipped.push(SkipRecord {
            sentence_id: id.to_string(),
            reason: format!("category '{category}': {reason}"),
        }),
    }
}

fn term_instance(
    node: Node<'_, '_>,
    attr: &str,
    id: &str,
    text: &str,
    tokens: &[String],
    out: &mut ParsedCorpus,
) {
    let mut skip = |reason: String| {
        out.skipped.push(SkipRecord {
            sentence_id: id.to_string(),
            reason,
        })
    };
    let Some(term) = node.attribute(attr) else {
        skip(format!("annotation without a {attr} attribute"));
        return;
    };
    if term == "NULL" {
        skip("placeholder NULL target".to_string());
        return;
    }
    let polarity = match required_polarity(node) {
        Ok(p) => p,
        Err(reason) => {
            skip(format!("term '{term}': {reason}"));
            return;
        }
    };
    // Offsets are character-based; when present they must reproduce the term.
    if let (Some(from), Some(to)) = (node.attribute("from"), node.attribute("to")) {
        match (from.parse::<usize>(), to.parse::<usize>()) {
            (Ok(from), Ok(to)) if from < to => {
                let span: String = text.chars().skip(from).take(to - from).collect();
                if span != term {
                    skip(format!(
                        "term '{term}': span {from}..{to} reads '{span}' instead"
                    ));
                    return;
                }
            }
            _ => {
                skip(format!("term '{term}': unparseable span {from}..{to}"));
                return;
            }
        }
    }
    out.instances.push(LabeledInstance {
        sentence_id: id.to_string(),
        text: text.to_string(),
        tokens: tokens.to_vec(),
        aspect: term.to_string(),
        aspect_tokens: Some(tokenize(term)),
        polarity,
    });
}

fn required_polarity(node: Node<'_, '_>) -> std::result::Result<Polarity, String> {
    match node.attribute("polarity") {
        None => Err("missing polarity".to_string()),
        Some(p) => Polarity::parse(p).map_err(|e| e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = r#"<?xml version="1.0"?>
<sentences>
  <sentence id="s1">
    <text>Average to good Thai food, but terrible delivery.</text>
    <aspectTerms>
      <aspectTerm term="Thai food" polarity="positive" from="16" to="25"/>
      <aspectTerm term="delivery" polarity="negative" from="40" to="48"/>
    </aspectTerms>
    <aspectCategories>
      <aspectCategory category="food" polarity="positive"/>
      <aspectCategory category="service" polarity="negative"/>
    </aspectCategories>
  </sentence>
  <sentence id="s2">
    <text>Great place.</text>
    <aspectCategories>
      <aspectCategory category="ambience" polarity="positive"/>
    </aspectCategories>
  </sentence>
</sentences>"#;

    const REVIEWS: &str = r#"<?xml version="1.0"?>
<Reviews>
  <Review rid="r1">
    <sentences>
      <sentence id="r1:0">
        <text>The wine list is interesting but the service was slow.</text>
        <Opinions>
          <Opinion target="wine list" category="DRINKS#STYLE_OPTIONS" polarity="positive" from="4" to="13"/>
          <Opinion target="service" category="SERVICE#GENERAL" polarity="negative" from="37" to="44"/>
          <Opinion target="NULL" category="RESTAURANT#GENERAL" polarity="neutral" from="0" to="0"/>
        </Opinions>
      </sentence>
    </sentences>
  </Review>
</Reviews>"#;

    #[test]
    fn flat_categories_explode_per_annotation() {
        let parsed = parse_semeval_str(FLAT, "test", Task::Acsa).unwrap();
        assert_eq!(parsed.layout, XmlLayout::Flat);
        assert_eq!(parsed.instances.len(), 3);
        assert!(parsed.skipped.is_empty());
        assert_eq!(parsed.instances[0].aspect, "food");
        assert_eq!(parsed.instances[0].polarity, Polarity::Positive);
        assert_eq!(parsed.instances[1].aspect, "service");
        assert_eq!(parsed.instances[0].sentence_id, parsed.instances[1].sentence_id);
        assert_eq!(parsed.instances[0].tokens[0], "average");
    }

    #[test]
    fn flat_terms_keep_offset_checked_spans() {
        let parsed = parse_semeval_str(FLAT, "test", Task::Atsa).unwrap();
        assert_eq!(parsed.instances.len(), 2);
        assert_eq!(parsed.instances[0].aspect, "Thai food");
        assert_eq!(
            parsed.instances[0].aspect_tokens,
            Some(vec!["thai".to_string(), "food".to_string()])
        );
        assert_eq!(parsed.instances[1].aspect, "delivery");
    }

    #[test]
    fn review_layout_is_traversed_and_null_targets_skipped() {
        let parsed = parse_semeval_str(REVIEWS, "test", Task::Atsa).unwrap();
        assert_eq!(parsed.layout, XmlLayout::Reviews);
        assert_eq!(parsed.instances.len(), 2);
        assert_eq!(parsed.instances[0].aspect, "wine list");
        assert_eq!(parsed.skipped.len(), 1);
        assert!(parsed.skipped[0].reason.contains("NULL"));
    }

    #[test]
    fn review_layout_categories_are_raw() {
        let parsed = parse_semeval_str(REVIEWS, "test", Task::Acsa).unwrap();
        // NULL targets still carry a category annotation.
        assert_eq!(parsed.instances.len(), 3);
        assert_eq!(parsed.instances[0].aspect, "DRINKS#STYLE_OPTIONS");
        assert_eq!(parsed.instances[2].aspect, "RESTAURANT#GENERAL");
    }

    #[test]
    fn bad_offsets_and_polarities_are_skipped_with_reasons() {
        let xml = r#"<sentences>
  <sentence id="a">
    <text>Nice soup here.</text>
    <aspectTerms>
      <aspectTerm term="soup" polarity="positive" from="0" to="4"/>
      <aspectTerm term="soup" polarity="glorious" from="5" to="9"/>
    </aspectTerms>
  </sentence>
</sentences>"#;
        let parsed = parse_semeval_str(xml, "test", Task::Atsa).unwrap();
        assert!(parsed.instances.is_empty());
        assert_eq!(parsed.skipped.len(), 2);
        assert!(parsed.skipped[0].reason.contains("reads 'Nice'"), "{:?}", parsed.skipped[0]);
        assert!(parsed.skipped[1].reason.contains("glorious"));
    }

    #[test]
    fn sentences_without_text_are_skipped() {
        let xml = "<sentences><sentence id=\"x\"/></sentences>";
        let parsed = parse_semeval_str(xml, "test", Task::Acsa).unwrap();
        assert!(parsed.instances.is_empty());
        assert_eq!(parsed.skipped[0].sentence_id, "x");
    }

    #[test]
    fn malformed_xml_is_a_hard_error() {
        let err = parse_semeval_str("<sentences><sentence>", "broken.xml", Task::Acsa).unwrap_err();
        match err {
            Error::Parse { path, .. } => assert_eq!(path, "broken.xml"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_root_is_a_hard_error() {
        let err = parse_semeval_str("<docs/>", "odd.xml", Task::Acsa).unwrap_err();
        assert!(err.to_string().contains("root"), "{err}");
    }
}
