//! Builds the combined restaurant category corpus out of three yearly
//! releases (one flat-layout file, two review-layout files per split).
//!
//! Unification steps, in order:
//!
//! 1. category names are mapped onto a shared 8-way set: `restaurant`,
//!    `food`, `drinks`, `ambience`, `service`, `price`, `misc`, `location`;
//! 2. flat-layout `conflict` labels become `neutral` (the review-layout
//!    years dropped the label, the merged set keeps three classes);
//! 3. review-layout opinions are collapsed per (sentence, category) by vote:
//!    p = #positive - #negative, giving positive / negative / neutral for
//!    p > 0 / p < 0 / p = 0;
//! 4. exact duplicate (text, category, polarity) triples are removed,
//!    keeping the first occurrence.

use std::collections::{hash_map::Entry, HashMap, HashSet};

use serde::Serialize;

use crate::data::instances::{LabeledInstance, Polarity};
use crate::data::semeval::{ParsedCorpus, XmlLayout};
use crate::error::{Error, Result};

/// The unified category set, alphabetical.
pub const LARGE_ASPECTS: [&str; 8] = [
    "ambience",
    "drinks",
    "food",
    "location",
    "misc",
    "price",
    "restaurant",
    "service",
];

/// Maps a flat-layout category name onto the unified set.
pub fn map_category_flat(raw: &str) -> Result<String> {
    match raw {
        "food" | "service" | "price" | "ambience" => Ok(raw.to_string()),
        "anecdotes/miscellaneous" => Ok("misc".to_string()),
        other => Err(Error::Data(format!(
            "unmapped flat-layout category '{other}'"
        ))),
    }
}

/// Maps an `ENTITY#ATTRIBUTE` opinion category onto the unified set. The
/// price attribute wins over the entity; the miscellaneous restaurant
/// attribute lands in `misc`; otherwise the entity decides.
pub fn map_category_opinion(raw: &str) -> Result<String> {
    let (entity, attribute) = raw.split_once('#').ok_or_else(|| {
        Error::Data(format!(
            "opinion category '{raw}' is not of the ENTITY#ATTRIBUTE form"
        ))
    })?;
    if attribute == "PRICES" {
        return Ok("price".to_string());
    }
    if entity == "RESTAURANT" && attribute == "MISCELLANEOUS" {
        return Ok("misc".to_string());
    }
    let mapped = entity.to_lowercase();
    match mapped.as_str() {
        "restaurant" | "food" | "drinks" | "ambience" | "service" | "location" => Ok(mapped),
        _ => Err(Error::Data(format!(
            "unmapped opinion category '{raw}'"
        ))),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MergeStats {
    pub input_instances: usize,
    pub output_instances: usize,
    /// Review-layout opinion annotations collapsed into per-category votes.
    pub collapsed_opinions: usize,
    pub duplicates_removed: usize,
}

/// Collapses review-layout opinions by vote; sentences keep their first-seen
/// order and each (sentence, category) pair yields exactly one instance.
fn collapse_opinions(
    instances: &[LabeledInstance],
    stats: &mut MergeStats,
) -> Result<Vec<LabeledInstance>> {
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: HashMap<(String, String), (LabeledInstance, i64)> = HashMap::new();
    for inst in instances {
        let mapped = map_category_opinion(&inst.aspect)?;
        let vote = match inst.polarity {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
            Polarity::Neutral | Polarity::Conflict => 0,
        };
        let key = (inst.sentence_id.clone(), mapped.clone());
        match groups.entry(key.clone()) {
            Entry::Occupied(mut e) => {
                e.get_mut().1 += vote;
                stats.collapsed_opinions += 1;
            }
            Entry::Vacant(e) => {
                let mut first = inst.clone();
                first.aspect = mapped;
                first.aspect_tokens = None;
                e.insert((first, vote));
                order.push(key);
            }
        }
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let (mut inst, votes) = groups.remove(&key).expect("key recorded on insert");
            inst.polarity = match votes.cmp(&0) {
                std::cmp::Ordering::Greater => Polarity::Positive,
                std::cmp::Ordering::Less => Polarity::Negative,
                std::cmp::Ordering::Equal => Polarity::Neutral,
            };
            inst
        })
        .collect())
}

/// Merges category corpora from several releases into the unified 8-way,
/// 3-class corpus. Parts are processed in the given order; the result keeps
/// the first occurrence of each exact (text, category, polarity) triple.
pub fn restaurant_large(parts: &[ParsedCorpus]) -> Result<(Vec<LabeledInstance>, MergeStats)> {
    let mut stats = MergeStats::default();
    let mut combined: Vec<LabeledInstance> = Vec::new();
    for part in parts {
        stats.input_instances += part.instances.len();
        match part.layout {
            XmlLayout::Flat => {
                for inst in &part.instances {
                    let mut inst = inst.clone();
                    inst.aspect = map_category_flat(&inst.aspect)?;
                    if inst.polarity == Polarity::Conflict {
                        inst.polarity = Polarity::Neutral;
                    }
                    combined.push(inst);
                }
            }
            XmlLayout::Reviews => {
                combined.extend(collapse_opinions(&part.instances, &mut stats)?);
            }
        }
    }

    let mut seen: HashSet<(String, String, Polarity)> = HashSet::new();
    let mut out = Vec::with_capacity(combined.len());
    for inst in combined {
        let key = (inst.text.clone(), inst.aspect.clone(), inst.polarity);
        if seen.insert(key) {
            out.push(inst);
        } else {
            stats.duplicates_removed += 1;
        }
    }
    stats.output_instances = out.len();
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(id: &str, text: &str, aspect: &str, polarity: Polarity) -> LabeledInstance {
        LabeledInstance {
            sentence_id: id.to_string(),
            text: text.to_string(),
            tokens: crate::data::tokenize::tokenize(text),
            aspect: aspect.to_string(),
            aspect_tokens: None,
            polarity,
        }
    }

    fn corpus(layout: XmlLayout, instances: Vec<LabeledInstance>) -> ParsedCorpus {
        ParsedCorpus {
            instances,
            skipped: Vec::new(),
            layout,
        }
    }

    #[test]
    fn category_mapping_rules() {
        assert_eq!(map_category_flat("food").unwrap(), "food");
        assert_eq!(map_category_flat("anecdotes/miscellaneous").unwrap(), "misc");
        assert!(map_category_flat("movies").is_err());

        assert_eq!(map_category_opinion("FOOD#QUALITY").unwrap(), "food");
        assert_eq!(map_category_opinion("FOOD#PRICES").unwrap(), "price");
        assert_eq!(map_category_opinion("RESTAURANT#PRICES").unwrap(), "price");
        assert_eq!(map_category_opinion("RESTAURANT#MISCELLANEOUS").unwrap(), "misc");
        assert_eq!(map_category_opinion("RESTAURANT#GENERAL").unwrap(), "restaurant");
        assert_eq!(map_category_opinion("DRINKS#STYLE_OPTIONS").unwrap(), "drinks");
        assert_eq!(map_category_opinion("LOCATION#GENERAL").unwrap(), "location");
        assert!(map_category_opinion("KEYBOARD#QUALITY").is_err());
        assert!(map_category_opinion("food").is_err());
    }

    #[test]
    fn votes_decide_collapsed_polarity() {
        let part = corpus(
            XmlLayout::Reviews,
            vec![
                // two positive + one negative food opinions -> positive
                inst("s1", "t1", "FOOD#QUALITY", Polarity::Positive),
                inst("s1", "t1", "FOOD#STYLE_OPTIONS", Polarity::Positive),
                inst("s1", "t1", "FOOD#QUALITY", Polarity::Negative),
                // one positive + one negative service -> neutral
                inst("s2", "t2", "SERVICE#GENERAL", Polarity::Positive),
                inst("s2", "t2", "SERVICE#GENERAL", Polarity::Negative),
                // two negative ambience -> negative
                inst("s3", "t3", "AMBIENCE#GENERAL", Polarity::Negative),
                inst("s3", "t3", "AMBIENCE#GENERAL", Polarity::Negative),
                // lone neutral -> neutral
                inst("s4", "t4", "DRINKS#QUALITY", Polarity::Neutral),
            ],
        );
        let (merged, stats) = restaurant_large(&[part]).unwrap();
        let by_id: std::collections::BTreeMap<_, _> = merged
            .iter()
            .map(|i| ((i.sentence_id.clone(), i.aspect.clone()), i.polarity))
            .collect();
        assert_eq!(by_id[&("s1".to_string(), "food".to_string())], Polarity::Positive);
        assert_eq!(by_id[&("s2".to_string(), "service".to_string())], Polarity::Neutral);
        assert_eq!(by_id[&("s3".to_string(), "ambience".to_string())], Polarity::Negative);
        assert_eq!(by_id[&("s4".to_string(), "drinks".to_string())], Polarity::Neutral);
        assert_eq!(merged.len(), 4);
        assert_eq!(stats.collapsed_opinions, 4);
    }

    #[test]
    fn vote_result_ignores_opinion_order() {
        let mut instances = vec![
            inst("s1", "t1", "FOOD#QUALITY", Polarity::Positive),
            inst("s1", "t1", "FOOD#QUALITY", Polarity::Negative),
            inst("s1", "t1", "FOOD#QUALITY", Polarity::Positive),
        ];
        let (a, _) = restaurant_large(&[corpus(XmlLayout::Reviews, instances.clone())]).unwrap();
        instances.reverse();
        let (b, _) = restaurant_large(&[corpus(XmlLayout::Reviews, instances)]).unwrap();
        assert_eq!(a[0].polarity, b[0].polarity);
        assert_eq!(a[0].polarity, Polarity::Positive);
    }

    #[test]
    fn conflict_becomes_neutral_in_flat_parts() {
        let part = corpus(
            XmlLayout::Flat,
            vec![inst("s1", "t1", "food", Polarity::Conflict)],
        );
        let (merged, _) = restaurant_large(&[part]).unwrap();
        assert_eq!(merged[0].polarity, Polarity::Neutral);
    }

    #[test]
    fn exact_duplicates_are_removed_across_parts() {
        let flat = corpus(
            XmlLayout::Flat,
            vec![
                inst("a1", "same text", "food", Polarity::Positive),
                inst("a2", "other text", "food", Polarity::Positive),
            ],
        );
        let reviews = corpus(
            XmlLayout::Reviews,
            vec![
                inst("b1", "same text", "FOOD#QUALITY", Polarity::Positive),
                inst("b2", "same text", "FOOD#QUALITY", Polarity::Negative),
            ],
        );
        let (merged, stats) = restaurant_large(&[flat, reviews]).unwrap();
        // b1 collapses to food/positive on identical text -> duplicate of a1.
        assert_eq!(stats.duplicates_removed, 1);
        assert_eq!(merged.len(), 3);
        assert_eq!(merged[0].sentence_id, "a1");
        assert_eq!(stats.input_instances, 4);
        assert_eq!(stats.output_instances, 3);
    }

    #[test]
    fn aspect_set_is_the_documented_eight() {
        let mut seen: Vec<String> = vec![
            map_category_flat("anecdotes/miscellaneous").unwrap(),
            map_category_flat("food").unwrap(),
            map_category_flat("service").unwrap(),
            map_category_flat("price").unwrap(),
            map_category_flat("ambience").unwrap(),
            map_category_opinion("RESTAURANT#GENERAL").unwrap(),
            map_category_opinion("DRINKS#QUALITY").unwrap(),
            map_category_opinion("LOCATION#GENERAL").unwrap(),
        ];
        seen.sort();
        seen.dedup();
        assert_eq!(seen, LARGE_ASPECTS);
    }
}
