//! Helpers shared by the integration test binaries.

#![allow(dead_code)] // each test binary compiles this module separately

use gcae::model::ModelConfig;
use gcae::numeric::Matrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Brute-force sliding-window convolution, written against the documented
/// layout only: token-major `L x D` sentence, window-major filter rows,
/// accumulation in ascending flat order (window offset outer, dimension
/// inner). Independent of the production kernel's slicing, but with the same
/// accumulation order, so the two must agree bit for bit.
pub fn conv_reference(sentence: &Matrix, filters: &Matrix, bias: &[f64], width: usize) -> Matrix {
    let (len, dim) = sentence.shape();
    let positions = len - width + 1;
    let mut out = Matrix::zeros(filters.rows(), positions);
    for j in 0..filters.rows() {
        for i in 0..positions {
            let mut acc = 0.0;
            for t in 0..width {
                for d in 0..dim {
                    acc += filters.row(j)[t * dim + d] * sentence.row(i + t)[d];
                }
            }
            out.row_mut(j)[i] = acc + bias[j];
        }
    }
    out
}

pub fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for v in m.as_mut_slice() {
        *v = rng.random_range(-scale..scale);
    }
    m
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Token ids drawn from `1..vocab` (0 is the pad row).
pub fn rand_tokens(rng: &mut ChaCha8Rng, len: usize, vocab: usize) -> Vec<usize> {
    (0..len).map(|_| rng.random_range(1..vocab)).collect()
}

/// Dimensions small enough for exhaustive gradient checking yet exercising
/// multiple widths, aspects, and classes.
pub fn small_config() -> ModelConfig {
    ModelConfig {
        vocab_size: 14,
        embed_dim: 8,
        widths: vec![2, 3],
        filters_per_width: 4,
        class_count: 3,
        aspect_count: 4,
        term_width: 2,
        term_filters: 4,
    }
}

fn type_matches(expected: &str, value: &Value) -> bool {
    match expected {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "number" => value.is_number(),
        "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
        _ => false,
    }
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let mut node = root;
    for part in reference.trim_start_matches("#/").split('/') {
        node = node
            .get(part)
            .unwrap_or_else(|| panic!("schema reference {reference} does not resolve"));
    }
    node
}

/// Structural validation against the subset of JSON Schema draft-07 that the
/// schema files in `schemas/` actually use: `type`, `required`, `properties`,
/// `additionalProperties: false`, `items`, `enum`, `minimum`, `maximum`,
/// `minItems`, and local `$ref`. Returns human-readable violations.
pub fn schema_violations(root: &Value, schema: &Value, value: &Value, path: &str) -> Vec<String> {
    let mut errors = Vec::new();
    let schema = match schema.get("$ref").and_then(Value::as_str) {
        Some(reference) => resolve(root, reference),
        None => schema,
    };

    if let Some(expected) = schema.get("type").and_then(Value::as_str) {
        if !type_matches(expected, value) {
            errors.push(format!("{path}: expected {expected}, got {value}"));
            return errors;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            errors.push(format!("{path}: {value} not in {options:?}"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        match value.as_f64() {
            Some(v) if v >= min => {}
            _ => errors.push(format!("{path}: {value} below minimum {min}")),
        }
    }
    if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
        match value.as_f64() {
            Some(v) if v <= max => {}
            _ => errors.push(format!("{path}: {value} above maximum {max}")),
        }
    }

    if let Some(obj) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing required key '{key}'"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    errors.extend(schema_violations(root, sub, v, &format!("{path}.{key}")));
                }
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in obj.keys() {
                if props.is_none_or(|p| !p.contains_key(key)) {
                    errors.push(format!("{path}: unexpected key '{key}'"));
                }
            }
        }
    }

    if let Some(arr) = value.as_array() {
        if let Some(min_items) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min_items {
                errors.push(format!("{path}: {} items, need {min_items}", arr.len()));
            }
        }
        if let Some(item_schema) = schema.get("items") {
            for (i, item) in arr.iter().enumerate() {
                errors.extend(schema_violations(
                    root,
                    item_schema,
                    item,
                    &format!("{path}[{i}]"),
                ));
            }
        }
    }
    errors
}

/// Asserts `value` conforms to the schema file at `schema_path`.
pub fn assert_matches_schema(schema_path: &std::path::Path, value: &Value) {
    let text = std::fs::read_to_string(schema_path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", schema_path.display()));
    let schema: Value = serde_json::from_str(&text).expect("schema file parses");
    let violations = schema_violations(&schema, &schema, value, "$");
    assert!(
        violations.is_empty(),
        "{} violations against {}:\n{}",
        violations.len(),
        schema_path.display(),
        violations.join("\n")
    );
}
