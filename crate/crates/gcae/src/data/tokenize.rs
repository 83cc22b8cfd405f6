//! Sentence tokenization: lowercase, split on whitespace, and break every
//! punctuation or symbol character into a token of its own.
//!
//! The rule is deliberately simple and total — every input produces a
//! deterministic token sequence, and the same rule is applied to sentences,
//! aspect terms and embedding-file tokens so lookups agree.

/// Tokenizes `text`. Alphanumeric runs become one token; every other
/// non-whitespace character becomes a single-character token.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_whitespace() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
        } else if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            tokens.push(ch.to_string());
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
