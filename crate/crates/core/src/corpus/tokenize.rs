//! Word-level tokenizer.
//!
//! Text is lowercased, then split on whitespace. Inside each whitespace
//! chunk, alphabetic runs and digit runs become separate tokens and every
//! other character (punctuation, symbols, combining marks) stands alone.

#[derive(Clone, Copy, PartialEq, Eq)]
enum Class {
    Alpha,
    Digit,
    Other,
}

fn class_of(c: char) -> Class {
    if c.is_numeric() {
        Class::Digit
    } else if c.is_alphabetic() {
        Class::Alpha
    } else {
        Class::Other
    }
}

/// Splits `text` into lowercase word, digit-run and punctuation tokens.
///
/// ```
/// use riskrel::corpus::tokenize;
/// assert_eq!(tokenize("Net loss, 2023."), ["net", "loss", ",", "2023", "."]);
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut current_class = Class::Other;

    for c in lowered.chars() {
        if c.is_whitespace() {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            continue;
        }
        let class = class_of(c);
        if class == Class::Other {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            tokens.push(c.to_string());
            continue;
        }
        if !current.is_empty() && class != current_class {
            tokens.push(std::mem::take(&mut current));
        }
        current_class = class;
        current.push(c);
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
