//! Date mentions over token sequences.
//!
//! Recognised shapes (after tokenization):
//!
//! | surface            | tokens                          |
//! |--------------------|---------------------------------|
//! | `July 8, 2024`     | `july 8 , 2024` (comma optional)|
//! | `July 2024`        | `july 2024` (day taken as 1)    |
//! | `07/08/2024`       | `07 / 08 / 2024`                |
//! | `2024-07-08`       | `2024 - 07 - 08`                |
//!
//! Bare years never count.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

const MIN_YEAR: i32 = 1900;
const MAX_YEAR: i32 = 2100;

/// A date found in a paragraph. `start..end` is a half-open token range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DateMention {
    pub paragraph_id: String,
    pub start: usize,
    pub end: usize,
    pub normalized: NaiveDate,
    pub is_accounting: bool,
}

/// Quarter and fiscal-year ends: Mar 31, Jun 30, Sep 30, Dec 31.
pub fn is_accounting_date(date: NaiveDate) -> bool {
    matches!((date.month(), date.day()), (3, 31) | (6, 30) | (9, 30) | (12, 31))
}

fn month_number(token: &str) -> Option<u32> {
    Some(match token {
        "january" | "jan" => 1,
        "february" | "feb" => 2,
        "march" | "mar" => 3,
        "april" | "apr" => 4,
        "may" => 5,
        "june" | "jun" => 6,
        "july" | "jul" => 7,
        "august" | "aug" => 8,
        "september" | "sep" | "sept" => 9,
        "october" | "oct" => 10,
        "november" | "nov" => 11,
        "december" | "dec" => 12,
        _ => return None,
    })
}

fn digits(token: Option<&String>, min_len: usize, max_len: usize) -> Option<u32> {
    let t = token?;
    if t.len() < min_len || t.len() > max_len || !t.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    t.parse().ok()
}

fn year(token: Option<&String>) -> Option<i32> {
    digits(token, 4, 4)
        .map(|y| y as i32)
        .filter(|y| (MIN_YEAR..=MAX_YEAR).contains(y))
}

fn is(token: Option<&String>, s: &str) -> bool {
    token.is_some_and(|t| t == s)
}

/// Tries every shape at position `i`, longest first. Returns the exclusive
/// end index and the date.
fn match_at(tokens: &[String], i: usize) -> Option<(usize, NaiveDate)> {
    let t = |k: usize| tokens.get(i + k);

    if let Some(month) = t(0).and_then(|m| month_number(m)) {
        if let Some(day) = digits(t(1), 1, 2) {
            let (year_at, end) = if is(t(2), ",") { (3, i + 4) } else { (2, i + 3) };
            if let Some(y) = year(t(year_at)) {
                if let Some(date) = NaiveDate::from_ymd_opt(y, month, day) {
                    return Some((end, date));
                }
            }
        }
        if let Some(y) = year(t(1)) {
            return NaiveDate::from_ymd_opt(y, month, 1).map(|d| (i + 2, d));
        }
        return None;
    }

    if is(t(1), "/") && is(t(3), "/") {
        if let (Some(m), Some(d), Some(y)) = (digits(t(0), 1, 2), digits(t(2), 1, 2), year(t(4))) {
            if let Some(date) = NaiveDate::from_ymd_opt(y, m, d) {
                return Some((i + 5, date));
            }
        }
    }

    if is(t(1), "-") && is(t(3), "-") {
        if let (Some(y), Some(m), Some(d)) = (year(t(0)), digits(t(2), 1, 2), digits(t(4), 1, 2)) {
            if let Some(date) = NaiveDate::from_ymd_opt(y, m, d) {
                return Some((i + 5, date));
            }
        }
    }
    None
}

/// Non-overlapping date spans in `tokens`, scanned left to right.
pub fn find_dates(tokens: &[String]) -> Vec<(usize, usize, NaiveDate)> {
    let mut found = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        match match_at(tokens, i) {
            Some((end, date)) => {
                found.push((i, end, date));
                i = end;
            }
            None => i += 1,
        }
    }
    found
}

/// Date mentions of a tokenized paragraph.
pub fn detect_date_tokens(paragraph_id: &str, tokens: &[String]) -> Vec<DateMention> {
    find_dates(tokens)
        .into_iter()
        .map(|(start, end, normalized)| DateMention {
            paragraph_id: paragraph_id.to_string(),
            start,
            end,
            normalized,
            is_accounting: is_accounting_date(normalized),
        })
        .collect()
}

/// Removes every date span, repeating until no date remains (removal can
/// bring new date shapes together).
pub fn remove_dates(tokens: &[String]) -> Vec<String> {
    let mut current = tokens.to_vec();
    loop {
        let spans = find_dates(&current);
        if spans.is_empty() {
            return current;
        }
        let mut kept = Vec::with_capacity(current.len());
        let mut spans = spans.into_iter().peekable();
        for (k, tok) in current.into_iter().enumerate() {
            while spans.peek().is_some_and(|s| s.1 <= k) {
                spans.next();
            }
            if spans.peek().is_some_and(|s| s.0 <= k) {
                continue;
            }
            kept.push(tok);
        }
        current = kept;
    }
}
