//! `Item <code>` section extraction from cleaned filing text.

use std::collections::BTreeMap;
use std::sync::LazyLock;

use regex::Regex;

/// Risk Factors and Quantitative and Qualitative Disclosures about Market Risk.
pub const RISK_SECTIONS: [&str; 2] = ["1A", "7A"];

static ITEM_HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bitem\s+(\d{1,2}[a-z]?)\b\s*[.:\-\u{2013}\u{2014}]?").unwrap());

/// Extracts the risk sections ("1A" and "7A").
pub fn extract_sections(cleaned: &str) -> BTreeMap<String, String> {
    extract_sections_with(cleaned, &RISK_SECTIONS)
}

/// Extracts sections whose item code is listed in `labels`.
///
/// A section's text runs from the end of its heading marker to the start of
/// the next `Item <code>` heading (or end of document). When a label occurs
/// more than once, as with a table of contents followed by the body, the
/// longest occurrence wins. Absent sections are simply missing from the map.
pub fn extract_sections_with(cleaned: &str, labels: &[&str]) -> BTreeMap<String, String> {
    let wanted: Vec<String> = labels.iter().map(|l| l.to_ascii_uppercase()).collect();
    let headings: Vec<(usize, usize, String)> = ITEM_HEADING
        .captures_iter(cleaned)
        .map(|cap| {
            let whole = cap.get(0).unwrap();
            (whole.start(), whole.end(), cap[1].to_ascii_uppercase())
        })
        .collect();

    let mut sections: BTreeMap<String, String> = BTreeMap::new();
    for (k, (_, body_start, code)) in headings.iter().enumerate() {
        if !wanted.contains(code) {
            continue;
        }
        let body_end = headings.get(k + 1).map_or(cleaned.len(), |h| h.0);
        let body = cleaned[*body_start..body_end].trim();
        if body.is_empty() {
            continue;
        }
        let longer = sections.get(code).is_none_or(|prev| body.len() > prev.len());
        if longer {
            sections.insert(code.clone(), body.to_string());
        }
    }
    sections
}
