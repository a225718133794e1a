//! Filing ingestion: markup removal, risk-section extraction, paragraph
//! segmentation and tokenization.
//!
//! Raw filings live on disk as `<root>/<ticker>/<year>.txt`. Each one is
//! cleaned with [`strip_markup`], cut into sections with
//! [`extract_sections_with`], and split into [`Paragraph`]s on blank lines.

mod markup;
mod sections;
mod tokenize;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use markup::{decode_entities, strip_markup};
pub use sections::{extract_sections, extract_sections_with, RISK_SECTIONS};
pub use tokenize::tokenize;

/// Paragraphs shorter than this many tokens are treated as headings or noise.
pub const DEFAULT_MIN_TOKENS: usize = 20;

pub const MIN_FISCAL_YEAR: i32 = 1990;
pub const MAX_FISCAL_YEAR: i32 = 2100;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid filing: {0}")]
    InvalidFiling(String),
    #[error("malformed paragraph record at {path}:{line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("invalid paragraph id {0:?}")]
    BadId(String),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// A cleaned annual filing with its extracted sections.
#[derive(Debug, Clone)]
pub struct Filing {
    pub firm_id: String,
    pub fiscal_year: i32,
    pub raw_text: String,
    pub cleaned: String,
    pub sections: BTreeMap<String, String>,
}

impl Filing {
    pub fn parse(firm_id: &str, fiscal_year: i32, raw_text: String, labels: &[&str]) -> Result<Self, CorpusError> {
        if firm_id.trim().is_empty() {
            return Err(CorpusError::InvalidFiling("empty firm id".into()));
        }
        if !(MIN_FISCAL_YEAR..=MAX_FISCAL_YEAR).contains(&fiscal_year) {
            return Err(CorpusError::InvalidFiling(format!(
                "{firm_id}: fiscal year {fiscal_year} outside [{MIN_FISCAL_YEAR}, {MAX_FISCAL_YEAR}]"
            )));
        }
        let cleaned = strip_markup(&raw_text);
        let sections = extract_sections_with(&cleaned, labels);
        Ok(Filing {
            firm_id: firm_id.to_string(),
            fiscal_year,
            raw_text,
            cleaned,
            sections,
        })
    }

    /// Paragraphs of every extracted section, in section-label order.
    pub fn paragraphs(&self, min_tokens: usize) -> Vec<Paragraph> {
        self.sections
            .iter()
            .flat_map(|(label, text)| segment_paragraphs(text, &self.firm_id, self.fiscal_year, label, min_tokens))
            .collect()
    }
}

/// Stable paragraph identifier, rendered as `FIRM:YEAR:SECTION:ORDINAL`
/// with a zero-padded ordinal so lexical order follows document order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParagraphId {
    pub firm: String,
    pub year: i32,
    pub section: String,
    pub ordinal: u32,
}

impl fmt::Display for ParagraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{:04}", self.firm, self.year, self.section, self.ordinal)
    }
}

impl FromStr for ParagraphId {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::BadId(s.to_string());
        let mut parts = s.rsplitn(4, ':');
        let ordinal = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let section = parts.next().ok_or_else(bad)?.to_string();
        let year = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let firm = parts.next().filter(|f| !f.is_empty()).ok_or_else(bad)?.to_string();
        Ok(ParagraphId {
            firm,
            year,
            section,
            ordinal,
        })
    }
}

/// A tokenized unit of filing text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ParagraphRecord", try_from = "ParagraphRecord")]
pub struct Paragraph {
    pub id: ParagraphId,
    pub text: String,
    pub tokens: Vec<String>,
}

impl Paragraph {
    /// Builds a paragraph from text, tokenizing it.
    pub fn new(id: ParagraphId, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        Paragraph { id, text, tokens }
    }

    pub fn firm(&self) -> &str {
        &self.id.firm
    }
}

/// On-disk form of a paragraph: one JSON object per line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParagraphRecord {
    pub id: String,
    pub firm: String,
    pub year: i32,
    pub section: String,
    pub text: String,
    pub tokens: Vec<String>,
}

impl From<Paragraph> for ParagraphRecord {
    fn from(p: Paragraph) -> Self {
        ParagraphRecord {
            id: p.id.to_string(),
            firm: p.id.firm.clone(),
            year: p.id.year,
            section: p.id.section.clone(),
            text: p.text,
            tokens: p.tokens,
        }
    }
}

impl TryFrom<ParagraphRecord> for Paragraph {
    type Error = CorpusError;

    fn try_from(r: ParagraphRecord) -> Result<Self, Self::Error> {
        let id: ParagraphId = r.id.parse()?;
        if id.firm != r.firm || id.year != r.year || id.section != r.section {
            return Err(CorpusError::BadId(format!(
                "{} disagrees with firm/year/section fields",
                r.id
            )));
        }
        if r.tokens.is_empty() {
            return Err(CorpusError::BadId(format!("{} has no tokens", r.id)));
        }
        Ok(Paragraph {
            id,
            text: r.text,
            tokens: r.tokens,
        })
    }
}

/// All risk-section paragraphs belonging to one firm.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmCorpus {
    pub firm_id: String,
    pub paragraphs: Vec<Paragraph>,
}

impl FirmCorpus {
    pub fn count(&self) -> usize {
        self.paragraphs.len()
    }
}

/// Groups paragraphs by firm. Firms come out in lexical order; paragraph
/// order within a firm is preserved.
pub fn group_by_firm(paragraphs: &[Paragraph]) -> Vec<FirmCorpus> {
    let mut by_firm: BTreeMap<&str, Vec<Paragraph>> = BTreeMap::new();
    for p in paragraphs {
        by_firm.entry(p.firm()).or_default().push(p.clone());
    }
    by_firm
        .into_iter()
        .map(|(firm, paragraphs)| FirmCorpus {
            firm_id: firm.to_string(),
            paragraphs,
        })
        .collect()
}

static BLANK_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\n[ \t\r]*\n").unwrap());

/// Splits a section into paragraphs on blank lines, discarding fragments
/// with fewer than `min_tokens` tokens. Ordinals count kept paragraphs.
pub fn segment_paragraphs(section: &str, firm_id: &str, year: i32, label: &str, min_tokens: usize) -> Vec<Paragraph> {
    BLANK_LINE
        .split(section)
        .map(str::trim)
        .filter(|block| !block.is_empty())
        .map(|block| (block, tokenize(block)))
        .filter(|(_, tokens)| !tokens.is_empty() && tokens.len() >= min_tokens)
        .enumerate()
        .map(|(ordinal, (text, tokens))| Paragraph {
            id: ParagraphId {
                firm: firm_id.to_string(),
                year,
                section: label.to_string(),
                ordinal: ordinal as u32,
            },
            text: text.to_string(),
            tokens,
        })
        .collect()
}

/// Loads every `<root>/<ticker>/<year>.txt` filing, in (ticker, year) order.
pub fn load_filings(root: &Path, labels: &[&str]) -> Result<Vec<Filing>, CorpusError> {
    let mut firm_dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| CorpusError::io(root, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    firm_dirs.sort();

    let mut filings = Vec::new();
    for dir in firm_dirs {
        let ticker = dir
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| CorpusError::InvalidFiling(format!("bad firm dir {}", dir.display())))?
            .to_string();
        let mut files: Vec<(i32, PathBuf)> = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| CorpusError::io(&dir, e))? {
            let path = entry.map_err(|e| CorpusError::io(&dir, e))?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("txt") {
                continue;
            }
            let year = path
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.parse::<i32>().ok())
                .ok_or_else(|| CorpusError::InvalidFiling(format!("{}: name is not <year>.txt", path.display())))?;
            files.push((year, path));
        }
        files.sort();
        for (year, path) in files {
            let raw = fs::read_to_string(&path).map_err(|e| CorpusError::io(&path, e))?;
            filings.push(Filing::parse(&ticker, year, raw, labels)?);
        }
    }
    Ok(filings)
}

/// Runs the whole ingest step over a filing tree.
pub fn ingest(root: &Path, labels: &[&str], min_tokens: usize) -> Result<Vec<Paragraph>, CorpusError> {
    Ok(load_filings(root, labels)?
        .iter()
        .flat_map(|f| f.paragraphs(min_tokens))
        .collect())
}

pub fn write_paragraphs(path: &Path, paragraphs: &[Paragraph]) -> Result<(), CorpusError> {
    let file = fs::File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for p in paragraphs {
        let line = serde_json::to_string(p).expect("paragraph serializes");
        writeln!(out, "{line}").map_err(|e| CorpusError::io(path, e))?;
    }
    out.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_paragraphs(path: &Path) -> Result<Vec<Paragraph>, CorpusError> {
    let file = fs::File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut paragraphs = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Paragraph = serde_json::from_str(&line).map_err(|e| CorpusError::BadRecord {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        paragraphs.push(p);
    }
    Ok(paragraphs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(n: usize, stem: &str) -> String {
        (0..n)
            .map(|i| format!("{stem}{}", (b'a' + (i % 26) as u8) as char))
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[test]
    fn two_blocks_give_two_ordinals() {
        let text = format!("{}\n\n{}", words(25, "x"), words(25, "y"));
        let paras = segment_paragraphs(&text, "ACME", 2020, "1A", 20);
        assert_eq!(paras.len(), 2);
        assert_eq!(paras[0].id.ordinal, 0);
        assert_eq!(paras[1].id.ordinal, 1);
    }

    #[test]
    fn short_fragment_dropped() {
        assert!(segment_paragraphs("one two three four five", "ACME", 2020, "1A", 20).is_empty());
    }

    #[test]
    fn single_block_tokens_match() {
        let block = words(40, "w");
        let paras = segment_paragraphs(&block, "ACME", 2020, "7A", 20);
        assert_eq!(paras.len(), 1);
        assert_eq!(paras[0].tokens, tokenize(&block));
        assert_eq!(paras[0].id.to_string(), "ACME:2020:7A:0000");
    }

    #[test]
    fn segmentation_is_deterministic() {
        let text = format!(
            "{}\n \n{}\n\nshort\n\n{}",
            words(30, "a"),
            words(21, "b"),
            words(22, "c")
        );
        let a = segment_paragraphs(&text, "F", 2019, "1A", 20);
        let b = segment_paragraphs(&text, "F", 2019, "1A", 20);
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert_eq!(a[2].id.ordinal, 2);
    }

    #[test]
    fn paragraph_id_round_trips_with_colon_in_ticker() {
        let id = ParagraphId {
            firm: "BRK:B".into(),
            year: 2021,
            section: "1A".into(),
            ordinal: 12,
        };
        assert_eq!(id.to_string().parse::<ParagraphId>().unwrap(), id);
        assert!("nope".parse::<ParagraphId>().is_err());
    }

    #[test]
    fn filing_rejects_bad_year_and_empty_firm() {
        assert!(Filing::parse("ACME", 1989, String::new(), &RISK_SECTIONS).is_err());
        assert!(Filing::parse("", 2020, String::new(), &RISK_SECTIONS).is_err());
        assert!(Filing::parse("ACME", 2100, String::new(), &RISK_SECTIONS).is_ok());
    }

    #[test]
    fn filing_pipeline_end_to_end() {
        let body = words(30, "risk");
        let raw = format!(
            "<html><p>Item 1. Business</p><p>{}</p><p>Item 1A. Risk Factors</p><p>{body}</p>\
             <table><tr><td>99</td></tr></table><p>Item 1B. Unresolved</p></html>",
            words(30, "biz")
        );
        let filing = Filing::parse("ACME", 2020, raw, &RISK_SECTIONS).unwrap();
        for text in filing.sections.values() {
            assert!(filing.cleaned.contains(text.as_str()));
        }
        let paras = filing.paragraphs(20);
        assert_eq!(paras.len(), 1);
        assert_eq!(paras[0].text, body);
        assert_eq!(paras[0].id.section, "1A");
    }

    #[test]
    fn jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        let paras = segment_paragraphs(&words(25, "q"), "ACME", 2020, "1A", 20);
        write_paragraphs(&path, &paras).unwrap();
        assert_eq!(read_paragraphs(&path).unwrap(), paras);
    }

    #[test]
    fn load_filings_orders_by_ticker_then_year() {
        let dir = tempfile::tempdir().unwrap();
        for (t, y) in [("ZZZ", 2019), ("AAA", 2020), ("AAA", 2018)] {
            fs::create_dir_all(dir.path().join(t)).unwrap();
            fs::write(dir.path().join(t).join(format!("{y}.txt")), "Item 1A. x").unwrap();
        }
        let filings = load_filings(dir.path(), &RISK_SECTIONS).unwrap();
        let keys: Vec<_> = filings.iter().map(|f| (f.firm_id.as_str(), f.fiscal_year)).collect();
        assert_eq!(keys, [("AAA", 2018), ("AAA", 2020), ("ZZZ", 2019)]);
    }
}
