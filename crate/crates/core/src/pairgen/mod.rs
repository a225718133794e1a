//! Positive-pair mining for contrastive training.
//!
//! Two views produce pairs:
//!
//! * **chronological**: two paragraphs of the same firm that mention the same
//!   calendar date (quarter-end dates excluded). Every date mention is cut
//!   from both sides so the encoder cannot match on the date itself.
//! * **lexical**: one paragraph `w_1..w_n` yields the overlapping spans
//!   `w_1..w_j` and `w_i..w_n` for random `i < j`.
//!
//! Negatives are not mined here; training uses in-batch negatives.

mod dates;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{FirmCorpus, Paragraph};

pub use dates::{detect_date_tokens, find_dates, is_accounting_date, remove_dates, DateMention};

#[derive(Debug, Error)]
pub enum PairError {
    #[error("insufficient {view} pairs: requested {requested}, available {available}")]
    InsufficientPairs {
        view: String,
        requested: usize,
        available: usize,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed pair record at {path}:{line}: {message}")]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum View {
    Chronological,
    Lexical,
}

impl View {
    /// Short name used in file names.
    pub fn file_stem(self) -> &'static str {
        match self {
            View::Chronological => "chrono",
            View::Lexical => "lexical",
        }
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            View::Chronological => "chronological",
            View::Lexical => "lexical",
        })
    }
}

/// The `(i, j)` draw behind a lexical pair, 1-based as in `w_i..w_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanDraw {
    pub i: usize,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivePair {
    pub view: View,
    pub left_tokens: Vec<String>,
    pub right_tokens: Vec<String>,
    /// Source paragraph ids: two for chronological pairs, one for lexical.
    pub provenance: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_info: Option<SpanDraw>,
}

/// Chronological pairs for one firm.
///
/// Paragraphs `a != b` pair when they share at least one normalized date
/// that is not a quarter end. Both sides lose all date spans; a pair is
/// dropped if either side then has fewer than `min_tokens` tokens. Each
/// unordered paragraph pair is emitted at most once, earlier paragraph on
/// the left.
pub fn build_chronological_pairs(corpus: &FirmCorpus, min_tokens: usize) -> Vec<PositivePair> {
    let paragraphs = &corpus.paragraphs;
    let mut by_date: BTreeMap<chrono::NaiveDate, BTreeSet<usize>> = BTreeMap::new();
    for (idx, p) in paragraphs.iter().enumerate() {
        debug_assert_eq!(p.firm(), corpus.firm_id);
        for mention in detect_date_tokens(&p.id.to_string(), &p.tokens) {
            if !mention.is_accounting {
                by_date.entry(mention.normalized).or_default().insert(idx);
            }
        }
    }

    let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
    for members in by_date.values() {
        let members: Vec<usize> = members.iter().copied().collect();
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k + 1..] {
                candidates.insert((a, b));
            }
        }
    }

    let stripped: BTreeMap<usize, Vec<String>> = candidates
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|idx| (idx, remove_dates(&paragraphs[idx].tokens)))
        .collect();

    candidates
        .into_iter()
        .filter_map(|(a, b)| {
            let left = &stripped[&a];
            let right = &stripped[&b];
            if left.len() < min_tokens.max(1) || right.len() < min_tokens.max(1) {
                return None;
            }
            Some(PositivePair {
                view: View::Chronological,
                left_tokens: left.clone(),
                right_tokens: right.clone(),
                provenance: vec![paragraphs[a].id.to_string(), paragraphs[b].id.to_string()],
                seed_info: None,
            })
        })
        .collect()
}

/// Chronological pairs over every firm, firm by firm.
pub fn build_chronological_pairs_all(corpora: &[FirmCorpus], min_tokens: usize) -> Vec<PositivePair> {
    corpora
        .iter()
        .flat_map(|c| build_chronological_pairs(c, min_tokens))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexicalConfig {
    pub min_span: usize,
    pub overlap_cap: usize,
    pub max_pairs_per_paragraph: usize,
}

impl Default for LexicalConfig {
    fn default() -> Self {
        LexicalConfig {
            min_span: 32,
            overlap_cap: 128,
            max_pairs_per_paragraph: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexicalOutput {
    pub pairs: Vec<PositivePair>,
    /// Paragraphs skipped as too short for two `min_span` spans.
    pub skipped: usize,
}

/// Lexical-view pairs.
///
/// For a paragraph of `n` tokens, `i` is drawn uniformly from
/// `[min_span, n - min_span]` and `j` from `[i + 1, min(i + overlap_cap, n - 1)]`
/// (1-based). The pair is `(w_1..w_j, w_i..w_n)`, so the two spans overlap on
/// `w_i..w_j`. Paragraphs with `n < 2 * min_span` are skipped and counted.
pub fn build_lexical_pairs(paragraphs: &[Paragraph], seed: u64, config: LexicalConfig) -> LexicalOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_span = config.min_span.max(1);
    let mut pairs = Vec::new();
    let mut skipped = 0;

    for p in paragraphs {
        let n = p.tokens.len();
        // j <= n - 1 needs i <= n - 2 as well
        let i_hi = n.saturating_sub(min_span).min(n.saturating_sub(2));
        if n < 2 * min_span || i_hi < min_span {
            skipped += 1;
            continue;
        }
        let mut seen = BTreeSet::new();
        for _ in 0..config.max_pairs_per_paragraph.max(1) {
            let i = rng.random_range(min_span..=i_hi);
            let j_hi = (i + config.overlap_cap.max(1)).min(n - 1);
            let j = rng.random_range(i + 1..=j_hi);
            if !seen.insert((i, j)) {
                continue;
            }
            pairs.push(PositivePair {
                view: View::Lexical,
                left_tokens: p.tokens[..j].to_vec(),
                right_tokens: p.tokens[i - 1..].to_vec(),
                provenance: vec![p.id.to_string()],
                seed_info: Some(SpanDraw { i, j }),
            });
        }
    }
    LexicalOutput { pairs, skipped }
}

/// Seeded shuffle then a disjoint split of one view's pairs.
///
/// Validation pairs are drawn first; training pairs then skip any pair
/// sharing a paragraph id with the validation set, so no paragraph leaks
/// across the split.
pub fn split_train_val(
    pairs: &[PositivePair],
    train_count: usize,
    val_count: usize,
    seed: u64,
) -> Result<(Vec<PositivePair>, Vec<PositivePair>), PairError> {
    let view = pairs.first().map_or_else(|| "any".to_string(), |p| p.view.to_string());
    let insufficient = |available: usize| PairError::InsufficientPairs {
        view: view.clone(),
        requested: train_count + val_count,
        available,
    };
    if train_count + val_count > pairs.len() {
        return Err(insufficient(pairs.len()));
    }

    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let val: Vec<PositivePair> = order[..val_count].iter().map(|&k| pairs[k].clone()).collect();
    let val_ids: BTreeSet<&str> = val
        .iter()
        .flat_map(|p| p.provenance.iter().map(String::as_str))
        .collect();
    let usable: Vec<&PositivePair> = order[val_count..]
        .iter()
        .map(|&k| &pairs[k])
        .filter(|p| p.provenance.iter().all(|id| !val_ids.contains(id.as_str())))
        .collect();
    if usable.len() < train_count {
        return Err(insufficient(val_count + usable.len()));
    }
    let train = usable[..train_count].iter().map(|p| (*p).clone()).collect();
    Ok((train, val))
}

pub fn write_pairs(path: &Path, pairs: &[PositivePair]) -> Result<(), PairError> {
    let io = |source| PairError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(fs::File::create(path).map_err(io)?);
    for p in pairs {
        let line = serde_json::to_string(p).expect("pair serializes");
        writeln!(out, "{line}").map_err(io)?;
    }
    out.flush().map_err(io)
}

pub fn read_pairs(path: &Path) -> Result<Vec<PositivePair>, PairError> {
    let io = |source| PairError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(fs::File::open(path).map_err(io)?);
    let mut pairs = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let pair: PositivePair = serde_json::from_str(&line).map_err(|e| PairError::BadRecord {
            path: path.to_path_buf(),
            line: n + 1,
            message: e.to_string(),
        })?;
        if pair.left_tokens.is_empty() || pair.right_tokens.is_empty() {
            return Err(PairError::BadRecord {
                path: path.to_path_buf(),
                line: n + 1,
                message: "empty token list".into(),
            });
        }
        pairs.push(pair);
    }
    Ok(pairs)
}

/// `<dir>/<view>_<split>.jsonl`, e.g. `chrono_train.jsonl`.
pub fn pair_file(dir: &Path, view: View, split: &str) -> PathBuf {
    dir.join(format!("{}_{split}.jsonl", view.file_stem()))
}
