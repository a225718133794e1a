//! Mutual risk paragraphs (MRPs) and the risk relation score (RRS).
//!
//! A paragraph of firm A is an MRP with firm B when its cosine similarity to
//! at least one paragraph of B reaches the threshold ξ. The score of a firm
//! pair is the share of both firms' paragraphs that are MRPs:
//! `(|MRPs_A| + |MRPs_B|) / (N_A + N_B)`. Search is exact over all cross
//! pairs.

mod evidence;
mod index_file;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{FirmCorpus, ParagraphId};
use crate::encoder::{cosine_unchecked, EmbeddingVector, EncoderError, Model, NORM_EPSILON};

pub use evidence::{evidence_file_name, evidence_report, EvidenceEntry, EvidenceReport, ParagraphExcerpt};
pub use index_file::{EMBEDDINGS_FORMAT_VERSION, EMBEDDINGS_MAGIC};

pub const DEFAULT_THRESHOLD: f64 = 0.75;

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("firm {0} has no paragraphs")]
    EmptyFirm(String),
    #[error("firm {0} is not in the index")]
    UnknownFirm(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("paragraph {id}: {source}")]
    Encode {
        id: String,
        #[source]
        source: EncoderError,
    },
    #[error("paragraph {0} encodes to a zero vector")]
    ZeroVector(String),
    #[error("duplicate paragraph id {0}")]
    DuplicateId(String),
    #[error("unknown paragraph id {0}")]
    UnknownParagraphId(String),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),
    #[error("need at least 2 firms, got {0}")]
    TooFewFirms(usize),
    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ScoreError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        ScoreError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    pub threshold: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl ScoreConfig {
    pub fn new(threshold: f64) -> Result<Self, ScoreError> {
        check_threshold(threshold)?;
        Ok(ScoreConfig { threshold })
    }
}

fn check_threshold(xi: f64) -> Result<(), ScoreError> {
    if (0.0..=1.0).contains(&xi) {
        Ok(())
    } else {
        Err(ScoreError::InvalidThreshold(xi))
    }
}

/// One firm's encoded paragraphs in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct FirmEmbeddings {
    pub firm_id: String,
    pub entries: Vec<(ParagraphId, EmbeddingVector)>,
}

/// Encoded paragraphs of every firm, tagged with the producing model.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingIndex {
    firms: Vec<FirmEmbeddings>,
    fingerprint: String,
    max_len: usize,
    dim: usize,
}

impl EmbeddingIndex {
    /// Checks that ids are unique, vectors share one dimension and none is
    /// zero. Firms are kept in the order given.
    pub fn new(firms: Vec<FirmEmbeddings>, fingerprint: String, max_len: usize) -> Result<Self, ScoreError> {
        let mut dim = None;
        let mut seen = HashSet::new();
        let mut names = HashSet::new();
        for firm in &firms {
            if !names.insert(firm.firm_id.as_str()) {
                return Err(ScoreError::Format {
                    what: "index",
                    message: format!("firm {} listed twice", firm.firm_id),
                });
            }
            for (id, v) in &firm.entries {
                if !seen.insert(id) {
                    return Err(ScoreError::DuplicateId(id.to_string()));
                }
                match dim {
                    None => dim = Some(v.dim()),
                    Some(d) if d != v.dim() => return Err(ScoreError::DimensionMismatch(d, v.dim())),
                    _ => {}
                }
                if v.norm() < NORM_EPSILON {
                    return Err(ScoreError::ZeroVector(id.to_string()));
                }
            }
        }
        Ok(EmbeddingIndex {
            firms,
            fingerprint,
            max_len,
            dim: dim.unwrap_or(0),
        })
    }

    pub fn firms(&self) -> &[FirmEmbeddings] {
        &self.firms
    }

    pub fn firm_ids(&self) -> Vec<String> {
        self.firms.iter().map(|f| f.firm_id.clone()).collect()
    }

    pub fn firm(&self, firm_id: &str) -> Option<&FirmEmbeddings> {
        self.firms.iter().find(|f| f.firm_id == firm_id)
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Vector dimension; zero when the index holds no vectors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.firms.iter().map(|f| f.entries.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write<W: Write>(&self, out: W) -> std::io::Result<()> {
        index_file::write_index(self, out)
    }

    pub fn read<R: Read>(input: R) -> Result<Self, ScoreError> {
        index_file::read_index(input)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScoreError> {
        let file = std::fs::File::create(path).map_err(|e| ScoreError::io(path, e))?;
        let mut out = std::io::BufWriter::new(file);
        self.write(&mut out)
            .and_then(|_| out.flush())
            .map_err(|e| ScoreError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self, ScoreError> {
        let file = std::fs::File::open(path).map_err(|e| ScoreError::io(path, e))?;
        Self::read(std::io::BufReader::new(file))
    }
}

/// Encodes every paragraph of every firm with `model`, preserving order.
pub fn embed_corpus(model: &Model, corpora: &[FirmCorpus]) -> Result<EmbeddingIndex, ScoreError> {
    let firms = corpora
        .iter()
        .map(|c| {
            let entries = c
                .paragraphs
                .iter()
                .map(|p| {
                    model
                        .encode_tokens(&p.tokens)
                        .map(|v| (p.id.clone(), v))
                        .map_err(|source| ScoreError::Encode {
                            id: p.id.to_string(),
                            source,
                        })
                })
                .collect::<Result<_, _>>()?;
            Ok(FirmEmbeddings {
                firm_id: c.firm_id.clone(),
                entries,
            })
        })
        .collect::<Result<_, ScoreError>>()?;
    EmbeddingIndex::new(firms, model.fingerprint(), model.max_len)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evidence {
    pub id_a: ParagraphId,
    pub id_b: ParagraphId,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrpResult {
    pub firm_a: String,
    pub firm_b: String,
    pub threshold: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub mrps_a: BTreeSet<ParagraphId>,
    pub mrps_b: BTreeSet<ParagraphId>,
    /// Every cross pair at or above the threshold, most similar first.
    pub evidence: Vec<Evidence>,
    pub rrs: f64,
}

impl MrpResult {
    pub fn mrp_count(&self) -> usize {
        self.mrps_a.len() + self.mrps_b.len()
    }
}

/// `(|MRPs_A| + |MRPs_B|) / (N_A + N_B)`.
pub fn rrs(mrp_count: usize, n_a: usize, n_b: usize) -> Result<f64, ScoreError> {
    let total = n_a + n_b;
    if total == 0 {
        return Err(ScoreError::EmptyFirm("both firms".into()));
    }
    Ok(mrp_count.min(total) as f64 / total as f64)
}

/// Threshold rule over an arbitrary `N_A × N_B` similarity function.
pub fn mrps_from_similarity<F>(
    firm_a: &str,
    ids_a: &[ParagraphId],
    firm_b: &str,
    ids_b: &[ParagraphId],
    threshold: f64,
    mut sim: F,
) -> Result<MrpResult, ScoreError>
where
    F: FnMut(usize, usize) -> f64,
{
    check_threshold(threshold)?;
    if ids_a.is_empty() {
        return Err(ScoreError::EmptyFirm(firm_a.to_string()));
    }
    if ids_b.is_empty() {
        return Err(ScoreError::EmptyFirm(firm_b.to_string()));
    }
    let mut mrps_a = BTreeSet::new();
    let mut mrps_b = BTreeSet::new();
    let mut evidence = Vec::new();
    for (i, ia) in ids_a.iter().enumerate() {
        for (j, ib) in ids_b.iter().enumerate() {
            let s = sim(i, j);
            if s >= threshold {
                mrps_a.insert(ia.clone());
                mrps_b.insert(ib.clone());
                evidence.push(Evidence {
                    id_a: ia.clone(),
                    id_b: ib.clone(),
                    similarity: s,
                });
            }
        }
    }
    evidence.sort_by(|x, y| {
        y.similarity
            .total_cmp(&x.similarity)
            .then_with(|| x.id_a.cmp(&y.id_a))
            .then_with(|| x.id_b.cmp(&y.id_b))
    });
    let score = rrs(mrps_a.len() + mrps_b.len(), ids_a.len(), ids_b.len())?;
    Ok(MrpResult {
        firm_a: firm_a.to_string(),
        firm_b: firm_b.to_string(),
        threshold,
        n_a: ids_a.len(),
        n_b: ids_b.len(),
        mrps_a,
        mrps_b,
        evidence,
        rrs: score,
    })
}

/// Exact all-pairs MRP search between two firms of the index.
pub fn find_mrps(index: &EmbeddingIndex, firm_a: &str, firm_b: &str, threshold: f64) -> Result<MrpResult, ScoreError> {
    let a = index
        .firm(firm_a)
        .ok_or_else(|| ScoreError::UnknownFirm(firm_a.to_string()))?;
    let b = index
        .firm(firm_b)
        .ok_or_else(|| ScoreError::UnknownFirm(firm_b.to_string()))?;
    let ids_a: Vec<ParagraphId> = a.entries.iter().map(|e| e.0.clone()).collect();
    let ids_b: Vec<ParagraphId> = b.entries.iter().map(|e| e.0.clone()).collect();
    if let (Some(x), Some(y)) = (a.entries.first(), b.entries.first()) {
        if x.1.dim() != y.1.dim() {
            return Err(ScoreError::DimensionMismatch(x.1.dim(), y.1.dim()));
        }
    }
    mrps_from_similarity(firm_a, &ids_a, firm_b, &ids_b, threshold, |i, j| {
        cosine_unchecked(&a.entries[i].1, &b.entries[j].1)
    })
}

/// MRP results for every unordered firm pair `(a, b)` with `a` before `b`
/// in `firms`.
pub fn pairwise_mrps(index: &EmbeddingIndex, firms: &[String], threshold: f64) -> Result<Vec<MrpResult>, ScoreError> {
    if firms.len() < 2 {
        return Err(ScoreError::TooFewFirms(firms.len()));
    }
    let mut out = Vec::with_capacity(firms.len() * (firms.len() - 1) / 2);
    for (k, a) in firms.iter().enumerate() {
        for b in &firms[k + 1..] {
            out.push(find_mrps(index, a, b, threshold)?);
        }
    }
    Ok(out)
}

/// Symmetric firm-by-firm RRS table. The diagonal is 1.0 by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct RrsMatrix {
    pub firms: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl RrsMatrix {
    /// Assembles the matrix from pairwise results over `firms`.
    pub fn from_results(firms: &[String], results: &[MrpResult]) -> Result<Self, ScoreError> {
        let pos: BTreeMap<&str, usize> = firms.iter().enumerate().map(|(k, f)| (f.as_str(), k)).collect();
        let n = firms.len();
        let mut values = vec![vec![f64::NAN; n]; n];
        for (k, row) in values.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        for r in results {
            let i = *pos
                .get(r.firm_a.as_str())
                .ok_or_else(|| ScoreError::UnknownFirm(r.firm_a.clone()))?;
            let j = *pos
                .get(r.firm_b.as_str())
                .ok_or_else(|| ScoreError::UnknownFirm(r.firm_b.clone()))?;
            values[i][j] = r.rrs;
            values[j][i] = r.rrs;
        }
        if values.iter().flatten().any(|v| v.is_nan()) {
            return Err(ScoreError::Format {
                what: "rrs matrix",
                message: "missing firm pair".into(),
            });
        }
        Ok(RrsMatrix {
            firms: firms.to_vec(),
            values,
        })
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.firms.iter().position(|f| f == a)?;
        let j = self.firms.iter().position(|f| f == b)?;
        Some(self.values[i][j])
    }

    /// Off-diagonal entries `(a, b, rrs)` with `a` before `b`.
    pub fn pairs(&self) -> Vec<(String, String, f64)> {
        let mut out = Vec::new();
        for i in 0..self.firms.len() {
            for j in i + 1..self.firms.len() {
                out.push((self.firms[i].clone(), self.firms[j].clone(), self.values[i][j]));
            }
        }
        out
    }

    /// Comma-separated with a `firm,...` header and six decimals.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["firm".to_string()];
        header.extend(self.firms.iter().cloned());
        w.write_record(&header)?;
        for (firm, row) in self.firms.iter().zip(&self.values) {
            let mut rec = vec![firm.clone()];
            rec.extend(row.iter().map(|v| format!("{v:.6}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, ScoreError> {
        let bad = |message: String| ScoreError::Format {
            what: "rrs matrix",
            message,
        };
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.get(0) != Some("firm") {
            return Err(bad("header must start with `firm`".into()));
        }
        let firms: Vec<String> = header.iter().skip(1).map(String::from).collect();
        let mut values = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.get(0) != firms.get(k).map(String::as_str) {
                return Err(bad(format!("row {} label does not match header", k + 1)));
            }
            let row = rec
                .iter()
                .skip(1)
                .map(|v| v.parse::<f64>().map_err(|_| bad(format!("bad value {v:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != firms.len() {
                return Err(bad(format!("row {} has {} values", k + 1, row.len())));
            }
            values.push(row);
        }
        if values.len() != firms.len() {
            return Err(bad(format!("{} rows for {} firms", values.len(), firms.len())));
        }
        Ok(RrsMatrix { firms, values })
    }
}

/// Pairwise scores over `firms`, upper triangle mirrored to the lower.
pub fn rrs_matrix(index: &EmbeddingIndex, firms: &[String], threshold: f64) -> Result<RrsMatrix, ScoreError> {
    RrsMatrix::from_results(firms, &pairwise_mrps(index, firms, threshold)?)
}
