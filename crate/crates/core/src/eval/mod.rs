//! Evaluation: return correlations, alignment of RRS with CAVDSR, the GICS
//! baseline, retrieval metrics and threshold sweeps.

mod retrieval;
mod returns;
mod stats;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scoring::{pairwise_mrps, EmbeddingIndex, RrsMatrix, ScoreError};

pub use retrieval::{retrieval_metrics, score_list, RankedList, RetrievalRow};
pub use returns::{cavdsr, daily_returns, load_return_dir, read_prices, ReturnSeries, MIN_OVERLAP};
pub use stats::{average_ranks, pearson, spearman};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("price for {firm} on {date} is not positive: {price}")]
    NonPositivePrice { firm: String, date: NaiveDate, price: f64 },
    #[error("price series for {0} needs at least two rows")]
    TooShort(String),
    #[error("price dates for {firm} are not strictly increasing at {date}")]
    UnorderedDates { firm: String, date: NaiveDate },
    #[error("{firm_a} and {firm_b} share only {common} trading days")]
    InsufficientOverlap {
        firm_a: String,
        firm_b: String,
        common: usize,
    },
    #[error("zero variance")]
    ZeroVariance,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("firm {0} is not in the GICS mapping")]
    UnknownFirm(String),
    #[error("query {0} has no relevant documents")]
    EmptyRelevanceSet(String),
    #[error("query {query} ranks {doc} twice")]
    DuplicateDocument { query: String, doc: String },
    #[error("cutoff k must be at least 1")]
    InvalidCutoff,
    #[error("invalid threshold grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl EvalError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn csv(path: &Path, e: csv::Error) -> Self {
        EvalError::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GicsLevel {
    Sector,
    Industry,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GicsEntry {
    pub ticker: String,
    pub sector: String,
    pub industry: String,
}

/// Firm to sector and industry.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GicsMapping {
    entries: BTreeMap<String, GicsEntry>,
}

impl GicsMapping {
    pub fn from_entries(entries: impl IntoIterator<Item = GicsEntry>) -> Self {
        GicsMapping {
            entries: entries.into_iter().map(|e| (e.ticker.clone(), e)).collect(),
        }
    }

    /// Reads `ticker,sector,industry` rows with a header line.
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| EvalError::csv(path, e))?;
        let rows = r
            .deserialize::<GicsEntry>()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| EvalError::csv(path, e))?;
        Ok(Self::from_entries(rows))
    }

    pub fn get(&self, firm: &str) -> Option<&GicsEntry> {
        self.entries.get(firm)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// 1 when both firms share the group at `level`, else 0.
pub fn gics_binary_rrs(mapping: &GicsMapping, a: &str, b: &str, level: GicsLevel) -> Result<u8, EvalError> {
    let ea = mapping.get(a).ok_or_else(|| EvalError::UnknownFirm(a.to_string()))?;
    let eb = mapping.get(b).ok_or_else(|| EvalError::UnknownFirm(b.to_string()))?;
    let same = match level {
        GicsLevel::Sector => ea.sector == eb.sector,
        GicsLevel::Industry => ea.industry == eb.industry,
    };
    Ok(same as u8)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub firm_a: String,
    pub firm_b: String,
    pub rrs: f64,
    pub cavdsr: f64,
}

/// Pearson correlation of RRS against CAVDSR across firm pairs.
pub fn alignment_rho(records: &[PairRecord]) -> Result<f64, EvalError> {
    let (x, y) = split_records(records)?;
    pearson(&x, &y).map_err(degenerate)
}

/// Spearman counterpart of [`alignment_rho`].
pub fn alignment_spearman(records: &[PairRecord]) -> Result<f64, EvalError> {
    let (x, y) = split_records(records)?;
    spearman(&x, &y).map_err(degenerate)
}

fn split_records(records: &[PairRecord]) -> Result<(Vec<f64>, Vec<f64>), EvalError> {
    if records.len() < 2 {
        return Err(EvalError::DegenerateInput(format!("{} pair records", records.len())));
    }
    Ok(records.iter().map(|r| (r.rrs, r.cavdsr)).unzip())
}

fn degenerate(e: EvalError) -> EvalError {
    match e {
        EvalError::ZeroVariance => EvalError::DegenerateInput("RRS or CAVDSR values are all equal".into()),
        other => other,
    }
}

/// A firm pair left out of ρ and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcludedPair {
    pub firm_a: String,
    pub firm_b: String,
    pub reason: String,
}

/// CAVDSR for every off-diagonal pair of the matrix. Pairs whose returns
/// are missing, overlap too little or have constant magnitude are left out
/// and listed separately.
pub fn pair_records(
    matrix: &RrsMatrix,
    returns: &BTreeMap<String, ReturnSeries>,
) -> (Vec<PairRecord>, Vec<ExcludedPair>) {
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for (a, b, rrs) in matrix.pairs() {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let outcome = match (returns.get(&a), returns.get(&b)) {
            (Some(ra), Some(rb)) => cavdsr(ra, rb).map_err(|e| e.to_string()),
            (None, _) => Err(format!("no returns for {a}")),
            (_, None) => Err(format!("no returns for {b}")),
        };
        match outcome {
            Ok(c) => kept.push(PairRecord {
                firm_a: a,
                firm_b: b,
                rrs,
                cavdsr: c,
            }),
            Err(reason) => excluded.push(ExcludedPair {
                firm_a: a,
                firm_b: b,
                reason,
            }),
        }
    }
    (kept, excluded)
}

/// Parses `start:end:step` (inclusive) or a comma-separated list. Values are
/// rounded to 1e-9 so `0.6:0.9:0.05` yields exactly seven thresholds.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, EvalError> {
    let bad = |m: &str| EvalError::InvalidGrid(format!("{spec:?}: {m}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let round = |v: f64| (v * 1e9).round() / 1e9;
    let grid: Vec<f64> = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected start:end:step"));
        }
        let (start, end, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(bad("need step > 0 and start <= end"));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| round(start + k as f64 * step)).collect()
    } else {
        spec.split(',').map(|s| num(s).map(round)).collect::<Result<_, _>>()?
    };
    validate_grid(&grid)?;
    Ok(grid)
}

/// Checks that thresholds lie in `[0, 1]` and strictly ascend.
pub fn validate_grid(grid: &[f64]) -> Result<(), EvalError> {
    if grid.is_empty() {
        return Err(EvalError::InvalidGrid("empty grid".into()));
    }
    if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(EvalError::InvalidGrid(format!("{v} outside [0, 1]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EvalError::InvalidGrid("values must ascend".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    /// Mean off-diagonal RRS.
    pub mean_rrs: f64,
    /// Sum of `|MRPs_A| + |MRPs_B|` over all firm pairs.
    pub total_mrps: usize,
    /// Number of evidence pairs over all firm pairs.
    pub evidence_pairs: usize,
    pub rho: Option<f64>,
}

/// Scores every firm pair once per threshold. With `returns`, also reports
/// ρ per threshold (`None` when undefined at that threshold).
pub fn threshold_sweep(
    index: &EmbeddingIndex,
    firms: &[String],
    grid: &[f64],
    returns: Option<&BTreeMap<String, ReturnSeries>>,
) -> Result<Vec<SweepRow>, EvalError> {
    validate_grid(grid)?;
    grid.iter()
        .map(|&xi| {
            let results = pairwise_mrps(index, firms, xi)?;
            let total_mrps = results.iter().map(|r| r.mrp_count()).sum();
            let evidence_pairs = results.iter().map(|r| r.evidence.len()).sum();
            let mean_rrs = results.iter().map(|r| r.rrs).sum::<f64>() / results.len() as f64;
            let rho = match returns {
                Some(ret) => {
                    let matrix = RrsMatrix::from_results(firms, &results)?;
                    alignment_rho(&pair_records(&matrix, ret).0).ok()
                }
                None => None,
            };
            Ok(SweepRow {
                threshold: xi,
                mean_rrs,
                total_mrps,
                evidence_pairs,
                rho,
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["threshold", "mean_rrs", "total_mrps", "evidence_pairs", "rho"])?;
    for r in rows {
        w.write_record([
            format!("{:.2}", r.threshold),
            format!("{:.6}", r.mean_rrs),
            r.total_mrps.to_string(),
            r.evidence_pairs.to_string(),
            opt(r.rho),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_retrieval_csv<W: Write>(rows: &[RetrievalRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "ndcg", "precision", "recall"])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            format!("{:.6}", r.ndcg),
            format!("{:.6}", r.precision),
            format!("{:.6}", r.recall),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Headline numbers of one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub pairs_used: usize,
    pub pairs_excluded: usize,
    pub rho: Option<f64>,
    pub rho_spearman: Option<f64>,
    pub gics_sector_rho: Option<f64>,
    pub gics_industry_rho: Option<f64>,
    pub excluded: Vec<ExcludedPair>,
    pub retrieval: Vec<RetrievalRow>,
}

/// Pair table with the GICS baseline columns and the headline summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub records: Vec<PairRecord>,
    pub gics: Vec<(Option<u8>, Option<u8>)>,
    pub summary: EvalSummary,
}

/// Sector and industry binary RRS of one firm pair.
type GicsPair = (Option<u8>, Option<u8>);

/// Runs the RRS, CAVDSR and GICS comparison.
pub fn evaluate(
    matrix: &RrsMatrix,
    returns: &BTreeMap<String, ReturnSeries>,
    gics: Option<&GicsMapping>,
    retrieval: &[RankedList],
    ks: &[usize],
) -> Result<Evaluation, EvalError> {
    let (records, excluded) = pair_records(matrix, returns);
    let gics_cols: Vec<GicsPair> = records
        .iter()
        .map(|r| match gics {
            Some(m) => (
                gics_binary_rrs(m, &r.firm_a, &r.firm_b, GicsLevel::Sector).ok(),
                gics_binary_rrs(m, &r.firm_a, &r.firm_b, GicsLevel::Industry).ok(),
            ),
            None => (None, None),
        })
        .collect();
    let baseline = |pick: fn(&GicsPair) -> Option<u8>| {
        let recs: Option<Vec<PairRecord>> = records
            .iter()
            .zip(&gics_cols)
            .map(|(r, g)| {
                pick(g).map(|v| PairRecord {
                    rrs: v as f64,
                    ..r.clone()
                })
            })
            .collect();
        recs.and_then(|rs| alignment_rho(&rs).ok())
    };
    let retrieval_rows = if retrieval.is_empty() {
        Vec::new()
    } else {
        retrieval_metrics(retrieval, ks)?
    };
    let summary = EvalSummary {
        pairs_used: records.len(),
        pairs_excluded: excluded.len(),
        rho: alignment_rho(&records).ok(),
        rho_spearman: alignment_spearman(&records).ok(),
        gics_sector_rho: baseline(|g| g.0),
        gics_industry_rho: baseline(|g| g.1),
        excluded,
        retrieval: retrieval_rows,
    };
    Ok(Evaluation {
        records,
        gics: gics_cols,
        summary,
    })
}

impl Evaluation {
    pub fn write_pairs_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["firm_a", "firm_b", "rrs", "cavdsr", "gics_sector", "gics_industry"])?;
        let cell = |v: Option<u8>| v.map_or_else(|| "NA".to_string(), |x| x.to_string());
        for (r, g) in self.records.iter().zip(&self.gics) {
            w.write_record([
                r.firm_a.clone(),
                r.firm_b.clone(),
                format!("{:.6}", r.rrs),
                format!("{:.6}", r.cavdsr),
                cell(g.0),
                cell(g.1),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl EvalSummary {
    pub fn write_metrics_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["metric", "value"])?;
        let rows = [
            ("rho_pearson", opt(self.rho)),
            ("rho_spearman", opt(self.rho_spearman)),
            ("gics_sector_rho", opt(self.gics_sector_rho)),
            ("gics_industry_rho", opt(self.gics_industry_rho)),
            ("pairs_used", self.pairs_used.to_string()),
            ("pairs_excluded", self.pairs_excluded.to_string()),
        ];
        for (k, v) in rows {
            w.write_record([k, v.as_str()])?;
        }
        for r in &self.retrieval {
            w.write_record([format!("ndcg@{}", r.k), format!("{:.6}", r.ndcg)])?;
            w.write_record([format!("precision@{}", r.k), format!("{:.6}", r.precision)])?;
            w.write_record([format!("recall@{}", r.k), format!("{:.6}", r.recall)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("# Evaluation\n\n");
        let _ = writeln!(s, "| metric | value |\n|---|---|");
        let _ = writeln!(s, "| ρ (Pearson, RRS vs CAVDSR) | {} |", opt(self.rho));
        let _ = writeln!(s, "| ρ (Spearman) | {} |", opt(self.rho_spearman));
        let _ = writeln!(s, "| GICS sector baseline ρ | {} |", opt(self.gics_sector_rho));
        let _ = writeln!(s, "| GICS industry baseline ρ | {} |", opt(self.gics_industry_rho));
        let _ = writeln!(s, "| firm pairs used | {} |", self.pairs_used);
        let _ = writeln!(s, "| firm pairs excluded | {} |", self.pairs_excluded);
        if !self.excluded.is_empty() {
            s.push_str("\nExcluded pairs:\n\n");
            for e in &self.excluded {
                let _ = writeln!(s, "- {} / {}: {}", e.firm_a, e.firm_b, e.reason);
            }
        }
        if !self.retrieval.is_empty() {
            s.push_str("\n| k | NDCG | P | R |\n|---|---|---|---|\n");
            for r in &self.retrieval {
                let _ = writeln!(s, "| {} | {:.4} | {:.4} | {:.4} |", r.k, r.ndcg, r.precision, r.recall);
            }
        }
        s
    }
}
