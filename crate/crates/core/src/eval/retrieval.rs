//! NDCG, precision and recall at k under binary relevance.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    /// Document ids, best first.
    pub ranked: Vec<String>,
    pub relevant: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RetrievalRow {
    pub k: usize,
    pub ndcg: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Per-query scores at cutoff `k`.
pub fn score_list(list: &RankedList, k: usize) -> Result<RetrievalRow, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidCutoff);
    }
    let relevant: HashSet<&str> = list.relevant.iter().map(String::as_str).collect();
    if relevant.is_empty() {
        return Err(EvalError::EmptyRelevanceSet(list.query_id.clone()));
    }
    let mut seen = HashSet::new();
    if let Some(dup) = list.ranked.iter().find(|d| !seen.insert(d.as_str())) {
        return Err(EvalError::DuplicateDocument {
            query: list.query_id.clone(),
            doc: dup.clone(),
        });
    }
    let gain = |rank: usize| 1.0 / ((rank + 1) as f64).log2();
    let mut dcg = 0.0;
    let mut hits = 0usize;
    for (pos, doc) in list.ranked.iter().take(k).enumerate() {
        if relevant.contains(doc.as_str()) {
            dcg += gain(pos + 1);
            hits += 1;
        }
    }
    let idcg: f64 = (1..=k.min(relevant.len())).map(gain).sum();
    Ok(RetrievalRow {
        k,
        ndcg: dcg / idcg,
        precision: hits as f64 / k as f64,
        recall: hits as f64 / relevant.len() as f64,
    })
}

/// Query-averaged scores for each cutoff in `ks`.
pub fn retrieval_metrics(lists: &[RankedList], ks: &[usize]) -> Result<Vec<RetrievalRow>, EvalError> {
    if lists.is_empty() {
        return Err(EvalError::DegenerateInput("no queries".into()));
    }
    ks.iter()
        .map(|&k| {
            let mut acc = RetrievalRow {
                k,
                ndcg: 0.0,
                precision: 0.0,
                recall: 0.0,
            };
            for list in lists {
                let r = score_list(list, k)?;
                acc.ndcg += r.ndcg;
                acc.precision += r.precision;
                acc.recall += r.recall;
            }
            let n = lists.len() as f64;
            acc.ndcg /= n;
            acc.precision /= n;
            acc.recall /= n;
            Ok(acc)
        })
        .collect()
}
