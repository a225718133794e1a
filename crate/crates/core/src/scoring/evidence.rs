//! Evidence documents for a firm pair.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::{Paragraph, ParagraphId};

use super::{MrpResult, ScoreError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParagraphExcerpt {
    pub id: String,
    pub firm: String,
    pub year: i32,
    pub section: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceEntry {
    pub rank: usize,
    pub similarity: f64,
    pub a: ParagraphExcerpt,
    pub b: ParagraphExcerpt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceReport {
    pub firm_a: String,
    pub firm_b: String,
    pub threshold: f64,
    pub rrs: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub mrps_a: Vec<String>,
    pub mrps_b: Vec<String>,
    pub entries: Vec<EvidenceEntry>,
}

/// `<A>__<B>.json` with the two firm ids in lexical order.
pub fn evidence_file_name(firm_a: &str, firm_b: &str) -> String {
    let (x, y) = if firm_a <= firm_b {
        (firm_a, firm_b)
    } else {
        (firm_b, firm_a)
    };
    format!("{x}__{y}.json")
}

fn excerpt(id: &ParagraphId, p: &Paragraph) -> ParagraphExcerpt {
    ParagraphExcerpt {
        id: id.to_string(),
        firm: id.firm.clone(),
        year: id.year,
        section: id.section.clone(),
        text: p.text.clone(),
    }
}

/// Resolves every evidence triple's paragraph texts through `lookup`.
pub fn evidence_report<'p, F>(result: &MrpResult, mut lookup: F) -> Result<EvidenceReport, ScoreError>
where
    F: FnMut(&ParagraphId) -> Option<&'p Paragraph>,
{
    let mut resolve = |id: &ParagraphId| {
        lookup(id)
            .map(|p| excerpt(id, p))
            .ok_or_else(|| ScoreError::UnknownParagraphId(id.to_string()))
    };
    let entries = result
        .evidence
        .iter()
        .enumerate()
        .map(|(k, e)| {
            Ok(EvidenceEntry {
                rank: k + 1,
                similarity: e.similarity,
                a: resolve(&e.id_a)?,
                b: resolve(&e.id_b)?,
            })
        })
        .collect::<Result<_, ScoreError>>()?;
    Ok(EvidenceReport {
        firm_a: result.firm_a.clone(),
        firm_b: result.firm_b.clone(),
        threshold: result.threshold,
        rrs: result.rrs,
        n_a: result.n_a,
        n_b: result.n_b,
        mrps_a: result.mrps_a.iter().map(ToString::to_string).collect(),
        mrps_b: result.mrps_b.iter().map(ToString::to_string).collect(),
        entries,
    })
}

impl EvidenceReport {
    pub fn mrp_count(&self) -> usize {
        self.mrps_a.len() + self.mrps_b.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("evidence report serializes") + "\n"
    }

    /// Markdown rendering, listing at most `limit` entries.
    pub fn to_markdown(&self, limit: Option<usize>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "## {} and {}\n", self.firm_a, self.firm_b);
        let _ = writeln!(
            s,
            "RRS {:.6} at threshold {:.2}: {} of {} paragraphs from {} and {} of {} from {} are MRPs.\n",
            self.rrs,
            self.threshold,
            self.mrps_a.len(),
            self.n_a,
            self.firm_a,
            self.mrps_b.len(),
            self.n_b,
            self.firm_b
        );
        if self.entries.is_empty() {
            s.push_str("Zero MRPs: no paragraph pair reaches the threshold.\n");
            return s;
        }
        let shown = limit.unwrap_or(self.entries.len()).min(self.entries.len());
        for e in &self.entries[..shown] {
            let _ = writeln!(s, "### {}. similarity {:.4}\n", e.rank, e.similarity);
            for x in [&e.a, &e.b] {
                let _ = writeln!(s, "**{}** ({}, Item {}, `{}`)\n", x.firm, x.year, x.section, x.id);
                let _ = writeln!(s, "> {}\n", x.text.replace('\n', " "));
            }
        }
        if shown < self.entries.len() {
            let _ = writeln!(s, "({} more evidence pairs omitted)\n", self.entries.len() - shown);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::super::{mrps_from_similarity, tests::pid};
    use super::*;
    use std::collections::BTreeMap;

    fn paragraphs() -> BTreeMap<ParagraphId, Paragraph> {
        [
            (
                pid("A", 0),
                "Shortages of solar cells from our sole supplier could delay shipments.",
            ),
            (pid("A", 1), "Our debt carries variable interest."),
            (
                pid("B", 0),
                "We rely on a small number of suppliers for display components.",
            ),
        ]
        .into_iter()
        .map(|(id, t)| (id.clone(), Paragraph::new(id, t)))
        .collect()
    }

    #[test]
    fn one_entry_with_both_texts() {
        let ids_a = [pid("A", 0), pid("A", 1)];
        let ids_b = [pid("B", 0)];
        let table = [[0.81], [0.2]];
        let r = mrps_from_similarity("A", &ids_a, "B", &ids_b, 0.75, |i, j| table[i][j]).unwrap();
        let ps = paragraphs();
        let rep = evidence_report(&r, |id| ps.get(id)).unwrap();
        assert_eq!(rep.entries.len(), 1);
        assert!(rep.entries[0].a.text.contains("solar cells"));
        assert!(rep.entries[0].b.text.contains("display components"));
        assert_eq!(rep.entries[0].a.section, "1A");
        let md = rep.to_markdown(None);
        assert!(md.contains("solar cells") && md.contains("display components"));
        let back: EvidenceReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn empty_result_states_zero_mrps() {
        let r = mrps_from_similarity("A", &[pid("A", 0)], "B", &[pid("B", 0)], 0.75, |_, _| 0.1).unwrap();
        let ps = paragraphs();
        let rep = evidence_report(&r, |id| ps.get(id)).unwrap();
        assert_eq!(rep.mrp_count(), 0);
        assert!(rep.to_markdown(None).contains("Zero MRPs"));
    }

    #[test]
    fn unresolvable_id() {
        let r = mrps_from_similarity("A", &[pid("A", 9)], "B", &[pid("B", 0)], 0.5, |_, _| 0.9).unwrap();
        let ps = paragraphs();
        assert!(
            matches!(evidence_report(&r, |id| ps.get(id)), Err(ScoreError::UnknownParagraphId(id)) if id.contains(":0009"))
        );
    }

    #[test]
    fn file_name_orders_firms() {
        assert_eq!(evidence_file_name("META", "ENPH"), "ENPH__META.json");
        assert_eq!(evidence_file_name("ENPH", "META"), "ENPH__META.json");
    }
}
