//! Collates prior artifacts into a single markdown report.
//!
//! The RRS matrix is required. Evidence, evaluation, sweep and training
//! artifacts are included when present; a path given explicitly must exist.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use riskrel::eval::EvalSummary;
use riskrel::scoring::{evidence_file_name, EvidenceReport};

use crate::commands::read_matrix;
use crate::config::Settings;
use crate::staging::Staging;

const DEFAULT_TOP: usize = 10;
const EVIDENCE_PAIRS: usize = 3;
const EVIDENCE_ENTRIES: usize = 3;

pub struct Inputs {
    pub rrs: Option<PathBuf>,
    pub evidence: Option<PathBuf>,
    pub eval: Option<PathBuf>,
    pub sweep: Option<PathBuf>,
    pub train_report: Option<PathBuf>,
}

/// `Some(path)` when the artifact should be read: explicit paths must
/// exist, workdir defaults are skipped when absent.
fn locate(s: &Settings, explicit: Option<PathBuf>, name: &str) -> Result<Option<PathBuf>> {
    match explicit {
        Some(p) if p.exists() => Ok(Some(p)),
        Some(p) => bail!("{} does not exist", p.display()),
        None => Ok(s.optional_artifact(None, name).filter(|p| p.exists())),
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"))
}

fn read_evidence(dir: &Path, a: &str, b: &str) -> Result<Option<EvidenceReport>> {
    let path = dir.join(evidence_file_name(a, b));
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let report = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(Some(report))
}

fn sweep_table(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .with_context(|| format!("{} is empty", path.display()))?
        .split(',')
        .collect();
    let mut s = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for (n, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            bail!("{}:{}: expected {} columns", path.display(), n + 2, header.len());
        }
        let _ = writeln!(s, "| {} |", cells.join(" | "));
    }
    Ok(s)
}

fn training_summary(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let summary = text
        .lines()
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .find(|v| v["kind"] == "summary")
        .with_context(|| format!("{} has no summary record", path.display()))?;
    let epoch1 = text
        .lines()
        .filter_map(|l| serde_json::from_str::<serde_json::Value>(l).ok())
        .find(|v| v["kind"] == "epoch" && v["epoch"] == 1)
        .and_then(|v| v["val_loss"].as_f64());
    let mut s = String::from("| field | value |\n|---|---|\n");
    for key in [
        "epochs_run",
        "best_epoch",
        "stop_reason",
        "initial_val_loss",
        "best_val_loss",
        "vocab_size",
    ] {
        let v = &summary[key];
        let shown = match v.as_f64() {
            Some(x) if v.is_f64() => format!("{x:.6}"),
            _ => v.to_string().trim_matches('"').to_string(),
        };
        let _ = writeln!(s, "| {key} | {shown} |");
    }
    let _ = writeln!(s, "| epoch_1_val_loss | {} |", fmt_opt(epoch1));
    Ok(s)
}

pub fn run(s: &Settings, inputs: Inputs, out: Option<PathBuf>) -> Result<()> {
    let rrs_path = s.artifact(inputs.rrs, "rrs.csv")?;
    let evidence = locate(s, inputs.evidence, "evidence")?;
    let eval = locate(s, inputs.eval, "eval")?;
    let sweep = locate(s, inputs.sweep, "sweep.csv")?;
    let train_report = locate(s, inputs.train_report, "train_report.jsonl")?;
    let top = s.parse_or("top", DEFAULT_TOP)?;
    let out = s.artifact(out, "report.md")?;

    let matrix = read_matrix(&rrs_path)?;
    let mut pairs = matrix.pairs();
    pairs.sort_by(|x, y| y.2.total_cmp(&x.2).then_with(|| (&x.0, &x.1).cmp(&(&y.0, &y.1))));

    let mut md = String::from("# Risk relation report\n\n## Firm-pair RRS\n\n");
    let mean = pairs.iter().map(|p| p.2).sum::<f64>() / pairs.len().max(1) as f64;
    let _ = writeln!(
        md,
        "{} firms, {} firm pairs, mean off-diagonal RRS {mean:.6}.\n",
        matrix.firms.len(),
        pairs.len()
    );
    md.push_str("| rank | firm A | firm B | RRS | MRPs |\n|---|---|---|---|---|\n");
    let mut reports = Vec::new();
    for (k, (a, b, v)) in pairs.iter().take(top).enumerate() {
        let report = match &evidence {
            Some(dir) => read_evidence(dir, a, b)?,
            None => None,
        };
        let mrps = report
            .as_ref()
            .map_or_else(|| "NA".to_string(), |r| r.mrp_count().to_string());
        let _ = writeln!(md, "| {} | {a} | {b} | {v:.6} | {mrps} |", k + 1);
        reports.extend(report);
    }

    md.push_str("\n## Top evidence\n\n");
    let with_evidence: Vec<&EvidenceReport> = reports.iter().filter(|r| !r.entries.is_empty()).collect();
    if evidence.is_none() {
        md.push_str("No evidence directory available.\n\n");
    } else if with_evidence.is_empty() {
        md.push_str("No firm pair in the table has evidence above the threshold.\n\n");
    }
    for r in with_evidence.iter().take(EVIDENCE_PAIRS) {
        for line in r.to_markdown(Some(EVIDENCE_ENTRIES)).lines() {
            if line.starts_with('#') {
                md.push('#');
            }
            md.push_str(line);
            md.push('\n');
        }
    }

    md.push_str("## Alignment with return co-movement\n\n");
    match &eval {
        Some(dir) => {
            let path = dir.join("summary.json");
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let summary: EvalSummary =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            md.push_str("| metric | value |\n|---|---|\n");
            let _ = writeln!(md, "| rho | {} |", fmt_opt(summary.rho));
            let _ = writeln!(md, "| rho_spearman | {} |", fmt_opt(summary.rho_spearman));
            let _ = writeln!(md, "| gics_sector_rho | {} |", fmt_opt(summary.gics_sector_rho));
            let _ = writeln!(md, "| gics_industry_rho | {} |", fmt_opt(summary.gics_industry_rho));
            let _ = writeln!(md, "| pairs_used | {} |", summary.pairs_used);
            let _ = writeln!(md, "| pairs_excluded | {} |", summary.pairs_excluded);
            md.push('\n');
        }
        None => md.push_str("No evaluation available.\n\n"),
    }

    md.push_str("## Threshold sweep\n\n");
    match &sweep {
        Some(p) => md.push_str(&sweep_table(p)?),
        None => md.push_str("No sweep available.\n"),
    }

    if let Some(p) = &train_report {
        md.push_str("\n## Training\n\n");
        md.push_str(&training_summary(p)?);
    }

    let mut sources: Vec<&Path> = vec![&rrs_path];
    sources.extend(evidence.as_deref());
    sources.extend(eval.as_deref());
    sources.extend(sweep.as_deref());
    sources.extend(train_report.as_deref());
    let mut staging = Staging::new(&sources);
    let tmp = staging.file(&out)?;
    fs::write(&tmp, md).with_context(|| format!("writing {}", out.display()))?;
    staging.commit()?;
    println!("report: -> {}", out.display());
    Ok(())
}
