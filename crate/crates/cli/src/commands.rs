//! One function per pipeline stage. Each reads its inputs, writes staged
//! outputs and commits them only after every write succeeded.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use riskrel::corpus::{self, group_by_firm, Paragraph, ParagraphId, DEFAULT_MIN_TOKENS, RISK_SECTIONS};
use riskrel::encoder::Model;
use riskrel::eval::{self, GicsMapping, RankedList};
use riskrel::pairgen::{self, LexicalConfig, PositivePair, View};
use riskrel::scoring::{self, EmbeddingIndex, RrsMatrix, ScoreConfig, DEFAULT_THRESHOLD};
use riskrel::training::{self, TrainConfig};

use crate::config::Settings;
use crate::staging::Staging;

pub const DEFAULT_GRID: &str = "0.6:0.9:0.05";
const DEFAULT_KS: &str = "1,5,10";
const DEFAULT_TRAIN_PAIRS: usize = 160;
const DEFAULT_VAL_PAIRS: usize = 40;

fn writer(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> Result<()> {
    w.flush().with_context(|| format!("writing {}", path.display()))
}

/// Writes `temp` through `f`; errors name the final path `shown`.
fn write_table<E>(temp: &Path, shown: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<(), E>) -> Result<()>
where
    E: std::error::Error + Send + Sync + 'static,
{
    let mut w = writer(temp)?;
    f(&mut w).with_context(|| format!("writing {}", shown.display()))?;
    finish(w, shown)
}

fn read_paragraphs(path: &Path) -> Result<Vec<Paragraph>> {
    corpus::read_paragraphs(path).with_context(|| format!("reading paragraphs {}", path.display()))
}

/// Paragraphs from the risk sections only, the scope of every scoring step.
fn risk_paragraphs(path: &Path) -> Result<Vec<Paragraph>> {
    let paragraphs: Vec<Paragraph> = read_paragraphs(path)?
        .into_iter()
        .filter(|p| RISK_SECTIONS.contains(&p.id.section.as_str()))
        .collect();
    if paragraphs.is_empty() {
        bail!("no Item 1A or 7A paragraphs in {}", path.display());
    }
    Ok(paragraphs)
}

fn load_model(path: &Path) -> Result<Model> {
    Model::load(path).with_context(|| format!("loading model {}", path.display()))
}

/// The embedding index, from `embeddings` when given (and built by the same
/// model) or by encoding `paragraphs`.
fn load_index(model: &Model, paragraphs: &[Paragraph], embeddings: Option<&Path>) -> Result<EmbeddingIndex> {
    match embeddings {
        Some(path) => {
            let index = EmbeddingIndex::load(path).with_context(|| format!("loading embeddings {}", path.display()))?;
            if index.fingerprint() != model.fingerprint() {
                bail!("embeddings {} were built by a different model", path.display());
            }
            Ok(index)
        }
        None => Ok(scoring::embed_corpus(model, &group_by_firm(paragraphs))?),
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<T>().map_err(|e| anyhow!("invalid {key} entry `{v}`: {e}")))
        .collect()
}

pub fn ingest(s: &Settings, out: Option<PathBuf>) -> Result<()> {
    let root = s.require_path("root")?;
    let sections: Vec<String> = parse_list("sections", s.get("sections").unwrap_or("1A,7A"))?;
    let labels: Vec<&str> = sections.iter().map(String::as_str).collect();
    let min_tokens = s.parse_or("min_tokens", DEFAULT_MIN_TOKENS)?;
    let out = s.artifact(out, "paragraphs.jsonl")?;

    let paragraphs = corpus::ingest(&root, &labels, min_tokens)
        .with_context(|| format!("ingesting filings under {}", root.display()))?;
    if paragraphs.is_empty() {
        bail!("no paragraphs found under {}", root.display());
    }
    let mut staging = Staging::new(&[&root]);
    let tmp = staging.file(&out)?;
    corpus::write_paragraphs(&tmp, &paragraphs).with_context(|| format!("writing {}", out.display()))?;
    staging.commit()?;
    println!("ingest: {} paragraphs -> {}", paragraphs.len(), out.display());
    Ok(())
}

fn parse_views(text: &str) -> Result<Vec<View>> {
    match text {
        "both" => Ok(vec![View::Chronological, View::Lexical]),
        "chrono" | "chronological" => Ok(vec![View::Chronological]),
        "lexical" => Ok(vec![View::Lexical]),
        other => bail!("invalid view `{other}`: expected chrono, lexical or both"),
    }
}

pub fn pairs(s: &Settings, input: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let input = s.artifact(input, "paragraphs.jsonl")?;
    let out = s.artifact(out, "pairs")?;
    let seed = s.seed()?;
    let views = parse_views(s.get("view").unwrap_or("both"))?;
    let train_count = s.parse_or("train", DEFAULT_TRAIN_PAIRS)?;
    let val_count = s.parse_or("val", DEFAULT_VAL_PAIRS)?;
    let min_tokens = s.parse_or("min_tokens", DEFAULT_MIN_TOKENS)?;
    let defaults = LexicalConfig::default();
    let lexical = LexicalConfig {
        min_span: s.parse_or("min_span", defaults.min_span)?,
        overlap_cap: s.parse_or("overlap_cap", defaults.overlap_cap)?,
        max_pairs_per_paragraph: s.parse_or("max_pairs_per_paragraph", defaults.max_pairs_per_paragraph)?,
    };

    let paragraphs = read_paragraphs(&input)?;
    let mut staging = Staging::new(&[&input]);
    let dir = staging.dir(&out, &["jsonl"])?;
    for view in views {
        let (all, split_seed) = match view {
            View::Chronological => (
                pairgen::build_chronological_pairs_all(&group_by_firm(&paragraphs), min_tokens),
                seed,
            ),
            View::Lexical => (
                pairgen::build_lexical_pairs(&paragraphs, seed, lexical).pairs,
                seed.wrapping_add(1),
            ),
        };
        let (train, val) = pairgen::split_train_val(&all, train_count, val_count, split_seed)?;
        for (split, pairs) in [("train", &train), ("val", &val)] {
            let path = pairgen::pair_file(&dir, view, split);
            pairgen::write_pairs(&path, pairs)?;
        }
        println!(
            "pairs: {view}: {} candidates, {} train, {} val",
            all.len(),
            train.len(),
            val.len()
        );
    }
    staging.commit()
}

/// Both views' pair files from `dir`, chronological first.
fn read_pair_dir(dir: &Path) -> Result<(Vec<PositivePair>, Vec<PositivePair>)> {
    let (mut train, mut val) = (Vec::new(), Vec::new());
    let mut found = false;
    for view in [View::Chronological, View::Lexical] {
        let t = pairgen::pair_file(dir, view, "train");
        let v = pairgen::pair_file(dir, view, "val");
        match (t.exists(), v.exists()) {
            (false, false) => continue,
            (true, true) => {}
            _ => bail!("{view} pairs in {} lack a train or val file", dir.display()),
        }
        found = true;
        train.extend(pairgen::read_pairs(&t)?);
        val.extend(pairgen::read_pairs(&v)?);
    }
    if !found {
        bail!("no pair files in {}", dir.display());
    }
    Ok((train, val))
}

pub fn train(s: &Settings, pairs: Option<PathBuf>, out: Option<PathBuf>, report: Option<PathBuf>) -> Result<()> {
    let dir = s.artifact(pairs, "pairs")?;
    let out = s.artifact(out, "model.bin")?;
    let report_path = s.artifact(report, "train_report.jsonl")?;
    s.seed()?;
    let mut config = TrainConfig::default();
    config.apply(&s.training())?;
    config.validate()?;

    let (train_pairs, val_pairs) = read_pair_dir(&dir)?;
    let (model, report) = training::train(&train_pairs, &val_pairs, &config)?;

    let mut staging = Staging::new(&[&dir]);
    let model_tmp = staging.file(&out)?;
    model
        .save(&model_tmp)
        .with_context(|| format!("writing {}", out.display()))?;
    let report_tmp = staging.file(&report_path)?;
    let mut w = writer(&report_tmp)?;
    report
        .write_jsonl(&mut w)
        .with_context(|| format!("writing {}", report_path.display()))?;
    finish(w, &report_path)?;
    staging.commit()?;
    let first = report.epochs.first().map_or(f64::NAN, |e| e.val_loss);
    println!(
        "train: {} epochs ({}), best epoch {} val loss {:.4} (epoch 1: {:.4}) -> {}",
        report.epochs.len(),
        report.stop_reason,
        report.best_epoch,
        report.best_val_loss,
        first,
        out.display()
    );
    Ok(())
}

pub fn embed(s: &Settings, model: Option<PathBuf>, input: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let model_path = s.artifact(model, "model.bin")?;
    let input = s.artifact(input, "paragraphs.jsonl")?;
    let out = s.artifact(out, "embeddings.bin")?;
    let model = load_model(&model_path)?;
    let paragraphs = risk_paragraphs(&input)?;
    let index = load_index(&model, &paragraphs, None)?;

    let mut staging = Staging::new(&[&model_path, &input]);
    let tmp = staging.file(&out)?;
    index.save(&tmp)?;
    staging.commit()?;
    println!(
        "embed: {} paragraphs over {} firms -> {}",
        index.len(),
        index.firms().len(),
        out.display()
    );
    Ok(())
}

pub fn score(
    s: &Settings,
    model: Option<PathBuf>,
    paragraphs: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    out_matrix: Option<PathBuf>,
    out_evidence: Option<PathBuf>,
) -> Result<()> {
    let model_path = s.artifact(model, "model.bin")?;
    let input = s.artifact(paragraphs, "paragraphs.jsonl")?;
    let out_matrix = s.artifact(out_matrix, "rrs.csv")?;
    let out_evidence = s.artifact(out_evidence, "evidence")?;
    let config = ScoreConfig::new(s.parse_or("threshold", DEFAULT_THRESHOLD)?)?;

    let model = load_model(&model_path)?;
    let paragraphs = risk_paragraphs(&input)?;
    let index = load_index(&model, &paragraphs, embeddings.as_deref())?;
    let firms = index.firm_ids();
    let results = scoring::pairwise_mrps(&index, &firms, config.threshold)?;
    let matrix = RrsMatrix::from_results(&firms, &results)?;
    let by_id: BTreeMap<&ParagraphId, &Paragraph> = paragraphs.iter().map(|p| (&p.id, p)).collect();

    let mut inputs: Vec<&Path> = vec![&model_path, &input];
    if let Some(e) = embeddings.as_deref() {
        inputs.push(e);
    }
    let mut staging = Staging::new(&inputs);
    let tmp = staging.file(&out_matrix)?;
    write_table(&tmp, &out_matrix, |w| matrix.write_csv(w))?;
    let dir = staging.dir(&out_evidence, &["json"])?;
    for r in &results {
        let report = scoring::evidence_report(r, |id| by_id.get(id).copied())?;
        let path = dir.join(scoring::evidence_file_name(&r.firm_a, &r.firm_b));
        fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    staging.commit()?;
    println!(
        "score: {} firms, {} pairs at threshold {} -> {}, {}",
        firms.len(),
        results.len(),
        config.threshold,
        out_matrix.display(),
        out_evidence.display()
    );
    Ok(())
}

fn read_ranked_lists(path: &Path) -> Result<Vec<RankedList>> {
    let f = File::open(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lists = Vec::new();
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        let list = serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), n + 1))?;
        lists.push(list);
    }
    Ok(lists)
}

pub fn read_matrix(path: &Path) -> Result<RrsMatrix> {
    let f = File::open(path).with_context(|| format!("reading RRS matrix {}", path.display()))?;
    RrsMatrix::read_csv(f).with_context(|| format!("reading RRS matrix {}", path.display()))
}

pub fn evaluate(s: &Settings, rrs: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let rrs_path = s.artifact(rrs, "rrs.csv")?;
    let prices = s.require_path("prices")?;
    let gics_path = s.path("gics");
    let retrieval_path = s.path("retrieval");
    let ks: Vec<usize> = parse_list("ks", s.get("ks").unwrap_or(DEFAULT_KS))?;
    let out = s.artifact(out, "eval")?;

    let matrix = read_matrix(&rrs_path)?;
    let returns = eval::load_return_dir(&prices)?;
    let gics = gics_path.as_deref().map(GicsMapping::load).transpose()?;
    let lists = match retrieval_path.as_deref() {
        Some(p) => read_ranked_lists(p)?,
        None => Vec::new(),
    };
    let evaluation = eval::evaluate(&matrix, &returns, gics.as_ref(), &lists, &ks)?;

    let mut inputs: Vec<&Path> = vec![&rrs_path, &prices];
    inputs.extend(gics_path.as_deref());
    inputs.extend(retrieval_path.as_deref());
    let mut staging = Staging::new(&inputs);
    let dir = staging.dir(&out, &["csv", "md", "json"])?;
    write_table(&dir.join("pairs.csv"), &out.join("pairs.csv"), |w| {
        evaluation.write_pairs_csv(w)
    })?;
    write_table(&dir.join("metrics.csv"), &out.join("metrics.csv"), |w| {
        evaluation.summary.write_metrics_csv(w)
    })?;
    if !evaluation.summary.retrieval.is_empty() {
        write_table(&dir.join("retrieval.csv"), &out.join("retrieval.csv"), |w| {
            eval::write_retrieval_csv(&evaluation.summary.retrieval, w)
        })?;
    }
    fs::write(dir.join("summary.md"), evaluation.summary.to_markdown())
        .with_context(|| format!("writing {}", out.join("summary.md").display()))?;
    let json = serde_json::to_string_pretty(&evaluation.summary)? + "\n";
    fs::write(dir.join("summary.json"), json)
        .with_context(|| format!("writing {}", out.join("summary.json").display()))?;
    staging.commit()?;
    let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"));
    println!(
        "evaluate: rho {} over {} pairs ({} excluded) -> {}",
        fmt(evaluation.summary.rho),
        evaluation.summary.pairs_used,
        evaluation.summary.pairs_excluded,
        out.display()
    );
    Ok(())
}

pub fn sweep(
    s: &Settings,
    model: Option<PathBuf>,
    paragraphs: Option<PathBuf>,
    embeddings: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<()> {
    let model_path = s.artifact(model, "model.bin")?;
    let input = s.artifact(paragraphs, "paragraphs.jsonl")?;
    let out = s.artifact(out, "sweep.csv")?;
    let grid = eval::parse_grid(s.get("grid").unwrap_or(DEFAULT_GRID))?;
    let prices = s.path("prices");

    let model = load_model(&model_path)?;
    let paragraphs = risk_paragraphs(&input)?;
    let index = load_index(&model, &paragraphs, embeddings.as_deref())?;
    let returns = prices.as_deref().map(eval::load_return_dir).transpose()?;
    let rows = eval::threshold_sweep(&index, &index.firm_ids(), &grid, returns.as_ref())?;

    let mut inputs: Vec<&Path> = vec![&model_path, &input];
    inputs.extend(embeddings.as_deref());
    inputs.extend(prices.as_deref());
    let mut staging = Staging::new(&inputs);
    let tmp = staging.file(&out)?;
    write_table(&tmp, &out, |w| eval::write_sweep_csv(&rows, w))?;
    staging.commit()?;
    println!("sweep: {} thresholds -> {}", rows.len(), out.display());
    Ok(())
}
