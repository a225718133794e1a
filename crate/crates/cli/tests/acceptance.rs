//! Acceptance suite.
//!
//! Every criterion runs inside one test so the pass/fail lines print
//! together, in order, whether or not the test harness captures output.
//! The test fails if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskrel::corpus::{FirmCorpus, Paragraph, ParagraphId};
use riskrel::encoder::{EmbeddingVector, EncoderParams};
use riskrel::eval::{
    alignment_rho, cavdsr, gics_binary_rrs, parse_grid, score_list, threshold_sweep, GicsEntry, GicsLevel, GicsMapping,
    PairRecord, RankedList, ReturnSeries,
};
use riskrel::pairgen::{build_chronological_pairs, find_dates, PositivePair, View};
use riskrel::scoring::{find_mrps, pairwise_mrps, EmbeddingIndex, EvidenceReport, FirmEmbeddings};
use riskrel::training::{compute_gradients, info_nce_loss, TrainingBatch};

type Outcome = Result<String, String>;

const GRID: &str = "0.6:0.9:0.05";

fn say(line: &str) {
    let mut err = std::io::stderr();
    let _ = err.write_all(format!("{line}\n").as_bytes());
    let _ = err.flush();
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic")
}

fn config() -> PathBuf {
    fixture_dir().join("pipeline.conf")
}

/// Runs the CLI with the fixture config and `workdir`.
fn riskrel(workdir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_riskrel"))
        .arg("--config")
        .arg(config())
        .arg("--workdir")
        .arg(workdir)
        .args(args)
        .output()
        .map_err(|e| format!("spawning riskrel: {e}"))?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "riskrel {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn full_pipeline(workdir: &Path) -> Result<(), String> {
    for step in [
        "ingest", "pairs", "train", "embed", "score", "evaluate", "sweep", "report",
    ] {
        riskrel(workdir, &[step])?;
    }
    Ok(())
}

/// Relative path to contents for every file under `root`.
fn tree(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<PathBuf, Vec<u8>>) {
        let mut entries: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.insert(p.strip_prefix(root).unwrap().to_path_buf(), fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn pid(firm: &str, ordinal: u32) -> ParagraphId {
    ParagraphId {
        firm: firm.to_string(),
        year: 2020,
        section: "1A".to_string(),
        ordinal,
    }
}

/// A random index of 2 to 6 firms with 1 to 20 paragraphs each. Vectors are
/// drawn near a few shared centres so that many cross pairs land in the
/// threshold range.
fn random_index(rng: &mut ChaCha8Rng, max_paragraphs: usize) -> (EmbeddingIndex, Vec<String>) {
    let dim = rng.random_range(2..=6);
    let centres: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let n_firms = rng.random_range(2..=6);
    let mut firms = Vec::new();
    for f in 0..n_firms {
        let firm_id = format!("F{f}");
        let n = rng.random_range(1..=max_paragraphs);
        let entries = (0..n)
            .map(|k| {
                let c = &centres[rng.random_range(0..centres.len())];
                let spread = rng.random_range(0.05..0.8);
                let mut v: Vec<f64> = c.iter().map(|x| x + rng.random_range(-spread..spread)).collect();
                if v.iter().all(|x| x.abs() < 1e-9) {
                    v[0] = 1.0;
                }
                (pid(&firm_id, k as u32), EmbeddingVector::new(v))
            })
            .collect();
        firms.push(FirmEmbeddings { firm_id, entries });
    }
    let ids = firms.iter().map(|f| f.firm_id.clone()).collect();
    (EmbeddingIndex::new(firms, "test".into(), 256).unwrap(), ids)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pairs = 0usize;
    let instances = 1000;
    for _ in 0..instances {
        let (index, firms) = random_index(&mut rng, 20);
        let xi = rng.random_range(0.0..1.0);
        for (k, a) in firms.iter().enumerate() {
            for b in &firms[k + 1..] {
                let ab = find_mrps(&index, a, b, xi).map_err(|e| e.to_string())?.rrs;
                let ba = find_mrps(&index, b, a, xi).map_err(|e| e.to_string())?.rrs;
                ensure(ab == ba, || format!("rrs({a},{b})={ab} but rrs({b},{a})={ba}"))?;
                ensure((0.0..=1.0).contains(&ab), || format!("rrs({a},{b})={ab} out of bounds"))?;
                pairs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("{instances} corpora, {pairs} firm pairs, {elapsed:.2?}"))
}

type Brute = (
    BTreeSet<ParagraphId>,
    BTreeSet<ParagraphId>,
    BTreeSet<(ParagraphId, ParagraphId)>,
);

fn brute_force(index: &EmbeddingIndex, a: &str, b: &str, xi: f64) -> Brute {
    let fa = index.firm(a).unwrap();
    let fb = index.firm(b).unwrap();
    let mut ma = BTreeSet::new();
    let mut mb = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    for (ia, va) in &fa.entries {
        for (ib, vb) in &fb.entries {
            let (u, v) = (va.values(), vb.values());
            let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
            let uu: f64 = u.iter().map(|x| x * x).sum();
            let vv: f64 = v.iter().map(|x| x * x).sum();
            let cos = (dot / (uu * vv).sqrt()).clamp(-1.0, 1.0);
            if cos >= xi {
                ma.insert(ia.clone());
                mb.insert(ib.clone());
                pairs.insert((ia.clone(), ib.clone()));
            }
        }
    }
    (ma, mb, pairs)
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut nonempty = 0usize;
    let instances = 200;
    for _ in 0..instances {
        let (index, firms) = random_index(&mut rng, 20);
        let xi = rng.random_range(0.3..0.99);
        let a = &firms[0];
        let b = &firms[1];
        let got = find_mrps(&index, a, b, xi).map_err(|e| e.to_string())?;
        let (ma, mb, pairs) = brute_force(&index, a, b, xi);
        let evidence: BTreeSet<_> = got.evidence.iter().map(|e| (e.id_a.clone(), e.id_b.clone())).collect();
        ensure(
            got.mrps_a == ma && got.mrps_b == mb && evidence == pairs && got.evidence.len() == pairs.len(),
            || format!("MRP sets differ from the brute-force loop at xi={xi}"),
        )?;
        let expected = (ma.len() + mb.len()) as f64 / (got.n_a + got.n_b) as f64;
        ensure(got.rrs == expected, || format!("rrs {} vs {expected}", got.rrs))?;
        nonempty += usize::from(!ma.is_empty());
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!("{instances} instances, {nonempty} with MRPs, {elapsed:.2?}"))
}

fn criterion_3(workdir: &Path) -> Outcome {
    let grid = parse_grid(GRID).map_err(|e| e.to_string())?;
    ensure(grid.len() == 7, || format!("grid has {} points", grid.len()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let instances = 300;
    for _ in 0..instances {
        let (index, firms) = random_index(&mut rng, 20);
        let rows = threshold_sweep(&index, &firms, &grid, None).map_err(|e| e.to_string())?;
        ensure(rows.len() == 7, || format!("sweep has {} rows", rows.len()))?;
        for w in rows.windows(2) {
            ensure(
                w[1].total_mrps <= w[0].total_mrps && w[1].mean_rrs <= w[0].mean_rrs,
                || format!("sweep increases between {} and {}", w[0].threshold, w[1].threshold),
            )?;
        }
        let per_pair: Vec<Vec<f64>> = grid
            .iter()
            .map(|&xi| {
                pairwise_mrps(&index, &firms, xi)
                    .unwrap()
                    .iter()
                    .map(|r| r.rrs)
                    .collect()
            })
            .collect();
        for w in per_pair.windows(2) {
            ensure(w[1].iter().zip(&w[0]).all(|(hi, lo)| hi <= lo), || {
                "a firm-pair RRS increases with the threshold".to_string()
            })?;
        }
    }
    let text = fs::read_to_string(workdir.join("sweep.csv")).map_err(|e| format!("reading sweep.csv: {e}"))?;
    let rows = text.lines().skip(1).filter(|l| !l.is_empty()).count();
    ensure(rows == 7, || format!("sweep.csv has {rows} rows"))?;
    Ok(format!(
        "{instances} random instances monotone, pipeline sweep.csv has {rows} rows"
    ))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst_uniform: f64 = 0.0;
    for b in 1..=16usize {
        for s in [-1.0, -0.3, 0.0, 0.42, 1.0] {
            let loss = info_nce_loss(&vec![vec![s; b]; b], 0.05).map_err(|e| e.to_string())?;
            worst_uniform = worst_uniform.max((loss - (b as f64).ln()).abs());
        }
    }
    ensure(worst_uniform <= 1e-12, || {
        format!("uniform batch off ln B by {worst_uniform:e}")
    })?;

    let closed = info_nce_loss(&[vec![0.9, 0.1], vec![0.1, 0.9]], 0.05).map_err(|e| e.to_string())?;
    let expected = (-16.0f64).exp().ln_1p();
    ensure((closed - expected).abs() <= 1e-12, || {
        format!("closed form {closed:e} vs {expected:e}")
    })?;

    let (vocab, dim, b, max_len, tau, l2) = (12usize, 8usize, 4usize, 256usize, 0.5, 1e-3);
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let trials = 20;
    for t in 0..trials {
        let params = EncoderParams::init(vocab, dim, 100 + t);
        let mut ids = || -> Vec<u32> {
            let n = rng.random_range(1..=5);
            (0..n).map(|_| rng.random_range(1..vocab as u32)).collect()
        };
        let batch = TrainingBatch {
            anchors: (0..b).map(|_| ids()).collect(),
            positives: (0..b).map(|_| ids()).collect(),
        };
        let analytic = compute_gradients(&params, &batch, tau, l2, max_len).map_err(|e| e.to_string())?;
        let objective = |p: &EncoderParams| compute_gradients(p, &batch, tau, l2, max_len).unwrap().objective;
        let mut check = |analytic: f64, numeric: f64| {
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6);
            worst = worst.max(rel);
        };
        for k in 0..params.proj_w.len() {
            let mut hi = params.clone();
            let mut lo = params.clone();
            hi.proj_w[k] += h;
            lo.proj_w[k] -= h;
            check(analytic.grads.proj_w[k], (objective(&hi) - objective(&lo)) / (2.0 * h));
        }
        for k in 0..params.proj_b.len() {
            let mut hi = params.clone();
            let mut lo = params.clone();
            hi.proj_b[k] += h;
            lo.proj_b[k] -= h;
            check(analytic.grads.proj_b[k], (objective(&hi) - objective(&lo)) / (2.0 * h));
        }
        for &row in &analytic.grads.touched {
            for c in 0..dim {
                let k = row as usize * dim + c;
                let mut hi = params.clone();
                let mut lo = params.clone();
                hi.embed[k] += h;
                lo.embed[k] -= h;
                check(analytic.grads.embed[k], (objective(&hi) - objective(&lo)) / (2.0 * h));
            }
        }
    }
    ensure(worst <= 1e-4, || format!("gradient relative error {worst:e}"))?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "ln B off by {worst_uniform:.1e}, closed form off by {:.1e}, max grad rel err {worst:.1e} over {trials} batches, {elapsed:.2?}",
        (closed - expected).abs()
    ))
}

fn criterion_5(workdir: &Path) -> Outcome {
    let start = Instant::now();
    for step in ["ingest", "pairs", "train"] {
        riskrel(workdir, &[step])?;
    }
    let elapsed = start.elapsed();
    let text = fs::read_to_string(workdir.join("train_report.jsonl")).map_err(|e| e.to_string())?;
    let records: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let epochs: Vec<&serde_json::Value> = records.iter().filter(|r| r["kind"] == "epoch").collect();
    let summary = records
        .iter()
        .find(|r| r["kind"] == "summary")
        .ok_or("no summary record")?;
    let epoch1 = epochs.first().ok_or("no epochs")?["val_loss"].as_f64().unwrap();
    let best_epoch = summary["best_epoch"].as_u64().unwrap() as usize;
    let best = summary["best_val_loss"].as_f64().unwrap();
    let margin = epochs[best_epoch - 1]["val_margin"].as_f64().unwrap();
    ensure(epochs.len() <= 50, || format!("{} epochs", epochs.len()))?;
    let last = epochs.last().unwrap()["val_loss"].as_f64().unwrap();
    for (what, loss) in [("best", best), ("last-epoch", last)] {
        ensure(loss < 0.5 * epoch1, || {
            format!("{what} val loss {loss:.4} is not below half of epoch-1 {epoch1:.4}")
        })?;
    }
    ensure(margin >= 0.2, || format!("similarity margin {margin:.4} < 0.2"))?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "val loss {epoch1:.4} -> best {best:.4} (ratio {:.3}), last {last:.4}, margin {margin:.4}, {} epochs, {elapsed:.2?}",
        best / epoch1,
        epochs.len()
    ))
}

fn criterion_6(workdir: &Path) -> Outcome {
    let start = Instant::now();
    for step in ["embed", "score"] {
        riskrel(workdir, &[step])?;
    }
    let elapsed = start.elapsed();
    let (pa, pb) = riskrel::synth::planted_pair();
    let text = fs::read_to_string(workdir.join("rrs.csv")).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    let firms: Vec<&str> = lines.next().ok_or("empty rrs.csv")?.split(',').skip(1).collect();
    let mut scores = Vec::new();
    for (i, line) in lines.enumerate() {
        let values: Vec<f64> = line.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
        for (j, &v) in values.iter().enumerate().skip(i + 1) {
            scores.push((firms[i], firms[j], v));
        }
    }
    let is_planted = |a: &str, b: &str| (a, b) == (pa, pb) || (a, b) == (pb, pa);
    let planted = scores
        .iter()
        .find(|s| is_planted(s.0, s.1))
        .ok_or("planted pair missing")?
        .2;
    let runner_up = scores
        .iter()
        .filter(|s| !is_planted(s.0, s.1))
        .map(|s| s.2)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(planted > runner_up, || {
        format!("planted RRS {planted:.6} is not above the runner-up {runner_up:.6}")
    })?;
    let path = workdir
        .join("evidence")
        .join(riskrel::scoring::evidence_file_name(pa, pb));
    let report: EvidenceReport =
        serde_json::from_str(&fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let marker = riskrel::synth::PLANTED_MARKER;
    let hits = report
        .entries
        .iter()
        .filter(|e| e.a.text.contains(marker) && e.b.text.contains(marker))
        .count();
    ensure(hits >= 1, || "no planted paragraph pair in the evidence".to_string())?;
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{pa}-{pb} RRS {planted:.6} vs runner-up {runner_up:.6}, {hits} planted evidence pairs, {elapsed:.2?}"
    ))
}

fn read_pair_file(path: &Path) -> Result<Vec<PositivePair>, String> {
    riskrel::pairgen::read_pairs(path).map_err(|e| e.to_string())
}

fn criterion_7(workdir: &Path, scratch: &Path) -> Outcome {
    let dir = workdir.join("pairs");
    let mut chrono = Vec::new();
    let mut lexical = Vec::new();
    for split in ["train", "val"] {
        chrono.extend(read_pair_file(&riskrel::pairgen::pair_file(
            &dir,
            View::Chronological,
            split,
        ))?);
        lexical.extend(read_pair_file(&riskrel::pairgen::pair_file(
            &dir,
            View::Lexical,
            split,
        ))?);
    }
    ensure(!chrono.is_empty() && !lexical.is_empty(), || {
        "a view produced no pairs".to_string()
    })?;
    for p in &chrono {
        ensure(p.view == View::Chronological, || "wrong view tag".to_string())?;
        for side in [&p.left_tokens, &p.right_tokens] {
            ensure(find_dates(side).is_empty(), || {
                format!("date left in pair {:?}", p.provenance)
            })?;
        }
    }

    let text = |extra: &str| {
        format!("the company reported results for the period ended {extra} and noted continued pressure on suppliers and margins across all segments of the business")
    };
    let corpus = FirmCorpus {
        firm_id: "ACME".into(),
        paragraphs: vec![
            Paragraph::new(pid("ACME", 1), text("March 31, 2020")),
            Paragraph::new(pid("ACME", 2), text("3/31/2020")),
        ],
    };
    ensure(build_chronological_pairs(&corpus, 5).is_empty(), || {
        "accounting-date overlap produced a pair".to_string()
    })?;
    let control = FirmCorpus {
        firm_id: "ACME".into(),
        paragraphs: vec![
            Paragraph::new(pid("ACME", 1), text("April 14, 2020")),
            Paragraph::new(pid("ACME", 2), text("4/14/2020")),
        ],
    };
    ensure(build_chronological_pairs(&control, 5).len() == 1, || {
        "a shared non-accounting date did not pair".to_string()
    })?;

    let paragraphs = riskrel::corpus::read_paragraphs(&workdir.join("paragraphs.jsonl")).map_err(|e| e.to_string())?;
    let by_id: BTreeMap<String, &Paragraph> = paragraphs.iter().map(|p| (p.id.to_string(), p)).collect();
    for p in &lexical {
        let source = by_id.get(&p.provenance[0]).ok_or("lexical pair with unknown source")?;
        let tokens = &source.tokens;
        let draw = p.seed_info.ok_or("lexical pair without its draw")?;
        let (i, j, n) = (draw.i, draw.j, tokens.len());
        ensure(1 <= i && i < j && j <= n, || format!("bad draw {i},{j} for n={n}"))?;
        ensure(
            p.left_tokens[..] == tokens[..j] && p.right_tokens[..] == tokens[i - 1..],
            || format!("pair from {} is not prefix/suffix", p.provenance[0]),
        )?;
        let overlap = j - i + 1;
        ensure(
            p.left_tokens[p.left_tokens.len() - overlap..] == p.right_tokens[..overlap],
            || "spans do not overlap on w_i..w_j".to_string(),
        )?;
    }

    let again = scratch.join("pairs-again");
    for k in 0..2 {
        riskrel(
            workdir,
            &["pairs", "--out", again.join(k.to_string()).to_str().unwrap()],
        )?;
    }
    let first = tree(&again.join("0"));
    ensure(
        !first.is_empty() && first == tree(&again.join("1")) && first == tree(&dir),
        || "pair regeneration is not byte-identical".to_string(),
    )?;
    Ok(format!(
        "{} chronological pairs date-free, accounting-only overlap yields none, {} lexical pairs well formed, regeneration identical",
        chrono.len(),
        lexical.len()
    ))
}

fn criterion_8() -> Outcome {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let dates: Vec<NaiveDate> = (0..60).map(|d| start + chrono::Days::new(d)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let returns: Vec<f64> = (0..60).map(|_| rng.random_range(-0.05..0.05)).collect();
    let a = ReturnSeries {
        firm_id: "A".into(),
        dates: dates.clone(),
        returns: returns.clone(),
    };
    let neg = ReturnSeries {
        firm_id: "B".into(),
        dates,
        returns: returns.iter().map(|r| -r).collect(),
    };
    let c = cavdsr(&a, &neg).map_err(|e| e.to_string())?;
    ensure(c == 1.0, || format!("cavdsr(a, -a) = {c:e}"))?;

    let list = RankedList {
        query_id: "q".into(),
        ranked: ["d1", "r1", "r2", "d2"].map(String::from).to_vec(),
        relevant: ["r1", "r2"].map(String::from).to_vec(),
    };
    let row = score_list(&list, 3).map_err(|e| e.to_string())?;
    let ndcg = (1.0 / 3f64.log2() + 0.5) / (1.0 + 1.0 / 3f64.log2());
    ensure(
        (row.ndcg - ndcg).abs() <= 1e-6 && (row.ndcg - 0.6934).abs() < 5e-5,
        || format!("NDCG@3 = {}", row.ndcg),
    )?;
    ensure((row.precision - 2.0 / 3.0).abs() < 1e-12 && row.recall == 1.0, || {
        format!("P@3 = {}, R@3 = {}", row.precision, row.recall)
    })?;

    let records: Vec<PairRecord> = (0..12)
        .map(|k| {
            let rrs = rng.random_range(0.0..1.0);
            PairRecord {
                firm_a: format!("A{k}"),
                firm_b: format!("B{k}"),
                rrs,
                cavdsr: 0.3 + 2.0 * rrs,
            }
        })
        .collect();
    let rho = alignment_rho(&records).map_err(|e| e.to_string())?;
    ensure((rho - 1.0).abs() <= 1e-12, || format!("rho = {rho:e}"))?;

    let sectors = [
        "Tech", "Tech", "Tech", "Health", "Health", "Energy", "Energy", "Energy", "Finance", "Tech",
    ];
    let industries = [
        "Semis", "Semis", "Software", "Pharma", "Devices", "Oil", "Oil", "Gas", "Banks", "Software",
    ];
    let entries: Vec<GicsEntry> = (0..10)
        .map(|k| GicsEntry {
            ticker: format!("T{k}"),
            sector: sectors[k].into(),
            industry: industries[k].into(),
        })
        .collect();
    let mapping = GicsMapping::from_entries(entries.clone());
    let mut checked = 0;
    for x in &entries {
        for y in &entries {
            for (level, same) in [
                (GicsLevel::Sector, x.sector == y.sector),
                (GicsLevel::Industry, x.industry == y.industry),
            ] {
                let got = gics_binary_rrs(&mapping, &x.ticker, &y.ticker, level).map_err(|e| e.to_string())?;
                ensure(got == u8::from(same), || {
                    format!("{} {} {level:?}: {got}", x.ticker, y.ticker)
                })?;
                checked += 1;
            }
        }
    }
    ensure(
        gics_binary_rrs(&mapping, "T0", "ZZZ", GicsLevel::Sector).is_err(),
        || "unknown ticker accepted".to_string(),
    )?;
    Ok(format!(
        "cavdsr(a,-a) = {c}, NDCG@3 = {:.6}, rho = {rho:.15}, {checked} GICS checks",
        row.ndcg
    ))
}

fn criterion_9(first: &Path, scratch: &Path) -> Outcome {
    let before = tree(&fixture_dir());
    let second = scratch.join("second");
    full_pipeline(&second)?;
    let (a, b) = (tree(first), tree(&second));
    ensure(tree(&fixture_dir()) == before, || {
        "the fixture inputs changed".to_string()
    })?;
    let differing: Vec<String> = a
        .keys()
        .chain(b.keys())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .filter(|k| a.get(*k) != b.get(*k))
        .map(|k| k.display().to_string())
        .collect();
    ensure(differing.is_empty(), || {
        format!("artifacts differ: {}", differing.join(", "))
    })?;
    ensure(a.keys().any(|k| k.ends_with("report.md")), || {
        "no report.md".to_string()
    })?;
    Ok(format!("{} artifacts byte-identical across two runs", a.len()))
}

#[test]
fn acceptance() {
    let scratch = tempfile::tempdir().unwrap();
    let workdir = scratch.path().join("run");

    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 RRS symmetry and bounds", criterion_1()),
        ("2 MRP oracle equivalence", criterion_2()),
        ("4 InfoNCE correctness", criterion_4()),
        ("8 metric correctness", criterion_8()),
        ("5 training efficacy", criterion_5(&workdir)),
        ("6 planted-risk recovery", criterion_6(&workdir)),
    ];
    let rest = ["evaluate", "sweep", "report"]
        .iter()
        .try_for_each(|step| riskrel(&workdir, &[step]));
    results.push((
        "3 threshold monotonicity",
        rest.clone().and_then(|_| criterion_3(&workdir)),
    ));
    results.push(("7 pair contracts", criterion_7(&workdir, scratch.path())));
    results.push((
        "9 determinism",
        rest.and_then(|_| criterion_9(&workdir, scratch.path())),
    ));
    results.sort_by_key(|r| r.0.split(' ').next().unwrap().parse::<u32>().unwrap());

    let mut failed = Vec::new();
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => say(&format!("PASS criterion {name}: {detail}")),
            Err(why) => {
                say(&format!("FAIL criterion {name}: {why}"));
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join(", "));
}
