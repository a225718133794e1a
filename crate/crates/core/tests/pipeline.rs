//! Library-level run over the synthetic fixture: ingest, pairs, a short
//! training run, embedding, scoring and evaluation.

use std::path::Path;

use riskrel::corpus::{group_by_firm, ingest, RISK_SECTIONS};
use riskrel::encoder::Model;
use riskrel::eval::{evaluate, load_return_dir, parse_grid, threshold_sweep, GicsMapping};
use riskrel::pairgen::{build_chronological_pairs_all, build_lexical_pairs, split_train_val, LexicalConfig};
use riskrel::scoring::{embed_corpus, rrs_matrix, EmbeddingIndex};
use riskrel::training::{train, TrainConfig};

fn fixture_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/synthetic"))
}

#[test]
fn short_run_produces_consistent_artifacts() {
    let dir = fixture_dir();
    let paragraphs = ingest(&dir.join("filings"), &RISK_SECTIONS, 20).unwrap();
    let corpora = group_by_firm(&paragraphs);

    let chrono = build_chronological_pairs_all(&corpora, 20);
    let lexical = build_lexical_pairs(&paragraphs, 7, LexicalConfig::default()).pairs;
    let (mut train_pairs, mut val_pairs) = split_train_val(&chrono, 60, 20, 7).unwrap();
    let (lt, lv) = split_train_val(&lexical, 60, 20, 8).unwrap();
    train_pairs.extend(lt);
    val_pairs.extend(lv);

    let config = TrainConfig {
        max_epochs: 3,
        dim: 16,
        seed: 7,
        ..TrainConfig::default()
    };
    let (model, report) = train(&train_pairs, &val_pairs, &config).unwrap();
    assert_eq!(report.epochs.len(), 3);
    assert!(report.epochs.iter().all(|e| e.val_loss.is_finite()));
    assert!(report.best_val_loss <= report.epochs[0].val_loss);

    let restored = Model::from_bytes(&model.to_bytes()).unwrap();
    assert_eq!(restored.fingerprint(), model.fingerprint());

    let index = embed_corpus(&model, &corpora).unwrap();
    let mut bytes = Vec::new();
    index.write(&mut bytes).unwrap();
    assert_eq!(EmbeddingIndex::read(bytes.as_slice()).unwrap(), index);

    let firms = index.firm_ids();
    let matrix = rrs_matrix(&index, &firms, 0.75).unwrap();
    for (i, row) in matrix.values.iter().enumerate() {
        assert_eq!(row[i], 1.0);
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, matrix.values[j][i]);
            assert!((0.0..=1.0).contains(v));
        }
    }

    let returns = load_return_dir(&dir.join("prices")).unwrap();
    let gics = GicsMapping::load(&dir.join("gics.csv")).unwrap();
    let evaluation = evaluate(&matrix, &returns, Some(&gics), &[], &[1, 5]).unwrap();
    assert_eq!(evaluation.summary.pairs_used, firms.len() * (firms.len() - 1) / 2);

    let grid = parse_grid("0.6:0.9:0.05").unwrap();
    let rows = threshold_sweep(&index, &firms, &grid, Some(&returns)).unwrap();
    assert_eq!(rows.len(), 7);
    let at_default = rows.iter().find(|r| (r.threshold - 0.75).abs() < 1e-12).unwrap();
    let mean = matrix.pairs().iter().map(|p| p.2).sum::<f64>() / matrix.pairs().len() as f64;
    assert!((at_default.mean_rrs - mean).abs() < 1e-12);
}
