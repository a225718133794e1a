//! The committed synthetic fixture matches what the generator produces.

use std::path::Path;

use riskrel::corpus::{group_by_firm, ingest, RISK_SECTIONS};
use riskrel::synth::{self, DEFAULT_SEED, FIRM_PROFILES, PLANTED_MARKER};

fn fixture_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/synthetic"))
}

#[test]
fn committed_fixture_is_current() {
    let stale = synth::generate(DEFAULT_SEED).diff(fixture_dir());
    assert!(
        stale.is_empty(),
        "fixture out of date, rerun `cargo run -p riskrel --example gen_fixture`: {stale:?}"
    );
}

#[test]
fn fixture_ingests_for_every_firm() {
    let paragraphs = ingest(&fixture_dir().join("filings"), &RISK_SECTIONS, 20).unwrap();
    let corpora = group_by_firm(&paragraphs);
    assert_eq!(corpora.len(), FIRM_PROFILES.len());
    let (a, b) = synth::planted_pair();
    for firm in [a, b] {
        let corpus = corpora.iter().find(|c| c.firm_id == firm).unwrap();
        assert!(corpus.paragraphs.iter().any(|p| p.text.contains(PLANTED_MARKER)));
    }
    let others = corpora.iter().filter(|c| c.firm_id != a && c.firm_id != b);
    for corpus in others {
        assert!(corpus.paragraphs.iter().all(|p| !p.text.contains(PLANTED_MARKER)));
    }
}
