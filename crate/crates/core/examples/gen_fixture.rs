//! Writes the bundled synthetic corpus to a directory.
//!
//! `cargo run -p riskrel --example gen_fixture -- fixtures/synthetic [seed]`

use std::path::PathBuf;

fn main() {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "fixtures/synthetic".into()));
    let seed = args
        .next()
        .map(|s| s.parse().expect("seed must be an unsigned integer"))
        .unwrap_or(riskrel::synth::DEFAULT_SEED);
    let fixture = riskrel::synth::generate(seed);
    fixture.write(&dir).expect("writing fixture");
    println!("{} files -> {}", fixture.files.len(), dir.display());
}
