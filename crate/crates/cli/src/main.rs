//! `riskrel`: ingest filings, mine positive pairs, train the encoder, score
//! firm pairs and evaluate the scores, one subcommand per stage.

mod commands;
mod config;
mod report;
mod staging;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Settings;

#[derive(Parser, Debug)]
#[command(
    name = "riskrel",
    version,
    about = "Inter-firm risk relations from annual-report text"
)]
struct Cli {
    /// Flat `key = value` file; every key can also be passed as a flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory that holds artifacts whose paths are not given explicitly.
    #[arg(long, global = true)]
    workdir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CorpusArgs {
    /// Filing root laid out as `<root>/<ticker>/<year>.txt`.
    #[arg(long)]
    root: Option<PathBuf>,
    /// Comma-separated section labels.
    #[arg(long)]
    sections: Option<String>,
    #[arg(long = "min_tokens", visible_alias = "min-tokens")]
    min_tokens: Option<String>,
}

#[derive(Args, Debug, Default)]
struct PairArgs {
    #[arg(long)]
    seed: Option<String>,
    /// chrono, lexical or both.
    #[arg(long)]
    view: Option<String>,
    /// Training pairs per view.
    #[arg(long)]
    train: Option<String>,
    /// Validation pairs per view.
    #[arg(long)]
    val: Option<String>,
    #[arg(long = "min_tokens", visible_alias = "min-tokens")]
    min_tokens: Option<String>,
    #[arg(long = "min_span", visible_alias = "min-span")]
    min_span: Option<String>,
    #[arg(long = "overlap_cap", visible_alias = "overlap-cap")]
    overlap_cap: Option<String>,
    #[arg(long = "max_pairs_per_paragraph", visible_alias = "max-pairs-per-paragraph")]
    max_pairs_per_paragraph: Option<String>,
}

#[derive(Args, Debug, Default)]
struct TrainArgs {
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "batch_size", visible_alias = "batch-size")]
    batch_size: Option<String>,
    #[arg(long = "learning_rate", visible_alias = "learning-rate")]
    learning_rate: Option<String>,
    #[arg(long = "warmup_steps", visible_alias = "warmup-steps")]
    warmup_steps: Option<String>,
    #[arg(long = "max_epochs", visible_alias = "max-epochs")]
    max_epochs: Option<String>,
    #[arg(long)]
    patience: Option<String>,
    #[arg(long)]
    temperature: Option<String>,
    #[arg(long = "l2_coeff", visible_alias = "l2-coeff")]
    l2_coeff: Option<String>,
    #[arg(long = "max_len", visible_alias = "max-len")]
    max_len: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long = "min_freq", visible_alias = "min-freq")]
    min_freq: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Segment risk sections into paragraphs.
    Ingest {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Paragraph records (default: `<workdir>/paragraphs.jsonl`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build chronological and lexical positive pairs with a seeded split.
    Pairs {
        /// Paragraph records (default: `<workdir>/paragraphs.jsonl`).
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        pairs: PairArgs,
        /// Output directory (default: `<workdir>/pairs`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the encoder on the pair files.
    Train {
        /// Pair directory (default: `<workdir>/pairs`).
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[command(flatten)]
        train: TrainArgs,
        /// Model file (default: `<workdir>/model.bin`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Line-delimited training report (default: `<workdir>/train_report.jsonl`).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Embed every paragraph with a trained model.
    Embed {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Embedding index (default: `<workdir>/embeddings.bin`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find mutual risk paragraphs and write the RRS matrix and evidence.
    Score {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        paragraphs: Option<PathBuf>,
        /// Reuse an index written by `embed` instead of re-encoding.
        #[arg(long)]
        embeddings: Option<PathBuf>,
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long = "out-matrix")]
        out_matrix: Option<PathBuf>,
        #[arg(long = "out-evidence")]
        out_evidence: Option<PathBuf>,
    },
    /// Compare RRS with return co-movement and GICS baselines.
    Evaluate {
        #[arg(long)]
        rrs: Option<PathBuf>,
        /// Directory of `<FIRM>.csv` price files with a `date,close` header.
        #[arg(long)]
        prices: Option<PathBuf>,
        /// CSV of ticker,sector,industry.
        #[arg(long)]
        gics: Option<PathBuf>,
        /// Ranked lists (one JSON object per line) for NDCG/P/R.
        #[arg(long)]
        retrieval: Option<PathBuf>,
        /// Comma-separated cutoffs for the retrieval metrics.
        #[arg(long)]
        ks: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score all firm pairs across a threshold grid.
    Sweep {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        paragraphs: Option<PathBuf>,
        #[arg(long)]
        embeddings: Option<PathBuf>,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long)]
        grid: Option<String>,
        /// Adds a ρ column when given.
        #[arg(long)]
        prices: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collate prior artifacts into one markdown report.
    Report {
        #[arg(long)]
        rrs: Option<PathBuf>,
        #[arg(long)]
        evidence: Option<PathBuf>,
        /// Directory written by `evaluate`.
        #[arg(long)]
        eval: Option<PathBuf>,
        #[arg(long)]
        sweep: Option<PathBuf>,
        #[arg(long = "train-report")]
        train_report: Option<PathBuf>,
        /// Number of firm pairs listed.
        #[arg(long)]
        top: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl CorpusArgs {
    fn apply(self, s: &mut Settings) {
        s.set_path("root", self.root);
        s.set("sections", self.sections);
        s.set("min_tokens", self.min_tokens);
    }
}

impl PairArgs {
    fn apply(self, s: &mut Settings) {
        s.set("seed", self.seed);
        s.set("view", self.view);
        s.set("train", self.train);
        s.set("val", self.val);
        s.set("min_tokens", self.min_tokens);
        s.set("min_span", self.min_span);
        s.set("overlap_cap", self.overlap_cap);
        s.set("max_pairs_per_paragraph", self.max_pairs_per_paragraph);
    }
}

impl TrainArgs {
    fn apply(self, s: &mut Settings) {
        s.set("seed", self.seed);
        s.set("batch_size", self.batch_size);
        s.set("learning_rate", self.learning_rate);
        s.set("warmup_steps", self.warmup_steps);
        s.set("max_epochs", self.max_epochs);
        s.set("patience", self.patience);
        s.set("temperature", self.temperature);
        s.set("l2_coeff", self.l2_coeff);
        s.set("max_len", self.max_len);
        s.set("dim", self.dim);
        s.set("min_freq", self.min_freq);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut s = Settings::load(cli.config.as_deref())?;
    s.set_path("workdir", cli.workdir);
    match cli.command {
        Command::Ingest { corpus, out } => {
            corpus.apply(&mut s);
            commands::ingest(&s, out)
        }
        Command::Pairs { input, pairs, out } => {
            pairs.apply(&mut s);
            commands::pairs(&s, input, out)
        }
        Command::Train {
            pairs,
            train,
            out,
            report,
        } => {
            train.apply(&mut s);
            commands::train(&s, pairs, out, report)
        }
        Command::Embed { model, input, out } => commands::embed(&s, model, input, out),
        Command::Score {
            model,
            paragraphs,
            embeddings,
            threshold,
            out_matrix,
            out_evidence,
        } => {
            s.set("threshold", threshold);
            commands::score(&s, model, paragraphs, embeddings, out_matrix, out_evidence)
        }
        Command::Evaluate {
            rrs,
            prices,
            gics,
            retrieval,
            ks,
            out,
        } => {
            s.set_path("prices", prices);
            s.set_path("gics", gics);
            s.set_path("retrieval", retrieval);
            s.set("ks", ks);
            commands::evaluate(&s, rrs, out)
        }
        Command::Sweep {
            model,
            paragraphs,
            embeddings,
            grid,
            prices,
            out,
        } => {
            s.set("grid", grid);
            s.set_path("prices", prices);
            commands::sweep(&s, model, paragraphs, embeddings, out)
        }
        Command::Report {
            rrs,
            evidence,
            eval,
            sweep,
            train_report,
            top,
            out,
        } => {
            s.set("top", top);
            report::run(
                &s,
                report::Inputs {
                    rrs,
                    evidence,
                    eval,
                    sweep,
                    train_report,
                },
                out,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace(['\n', '\r'], " ");
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
