//! Contrastive training of the paragraph encoder.
//!
//! Each epoch shuffles the training pairs with a seeded RNG and walks them
//! in batches of `B` (a trailing short batch is dropped). Within a batch,
//! every anchor's positive is the matching entry and the other `B - 1`
//! positives act as negatives. Parameters are updated with Adam under a
//! linear warmup; the snapshot with the lowest validation loss is kept and
//! training stops after `patience` epochs without improvement.

mod adam;
mod grad;
mod loss;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::encoder::{
    build_vocab, cosine_unchecked, encode, EncoderError, EncoderParams, Model, Vocabulary, DEFAULT_DIM,
    DEFAULT_MAX_LEN, DEFAULT_MIN_FREQ,
};
use crate::pairgen::{PositivePair, View};

pub use adam::{adam_step, adam_update, warmup_rate, AdamState, BETA1, BETA2, EPSILON};
pub use grad::{compute_gradients, GradientOutput, Gradients};
pub use loss::{info_nce_loss, info_nce_terms};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("similarity matrix holds a non-finite or undefined entry")]
    NonFiniteSimilarity,
    #[error("gradient is not finite")]
    NonFiniteGradient,
    #[error("insufficient pairs: {0}")]
    InsufficientPairs(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Encoder(#[from] EncoderError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub warmup_steps: u64,
    pub max_epochs: usize,
    pub patience: usize,
    pub temperature: f64,
    pub l2_coeff: f64,
    pub seed: u64,
    pub max_len: usize,
    pub dim: usize,
    pub min_freq: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 16,
            learning_rate: 1e-3,
            warmup_steps: 50,
            max_epochs: 50,
            patience: 5,
            temperature: 0.05,
            l2_coeff: 1e-4,
            seed: 0,
            max_len: DEFAULT_MAX_LEN,
            dim: DEFAULT_DIM,
            min_freq: DEFAULT_MIN_FREQ,
        }
    }
}

impl TrainConfig {
    pub const KEYS: [&'static str; 11] = [
        "batch_size",
        "learning_rate",
        "warmup_steps",
        "max_epochs",
        "patience",
        "temperature",
        "l2_coeff",
        "seed",
        "max_len",
        "dim",
        "min_freq",
    ];

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: String| Err(TrainError::InvalidConfig(m));
        if self.batch_size < 2 {
            return bad(format!("batch_size {} < 2", self.batch_size));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return bad(format!("temperature {} must be positive", self.temperature));
        }
        if self.patience < 1 {
            return bad("patience must be at least 1".into());
        }
        if self.dim < 2 {
            return bad(format!("dim {} < 2", self.dim));
        }
        if self.max_len < 1 {
            return bad("max_len must be at least 1".into());
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {}", self.learning_rate));
        }
        if !(self.l2_coeff >= 0.0 && self.l2_coeff.is_finite()) {
            return bad(format!("l2_coeff {}", self.l2_coeff));
        }
        Ok(())
    }

    /// Applies `key = value` settings; unknown keys are returned untouched.
    pub fn apply(&mut self, settings: &BTreeMap<String, String>) -> Result<Vec<String>, TrainError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, TrainError> {
            value
                .parse()
                .map_err(|_| TrainError::InvalidConfig(format!("{key} = {value:?}")))
        }
        let mut unknown = Vec::new();
        for (key, value) in settings {
            let v = value.as_str();
            match key.as_str() {
                "batch_size" => self.batch_size = parse(key, v)?,
                "learning_rate" => self.learning_rate = parse(key, v)?,
                "warmup_steps" => self.warmup_steps = parse(key, v)?,
                "max_epochs" => self.max_epochs = parse(key, v)?,
                "patience" => self.patience = parse(key, v)?,
                "temperature" => self.temperature = parse(key, v)?,
                "l2_coeff" => self.l2_coeff = parse(key, v)?,
                "seed" => self.seed = parse(key, v)?,
                "max_len" => self.max_len = parse(key, v)?,
                "dim" => self.dim = parse(key, v)?,
                "min_freq" => self.min_freq = parse(key, v)?,
                _ => unknown.push(key.clone()),
            }
        }
        Ok(unknown)
    }
}

/// Aligned anchors and positives as vocabulary ids.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingBatch {
    pub anchors: Vec<Vec<u32>>,
    pub positives: Vec<Vec<u32>>,
}

impl TrainingBatch {
    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Patience,
    MaxEpochs,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Patience => "patience",
            StopReason::MaxEpochs => "max_epochs",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    /// Mean positive similarity minus mean in-batch negative similarity on
    /// the validation pairs.
    pub val_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub initial_val_loss: f64,
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub stop_reason: StopReason,
    pub steps: u64,
    pub vocab_size: usize,
    pub train_pairs: usize,
    pub val_pairs: usize,
}

impl TrainReport {
    /// One JSON line per epoch, then a summary line.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.epochs {
            let mut v = serde_json::to_value(e).expect("epoch record serializes");
            v["kind"] = "epoch".into();
            writeln!(out, "{v}")?;
        }
        let summary = serde_json::json!({
            "kind": "summary",
            "initial_val_loss": self.initial_val_loss,
            "best_epoch": self.best_epoch,
            "best_val_loss": self.best_val_loss,
            "stop_reason": self.stop_reason,
            "epochs_run": self.epochs.len(),
            "steps": self.steps,
            "vocab_size": self.vocab_size,
            "train_pairs": self.train_pairs,
            "val_pairs": self.val_pairs,
        });
        writeln!(out, "{summary}")
    }
}

/// Early-stopping bookkeeping. Ties keep the earlier epoch.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: Option<(usize, f64)>,
    since_best: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        EarlyStopping {
            patience: patience.max(1),
            best: None,
            since_best: 0,
        }
    }

    /// Records an epoch's validation loss. Returns `(improved, stop)`.
    pub fn observe(&mut self, epoch: usize, val_loss: f64) -> (bool, bool) {
        let improved = self.best.is_none_or(|(_, best)| val_loss < best);
        if improved {
            self.best = Some((epoch, val_loss));
            self.since_best = 0;
        } else {
            self.since_best += 1;
        }
        (improved, self.since_best >= self.patience)
    }

    pub fn best(&self) -> Option<(usize, f64)> {
        self.best
    }
}

fn to_ids(vocab: &Vocabulary, pairs: &[PositivePair], max_len: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let cut = |t: &[String]| {
        let mut ids = vocab.ids(t);
        ids.truncate(max_len);
        ids
    };
    pairs
        .iter()
        .map(|p| (cut(&p.left_tokens), cut(&p.right_tokens)))
        .collect()
}

fn batch_of(pairs: &[(Vec<u32>, Vec<u32>)], idx: &[usize]) -> TrainingBatch {
    TrainingBatch {
        anchors: idx.iter().map(|&k| pairs[k].0.clone()).collect(),
        positives: idx.iter().map(|&k| pairs[k].1.clone()).collect(),
    }
}

/// Validation loss and margin over fixed-order batches of `B`, taken within
/// each group so that no batch mixes groups. A final short batch is kept
/// when it holds at least two pairs; losses are weighted per anchor.
pub fn validation_stats(
    params: &EncoderParams,
    groups: &[Vec<(Vec<u32>, Vec<u32>)>],
    config: &TrainConfig,
) -> Result<(f64, f64), TrainError> {
    let mut loss_sum = 0.0;
    let mut anchors = 0usize;
    let (mut pos_sum, mut pos_n, mut neg_sum, mut neg_n) = (0.0, 0usize, 0.0, 0usize);
    for chunk in groups.iter().flat_map(|g| g.chunks(config.batch_size)) {
        if chunk.len() < 2 {
            continue;
        }
        let enc = |ids: &Vec<u32>| encode(params, ids, config.max_len);
        let a: Vec<_> = chunk.iter().map(|p| enc(&p.0)).collect::<Result<_, _>>()?;
        let p: Vec<_> = chunk.iter().map(|p| enc(&p.1)).collect::<Result<_, _>>()?;
        let sim: Vec<Vec<f64>> = a
            .iter()
            .map(|x| p.iter().map(|y| cosine_unchecked(x, y)).collect())
            .collect();
        for (i, row) in sim.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                if i == j {
                    pos_sum += s;
                    pos_n += 1;
                } else {
                    neg_sum += s;
                    neg_n += 1;
                }
            }
        }
        loss_sum += info_nce_terms(&sim, config.temperature)?.iter().sum::<f64>();
        anchors += chunk.len();
    }
    if anchors == 0 {
        return Err(TrainError::InsufficientPairs("need at least 2 validation pairs".into()));
    }
    Ok((
        loss_sum / anchors as f64,
        pos_sum / pos_n as f64 - neg_sum / neg_n as f64,
    ))
}

/// Trains an encoder on `train_pairs` (both views already merged), using
/// `val_pairs` for early stopping. Validation batches never mix views, since
/// one paragraph may back a held-out pair in each view. The vocabulary comes from the training
/// pairs only. Deterministic for a fixed config and input order.
pub fn train(
    train_pairs: &[PositivePair],
    val_pairs: &[PositivePair],
    config: &TrainConfig,
) -> Result<(Model, TrainReport), TrainError> {
    config.validate()?;
    if train_pairs.len() < config.batch_size {
        return Err(TrainError::InsufficientPairs(format!(
            "{} training pairs for batch size {}",
            train_pairs.len(),
            config.batch_size
        )));
    }
    let vocab = build_vocab(
        train_pairs
            .iter()
            .flat_map(|p| [p.left_tokens.as_slice(), p.right_tokens.as_slice()]),
        config.min_freq,
    )?;
    let train_ids = to_ids(&vocab, train_pairs, config.max_len);
    let mut by_view: BTreeMap<View, Vec<PositivePair>> = BTreeMap::new();
    for p in val_pairs {
        by_view.entry(p.view).or_default().push(p.clone());
    }
    let val_ids: Vec<_> = by_view.values().map(|g| to_ids(&vocab, g, config.max_len)).collect();

    let mut params = EncoderParams::init(vocab.len(), config.dim, config.seed);
    let mut state = AdamState::new(&params);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(0x9e37_79b9_7f4a_7c15));

    let (initial_val_loss, _) = validation_stats(&params, &val_ids, config)?;
    let mut stopper = EarlyStopping::new(config.patience);
    let mut best_params = params.clone();
    let mut epochs = Vec::new();
    let mut step = 0u64;
    let mut stop_reason = StopReason::MaxEpochs;
    let mut order: Vec<usize> = (0..train_ids.len()).collect();

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for idx in order.chunks_exact(config.batch_size) {
            let batch = batch_of(&train_ids, idx);
            let out = compute_gradients(&params, &batch, config.temperature, config.l2_coeff, config.max_len)?;
            step += 1;
            adam_step(
                &mut params,
                &out.grads,
                &mut state,
                step,
                config.learning_rate,
                config.warmup_steps,
            );
            loss_sum += out.loss;
            batches += 1;
        }
        let (val_loss, val_margin) = validation_stats(&params, &val_ids, config)?;
        epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / batches as f64,
            val_loss,
            val_margin,
        });
        let (improved, stop) = stopper.observe(epoch, val_loss);
        if improved {
            best_params = params.clone();
        }
        if stop {
            stop_reason = StopReason::Patience;
            break;
        }
    }

    let (best_epoch, best_val_loss) = stopper.best().unwrap_or((0, initial_val_loss));
    let report = TrainReport {
        initial_val_loss,
        epochs,
        best_epoch,
        best_val_loss,
        stop_reason,
        steps: step,
        vocab_size: vocab.len(),
        train_pairs: train_pairs.len(),
        val_pairs: val_pairs.len(),
    };
    let model = Model::new(vocab, best_params, config.max_len)?;
    Ok((model, report))
}
