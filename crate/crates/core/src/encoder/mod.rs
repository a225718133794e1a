//! Paragraph encoder.
//!
//! A paragraph's token ids index rows of an embedding table; the rows are
//! mean-pooled (padding excluded) and passed through one affine layer and
//! `tanh`:
//!
//! ```text
//! h = mean(embed[t] for t in tokens[..max_len] if t != PAD)
//! f(p) = tanh(proj_w · h + proj_b)
//! ```
//!
//! Paragraphs are compared by cosine similarity of their encodings.

mod model_file;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

pub use model_file::{Model, ModelLoadError, MODEL_FORMAT_VERSION, MODEL_MAGIC};

pub const PAD: u32 = 0;
pub const UNK: u32 = 1;
pub const PAD_TOKEN: &str = "<pad>";
pub const UNK_TOKEN: &str = "<unk>";

pub const DEFAULT_DIM: usize = 64;
pub const DEFAULT_MIN_FREQ: usize = 2;
pub const DEFAULT_MAX_LEN: usize = 256;

/// Norms below this make cosine similarity undefined.
pub const NORM_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum EncoderError {
    #[error("empty corpus: no tokens to build a vocabulary from")]
    EmptyCorpus,
    #[error("paragraph has no tokens to encode")]
    EmptyParagraph,
    #[error("vector norm below {NORM_EPSILON:e}")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("invalid model file: {0}")]
    BadModel(String),
}

/// Token ↔ index mapping. Index 0 is padding, index 1 the unknown token.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from `tokens`, which must start with the PAD and
    /// UNK entries.
    pub fn from_tokens(tokens: Vec<String>) -> Result<Self, EncoderError> {
        if tokens.len() < 2 || tokens[0] != PAD_TOKEN || tokens[1] != UNK_TOKEN {
            return Err(EncoderError::BadModel("vocabulary must begin with <pad>, <unk>".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (k, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), k as u32).is_some() {
                return Err(EncoderError::BadModel(format!("duplicate vocabulary entry {t:?}")));
            }
        }
        Ok(Vocabulary { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> u32 {
        match self.index.get(token) {
            Some(&k) if k != PAD => k,
            _ => UNK,
        }
    }

    pub fn ids(&self, tokens: &[String]) -> Vec<u32> {
        tokens.iter().map(|t| self.id(t)).collect()
    }
}

/// Builds a vocabulary of tokens seen at least `min_freq` times, ordered by
/// descending frequency then token.
pub fn build_vocab<'a, I>(token_lists: I, min_freq: usize) -> Result<Vocabulary, EncoderError>
where
    I: IntoIterator<Item = &'a [String]>,
{
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for list in token_lists {
        for t in list {
            *counts.entry(t.as_str()).or_default() += 1;
        }
    }
    if counts.is_empty() {
        return Err(EncoderError::EmptyCorpus);
    }
    let mut kept: Vec<(&str, usize)> = counts
        .into_iter()
        .filter(|&(t, c)| c >= min_freq.max(1) && t != PAD_TOKEN && t != UNK_TOKEN)
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

    let mut tokens = vec![PAD_TOKEN.to_string(), UNK_TOKEN.to_string()];
    tokens.extend(kept.into_iter().map(|(t, _)| t.to_string()));
    Vocabulary::from_tokens(tokens)
}

/// Trainable weights. Matrices are row-major; `proj_w` row `r` holds the
/// weights of output unit `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub dim: usize,
    pub vocab_size: usize,
    pub embed: Vec<f64>,
    pub proj_w: Vec<f64>,
    pub proj_b: Vec<f64>,
}

impl EncoderParams {
    pub fn zeros(vocab_size: usize, dim: usize) -> Self {
        EncoderParams {
            dim,
            vocab_size,
            embed: vec![0.0; vocab_size * dim],
            proj_w: vec![0.0; dim * dim],
            proj_b: vec![0.0; dim],
        }
    }

    /// Seeded initialisation: embedding rows `N(0, 0.1²)`, Glorot-uniform
    /// projection, zero bias, zero PAD row.
    pub fn init(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = Self::zeros(vocab_size, dim);
        let normal = Normal::new(0.0, 0.1).unwrap();
        for v in params.embed.iter_mut().skip(dim) {
            *v = normal.sample(&mut rng);
        }
        let limit = (6.0 / (2 * dim) as f64).sqrt();
        for w in &mut params.proj_w {
            *w = rng.random_range(-limit..limit);
        }
        params
    }

    pub fn embed_row(&self, id: u32) -> &[f64] {
        let start = id as usize * self.dim;
        &self.embed[start..start + self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.embed
            .iter()
            .chain(&self.proj_w)
            .chain(&self.proj_b)
            .all(|v| v.is_finite())
    }

    /// Sum of squares of all entries.
    pub fn squared_norm(&self) -> f64 {
        self.embed
            .iter()
            .chain(&self.proj_w)
            .chain(&self.proj_b)
            .map(|v| v * v)
            .sum()
    }
}

/// An encoded paragraph with its cached squared norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    values: Vec<f64>,
    norm_sq: f64,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Self {
        let norm_sq = values.iter().map(|v| v * v).sum();
        EmbeddingVector { values, norm_sq }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq.sqrt()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub(crate) struct Forward {
    /// Non-padding ids after truncation; each contributes `1 / ids.len()`.
    pub ids: Vec<u32>,
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
}

pub(crate) fn forward(params: &EncoderParams, ids: &[u32], max_len: usize) -> Result<Forward, EncoderError> {
    let used: Vec<u32> = ids.iter().take(max_len).copied().filter(|&id| id != PAD).collect();
    if used.is_empty() {
        return Err(EncoderError::EmptyParagraph);
    }
    let d = params.dim;
    let mut hidden = vec![0.0; d];
    for &id in &used {
        for (h, e) in hidden.iter_mut().zip(params.embed_row(id)) {
            *h += e;
        }
    }
    let inv = 1.0 / used.len() as f64;
    hidden.iter_mut().for_each(|h| *h *= inv);

    let output = (0..d)
        .map(|r| {
            let row = &params.proj_w[r * d..(r + 1) * d];
            let z: f64 = row.iter().zip(&hidden).map(|(w, h)| w * h).sum::<f64>() + params.proj_b[r];
            z.tanh()
        })
        .collect();
    Ok(Forward {
        ids: used,
        hidden,
        output,
    })
}

/// Encodes a paragraph given as vocabulary ids. Ids past `max_len` are
/// ignored and PAD positions never contribute to the mean.
pub fn encode(params: &EncoderParams, ids: &[u32], max_len: usize) -> Result<EmbeddingVector, EncoderError> {
    forward(params, ids, max_len).map(|f| EmbeddingVector::new(f.output))
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn similarity(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, EncoderError> {
    if u.dim() != v.dim() {
        return Err(EncoderError::DimensionMismatch(u.dim(), v.dim()));
    }
    if u.norm() < NORM_EPSILON || v.norm() < NORM_EPSILON {
        return Err(EncoderError::ZeroVector);
    }
    Ok(cosine_unchecked(u, v))
}

/// Cosine of two vectors already known to be non-zero and equal length.
/// `dot / sqrt(|u|²|v|²)` keeps `cos(u, u) = 1` exact.
pub(crate) fn cosine_unchecked(u: &EmbeddingVector, v: &EmbeddingVector) -> f64 {
    let dot: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    (dot / (u.norm_sq * v.norm_sq).sqrt()).clamp(-1.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn vocab_frequency_rule() {
        let corpus = [toks("a a b")];
        let vocab = build_vocab(corpus.iter().map(Vec::as_slice), 2).unwrap();
        assert_eq!(vocab.tokens(), ["<pad>", "<unk>", "a"]);
        assert_eq!(vocab.id("a"), 2);
        assert_eq!(vocab.id("b"), UNK);
        assert_eq!(vocab.id("<pad>"), UNK);
    }

    #[test]
    fn vocab_empty_corpus() {
        let none: Vec<Vec<String>> = vec![];
        assert_eq!(
            build_vocab(none.iter().map(Vec::as_slice), 1),
            Err(EncoderError::EmptyCorpus)
        );
    }

    #[test]
    fn vocab_deterministic_ordering() {
        let corpus = [toks("c b a b c c z y x")];
        let a = build_vocab(corpus.iter().map(Vec::as_slice), 1).unwrap();
        let b = build_vocab(corpus.iter().map(Vec::as_slice), 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(&a.tokens()[2..], ["c", "b", "a", "x", "y", "z"]);
    }

    fn unit_params() -> EncoderParams {
        let mut p = EncoderParams::zeros(3, 2);
        p.embed[2 * 2] = 1.0; // token 2 -> [1, 0]
        p.proj_w = vec![1.0, 0.0, 0.0, 1.0];
        p
    }

    #[test]
    fn hand_evaluated_forward() {
        let out = encode(&unit_params(), &[2], 256).unwrap();
        assert_abs_diff_eq!(out.values()[0], 1f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.values()[0], 0.7616, epsilon = 1e-4);
        assert_eq!(out.values()[1], 0.0);
    }

    #[test]
    fn identical_tokens_equal_single_row() {
        let p = EncoderParams::init(10, 4, 5);
        let once = encode(&p, &[7], 256).unwrap();
        let many = encode(&p, &[7; 9], 256).unwrap();
        for (a, b) in once.values().iter().zip(many.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn empty_paragraph_errors() {
        let p = unit_params();
        assert_eq!(encode(&p, &[], 256), Err(EncoderError::EmptyParagraph));
        assert_eq!(encode(&p, &[PAD, PAD], 256), Err(EncoderError::EmptyParagraph));
        assert_eq!(encode(&p, &[2], 0), Err(EncoderError::EmptyParagraph));
    }

    #[test]
    fn similarity_cases() {
        let u = EmbeddingVector::new(vec![0.3, -0.2, 0.9]);
        let neg = EmbeddingVector::new(vec![-0.3, 0.2, -0.9]);
        assert_eq!(similarity(&u, &u).unwrap(), 1.0);
        assert_eq!(similarity(&u, &neg).unwrap(), -1.0);
        let e1 = EmbeddingVector::new(vec![1.0, 0.0]);
        let e2 = EmbeddingVector::new(vec![0.0, 1.0]);
        assert_eq!(similarity(&e1, &e2).unwrap(), 0.0);
    }

    #[test]
    fn similarity_errors() {
        let z = EmbeddingVector::new(vec![0.0, 0.0]);
        let e1 = EmbeddingVector::new(vec![1.0, 0.0]);
        assert_eq!(similarity(&z, &e1), Err(EncoderError::ZeroVector));
        assert_eq!(
            similarity(&e1, &EmbeddingVector::new(vec![1.0])),
            Err(EncoderError::DimensionMismatch(2, 1))
        );
        // tanh of a zero hidden state with zero bias
        let p = EncoderParams::zeros(3, 2);
        let zero = encode(&p, &[2], 8).unwrap();
        assert_eq!(similarity(&zero, &zero), Err(EncoderError::ZeroVector));
    }

    #[test]
    fn pad_row_is_zero_after_init() {
        let p = EncoderParams::init(20, 8, 1);
        assert!(p.embed_row(PAD).iter().all(|&v| v == 0.0));
        assert!(p.is_finite());
    }

    fn vec_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0f64..10.0, d)
            .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
    }

    proptest! {
        #[test]
        fn similarity_symmetric_exactly(a in vec_strategy(6), b in vec_strategy(6)) {
            let (a, b) = (EmbeddingVector::new(a), EmbeddingVector::new(b));
            let ab = similarity(&a, &b).unwrap();
            prop_assert_eq!(ab, similarity(&b, &a).unwrap());
            prop_assert!((-1.0..=1.0).contains(&ab));
        }

        #[test]
        fn similarity_scale_invariant(a in vec_strategy(5), b in vec_strategy(5), c in 0.01f64..100.0) {
            let scaled = EmbeddingVector::new(a.iter().map(|x| x * c).collect());
            let (a, b) = (EmbeddingVector::new(a), EmbeddingVector::new(b));
            let diff = similarity(&scaled, &b).unwrap() - similarity(&a, &b).unwrap();
            prop_assert!(diff.abs() <= 1e-12);
        }

        #[test]
        fn padding_and_truncation_contract(
            ids in prop::collection::vec(1u32..12, 1..40),
            pads in 0usize..10,
            max_len in 1usize..50,
            seed in 0u64..1000,
        ) {
            let p = EncoderParams::init(12, 4, seed);
            let base = encode(&p, &ids, 256).unwrap();
            let mut padded = ids.clone();
            padded.extend(std::iter::repeat_n(PAD, pads));
            prop_assert_eq!(&encode(&p, &padded, 256).unwrap(), &base);

            let cut = &ids[..ids.len().min(max_len)];
            prop_assert_eq!(encode(&p, &ids, max_len).unwrap(), encode(&p, cut, max_len).unwrap());
            for v in base.values() {
                prop_assert!(v.abs() < 1.0);
            }
        }
    }
}
