//! Binary model file.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! offset  size        field
//! 0       4           magic "RRSM"
//! 4       4           u32 format version (1)
//! 8       8           u64 d, embedding width
//! 16      8           u64 |V|, vocabulary size including <pad>, <unk>
//! 24      8           u64 max_len used at training time
//! 32      ...         |V| entries: u32 byte length, UTF-8 token bytes
//! ...     8·|V|·d     f64 embedding matrix, row-major (row = token id)
//! ...     8·d·d       f64 projection matrix, row-major (row = output unit)
//! ...     8·d         f64 projection bias
//! ```
//!
//! The file must end exactly after the bias.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{encode, EmbeddingVector, EncoderError, EncoderParams, Vocabulary, PAD};

pub const MODEL_MAGIC: &[u8; 4] = b"RRSM";
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Vocabulary, weights and the truncation length they were trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub vocab: Vocabulary,
    pub params: EncoderParams,
    pub max_len: usize,
}

impl Model {
    pub fn new(vocab: Vocabulary, params: EncoderParams, max_len: usize) -> Result<Self, EncoderError> {
        if params.vocab_size != vocab.len() {
            return Err(EncoderError::DimensionMismatch(params.vocab_size, vocab.len()));
        }
        if params.dim < 2 {
            return Err(EncoderError::BadModel(format!("d = {} < 2", params.dim)));
        }
        if !params.is_finite() {
            return Err(EncoderError::BadModel("non-finite weight".into()));
        }
        if params.embed_row(PAD).iter().any(|&v| v != 0.0) {
            return Err(EncoderError::BadModel("PAD row is not zero".into()));
        }
        Ok(Model { vocab, params, max_len })
    }

    /// Encodes a token list, mapping unknown tokens to UNK.
    pub fn encode_tokens(&self, tokens: &[String]) -> Result<EmbeddingVector, EncoderError> {
        encode(&self.params, &self.vocab.ids(tokens), self.max_len)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let p = &self.params;
        let mut out = Vec::with_capacity(32 + 8 * (p.embed.len() + p.proj_w.len() + p.proj_b.len()));
        out.extend_from_slice(MODEL_MAGIC);
        out.extend_from_slice(&MODEL_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(p.dim as u64).to_le_bytes());
        out.extend_from_slice(&(p.vocab_size as u64).to_le_bytes());
        out.extend_from_slice(&(self.max_len as u64).to_le_bytes());
        for token in self.vocab.tokens() {
            out.extend_from_slice(&(token.len() as u32).to_le_bytes());
            out.extend_from_slice(token.as_bytes());
        }
        for v in p.embed.iter().chain(&p.proj_w).chain(&p.proj_b) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EncoderError> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != MODEL_MAGIC {
            return Err(EncoderError::BadModel("bad magic".into()));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != MODEL_FORMAT_VERSION {
            return Err(EncoderError::BadModel(format!("unsupported format version {version}")));
        }
        let dim = r.u64()? as usize;
        let vocab_size = r.u64()? as usize;
        let max_len = r.u64()? as usize;

        let mut tokens = Vec::with_capacity(vocab_size.min(1 << 20));
        for _ in 0..vocab_size {
            let len = u32::from_le_bytes(r.take(4)?.try_into().unwrap()) as usize;
            let token =
                std::str::from_utf8(r.take(len)?).map_err(|_| EncoderError::BadModel("token is not UTF-8".into()))?;
            tokens.push(token.to_string());
        }
        let vocab = Vocabulary::from_tokens(tokens)?;

        let embed_len = vocab_size
            .checked_mul(dim)
            .ok_or_else(|| EncoderError::BadModel("size overflow".into()))?;
        let params = EncoderParams {
            dim,
            vocab_size,
            embed: r.f64s(embed_len)?,
            proj_w: r.f64s(dim * dim)?,
            proj_b: r.f64s(dim)?,
        };
        if r.pos != bytes.len() {
            return Err(EncoderError::BadModel(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Model::new(vocab, params, max_len)
    }

    /// Hex SHA-256 of the serialized model.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.to_bytes()))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        fs::write(path, self.to_bytes())
    }

    /// Reads and validates a model file.
    pub fn load(path: &Path) -> Result<Self, ModelLoadError> {
        let bytes = fs::read(path).map_err(ModelLoadError::Io)?;
        Model::from_bytes(&bytes).map_err(ModelLoadError::Format)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelLoadError {
    #[error(transparent)]
    Io(std::io::Error),
    #[error(transparent)]
    Format(EncoderError),
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], EncoderError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| EncoderError::BadModel("truncated file".into()))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u64(&mut self) -> Result<u64, EncoderError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, EncoderError> {
        let raw = self.take(
            n.checked_mul(8)
                .ok_or_else(|| EncoderError::BadModel("size overflow".into()))?,
        )?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}
