//! Binary embedding index.
//!
//! Little-endian throughout; strings are a u32 byte length then UTF-8.
//!
//! ```text
//! magic "RRSE" | u32 version (1) | string model fingerprint
//! u64 max_len | u64 d | u64 firm count
//! per firm:      string firm id | u64 paragraph count
//! per paragraph: string paragraph id | d × f64
//! ```

use std::io::{Read, Write};

use crate::corpus::ParagraphId;
use crate::encoder::EmbeddingVector;

use super::{EmbeddingIndex, FirmEmbeddings, ScoreError};

pub const EMBEDDINGS_MAGIC: &[u8; 4] = b"RRSE";
pub const EMBEDDINGS_FORMAT_VERSION: u32 = 1;

fn put_str<W: Write>(out: &mut W, s: &str) -> std::io::Result<()> {
    out.write_all(&(s.len() as u32).to_le_bytes())?;
    out.write_all(s.as_bytes())
}

pub(super) fn write_index<W: Write>(index: &EmbeddingIndex, mut out: W) -> std::io::Result<()> {
    out.write_all(EMBEDDINGS_MAGIC)?;
    out.write_all(&EMBEDDINGS_FORMAT_VERSION.to_le_bytes())?;
    put_str(&mut out, &index.fingerprint)?;
    out.write_all(&(index.max_len as u64).to_le_bytes())?;
    out.write_all(&(index.dim as u64).to_le_bytes())?;
    out.write_all(&(index.firms.len() as u64).to_le_bytes())?;
    for firm in &index.firms {
        put_str(&mut out, &firm.firm_id)?;
        out.write_all(&(firm.entries.len() as u64).to_le_bytes())?;
        for (id, v) in &firm.entries {
            put_str(&mut out, &id.to_string())?;
            for x in v.values() {
                out.write_all(&x.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

struct Input<R> {
    inner: R,
}

fn bad(message: impl Into<String>) -> ScoreError {
    ScoreError::Format {
        what: "embedding index",
        message: message.into(),
    }
}

impl<R: Read> Input<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N], ScoreError> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|_| bad("truncated file"))?;
        Ok(buf)
    }

    fn u32(&mut self) -> Result<u32, ScoreError> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64, ScoreError> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn string(&mut self) -> Result<String, ScoreError> {
        let len = self.u32()? as usize;
        let mut buf = Vec::new();
        (&mut self.inner)
            .take(len as u64)
            .read_to_end(&mut buf)
            .map_err(|_| bad("truncated file"))?;
        if buf.len() != len {
            return Err(bad("truncated file"));
        }
        String::from_utf8(buf).map_err(|_| bad("string is not UTF-8"))
    }
}

pub(super) fn read_index<R: Read>(inner: R) -> Result<EmbeddingIndex, ScoreError> {
    let mut r = Input { inner };
    if &r.bytes::<4>()? != EMBEDDINGS_MAGIC {
        return Err(bad("bad magic"));
    }
    let version = r.u32()?;
    if version != EMBEDDINGS_FORMAT_VERSION {
        return Err(bad(format!("unsupported format version {version}")));
    }
    let fingerprint = r.string()?;
    let max_len = r.u64()? as usize;
    let dim = r.u64()? as usize;
    let n_firms = r.u64()?;
    let mut firms = Vec::new();
    for _ in 0..n_firms {
        let firm_id = r.string()?;
        let count = r.u64()?;
        let mut entries = Vec::new();
        for _ in 0..count {
            let id: ParagraphId = r.string()?.parse().map_err(|e| bad(format!("{e}")))?;
            let values = (0..dim)
                .map(|_| r.bytes::<8>().map(f64::from_le_bytes))
                .collect::<Result<Vec<_>, _>>()?;
            entries.push((id, EmbeddingVector::new(values)));
        }
        firms.push(FirmEmbeddings { firm_id, entries });
    }
    let mut rest = [0u8; 1];
    if r.inner.read(&mut rest).map_err(|_| bad("read error"))? != 0 {
        return Err(bad("trailing bytes"));
    }
    EmbeddingIndex::new(firms, fingerprint, max_len)
}
