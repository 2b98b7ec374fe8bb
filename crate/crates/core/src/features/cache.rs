//! `AFRE` embedding cache.
//!
//! ```text
//! magic    "AFRE"
//! u16      version (1)
//! u16 + n  extractor id, UTF-8
//! u32      dim
//! u32      count
//! count x { u16 + n "category/record_id", dim x f32 }
//! ```
//! All integers and floats little-endian.

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{EmbeddingVector, FeatureError};
use crate::dataset::RecordRef;

pub const CACHE_MAGIC: [u8; 4] = *b"AFRE";
pub const CACHE_VERSION: u16 = 1;

fn short_str(s: &str, what: &str) -> Result<u16, FeatureError> {
    u16::try_from(s.len()).map_err(|_| FeatureError::CorruptCache(format!("{what} longer than 65535 bytes")))
}

pub fn cache_write<W: Write>(vectors: &[EmbeddingVector], mut w: W) -> Result<(), FeatureError> {
    let (id, dim) = match vectors.first() {
        Some(v) => (v.extractor_id(), v.dim()),
        None => ("", 0),
    };
    for v in vectors {
        if v.extractor_id() != id {
            return Err(FeatureError::MixedExtractors(id.to_string(), v.extractor_id().to_string()));
        }
        if v.dim() != dim {
            return Err(FeatureError::DimMismatch {
                expected: dim,
                actual: v.dim(),
            });
        }
    }
    let count = u32::try_from(vectors.len()).map_err(|_| FeatureError::CorruptCache("too many vectors".into()))?;
    let dim32 = u32::try_from(dim).map_err(|_| FeatureError::CorruptCache("dimension too large".into()))?;

    w.write_all(&CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&short_str(id, "extractor id")?.to_le_bytes())?;
    w.write_all(id.as_bytes())?;
    w.write_all(&dim32.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    for v in vectors {
        let r = v.record_ref.to_string();
        w.write_all(&short_str(&r, "record reference")?.to_le_bytes())?;
        w.write_all(r.as_bytes())?;
        for x in v.values() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn bytes(&mut self, n: usize, what: &str) -> Result<Vec<u8>, FeatureError> {
        let mut buf = vec![0u8; n];
        self.inner.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => FeatureError::CorruptCache(format!("truncated {what}")),
            _ => FeatureError::Io(e),
        })?;
        Ok(buf)
    }

    fn u16(&mut self, what: &str) -> Result<u16, FeatureError> {
        let b = self.bytes(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32, FeatureError> {
        let b = self.bytes(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn string(&mut self, what: &str) -> Result<String, FeatureError> {
        let n = self.u16(what)? as usize;
        String::from_utf8(self.bytes(n, what)?).map_err(|_| FeatureError::CorruptCache(format!("{what} is not UTF-8")))
    }
}

pub fn cache_read<R: Read>(reader: R) -> Result<Vec<EmbeddingVector>, FeatureError> {
    let mut c = Cursor { inner: reader };
    if c.bytes(4, "magic")? != CACHE_MAGIC {
        return Err(FeatureError::CorruptCache("bad magic".into()));
    }
    let version = c.u16("version")?;
    if version != CACHE_VERSION {
        return Err(FeatureError::CorruptCache(format!("unsupported version {version}")));
    }
    let id = c.string("extractor id")?;
    let dim = c.u32("dim")? as usize;
    let count = c.u32("count")? as usize;
    if count > 0 && dim == 0 {
        return Err(FeatureError::CorruptCache("zero dimension".into()));
    }
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for _ in 0..count {
        let r = c.string("record reference")?;
        let record_ref: RecordRef = r.parse().map_err(FeatureError::CorruptCache)?;
        let raw = c.bytes(dim * 4, "vector")?;
        let values = raw
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        out.push(EmbeddingVector::new(record_ref, values, id.clone())?);
    }
    let mut trailing = [0u8; 1];
    if c.inner.read(&mut trailing)? != 0 {
        return Err(FeatureError::CorruptCache("trailing bytes after last record (count mismatch)".into()));
    }
    Ok(out)
}

pub fn cache_save(vectors: &[EmbeddingVector], path: &Path) -> Result<(), FeatureError> {
    // validate before touching the destination
    cache_write(vectors, std::io::sink())?;
    cache_write(vectors, BufWriter::new(std::fs::File::create(path)?))
}

pub fn cache_load(path: &Path) -> Result<Vec<EmbeddingVector>, FeatureError> {
    cache_read(BufReader::new(std::fs::File::open(path)?))
}
