//! Text and binary persistence for models and co-occurrence matrices.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{CooccurrenceMatrix, EmbedError, EmbeddingModel, TrainingMeta, VectorMode, Weighting};
use crate::scalar::Scalar;

const MAGIC: &[u8; 8] = b"CHVGLOVE";
const VERSION: u32 = 1;
const RECORD: usize = 16;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmbedError + '_ {
    move |source| EmbedError::Io { path: path.to_path_buf(), source }
}

impl<T: Scalar> EmbeddingModel<T> {
    /// GloVe text format: `word v1 … vd` per line, no header.
    pub fn write_text<W: Write>(&self, mut out: W, mode: VectorMode) -> std::io::Result<()> {
        for (i, word) in self.words().iter().enumerate() {
            write!(out, "{word}")?;
            for v in self.vector_at(i, mode) {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        out.flush()
    }

    /// Reads a text vector file into main vectors (context and biases zero).
    pub fn read_text<R: BufRead>(input: R) -> Result<Self, EmbedError> {
        let mut words = Vec::new();
        let mut values = Vec::new();
        let mut dim = None;
        for (n, line) in input.lines().enumerate() {
            let line = line.map_err(|e| EmbedError::Format(format!("line {}: {e}", n + 1)))?;
            let mut fields = line.split_ascii_whitespace();
            let Some(word) = fields.next() else { continue };
            let row: Vec<T> = fields
                .map(|f| f.parse::<T>().map_err(|_| EmbedError::Format(format!("line {}: bad number {f:?}", n + 1))))
                .collect::<Result<_, _>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(EmbedError::Format(format!("line {}: expected {d} values, found {}", n + 1, row.len())))
                }
                _ => {}
            }
            words.push(word.to_owned());
            values.extend(row);
        }
        let dim = dim.ok_or_else(|| EmbedError::Format("vector file is empty".into()))?;
        EmbeddingModel::from_vectors(words, dim, values)
    }

    /// Binary layout (little endian): magic, version u32, scalar tag
    /// (u8 length + bytes), vocab u64, dim u64, words (u32 length + UTF-8),
    /// w, w̃, b, b̃, then u64 length + training metadata JSON.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(T::TAG.len() as u8);
        out.extend_from_slice(T::TAG.as_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        out.extend_from_slice(&(self.dim() as u64).to_le_bytes());
        for w in self.words() {
            out.extend_from_slice(&(w.len() as u32).to_le_bytes());
            out.extend_from_slice(w.as_bytes());
        }
        for block in [&self.w, &self.wc, &self.b, &self.bc] {
            for v in block.iter() {
                v.write_le(&mut out);
            }
        }
        let meta = serde_json::to_vec(&self.meta).expect("metadata serializes");
        out.extend_from_slice(&(meta.len() as u64).to_le_bytes());
        out.extend_from_slice(&meta);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EmbedError> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(8)? != MAGIC {
            return Err(EmbedError::Format("not a model file (bad magic)".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(EmbedError::Format(format!("model version {version} is not supported (expected {VERSION})")));
        }
        let tag_len = r.take(1)?[0] as usize;
        let tag = r.take(tag_len)?;
        if tag != T::TAG.as_bytes() {
            return Err(EmbedError::Format(format!(
                "model stores {} values, expected {}",
                String::from_utf8_lossy(tag),
                T::TAG
            )));
        }
        let n = r.u64()? as usize;
        let dim = r.u64()? as usize;
        let mut words = Vec::with_capacity(n.min(1 << 20));
        for _ in 0..n {
            let len = r.u32()? as usize;
            let w = std::str::from_utf8(r.take(len)?).map_err(|_| EmbedError::Format("word is not UTF-8".into()))?;
            words.push(w.to_owned());
        }
        let mut block = |len: usize| -> Result<Vec<T>, EmbedError> {
            let raw = r.take(len.checked_mul(T::BYTES).ok_or_else(truncated)?)?;
            Ok(raw.chunks_exact(T::BYTES).map(T::read_le).collect())
        };
        let w = block(n * dim)?;
        let wc = block(n * dim)?;
        let b = block(n)?;
        let bc = block(n)?;
        let meta_len = r.u64()? as usize;
        let meta: TrainingMeta =
            serde_json::from_slice(r.take(meta_len)?).map_err(|e| EmbedError::Format(format!("metadata: {e}")))?;
        if r.at != bytes.len() {
            return Err(EmbedError::Format("trailing bytes after model".into()));
        }
        let mut model = EmbeddingModel::from_parts(words, dim, w, wc, b, bc)?;
        model.meta = meta;
        Ok(model)
    }

    pub fn save_binary(&self, path: &Path) -> Result<(), EmbedError> {
        fs::write(path, self.to_bytes()).map_err(io_err(path))
    }

    pub fn load_binary(path: &Path) -> Result<Self, EmbedError> {
        Self::from_bytes(&fs::read(path).map_err(io_err(path))?)
    }

    pub fn save_text(&self, path: &Path, mode: VectorMode) -> Result<(), EmbedError> {
        let f = fs::File::create(path).map_err(io_err(path))?;
        self.write_text(std::io::BufWriter::new(f), mode).map_err(io_err(path))
    }

    pub fn load_text(path: &Path) -> Result<Self, EmbedError> {
        let f = fs::File::open(path).map_err(io_err(path))?;
        Self::read_text(std::io::BufReader::new(f))
    }
}

fn truncated() -> EmbedError {
    EmbedError::Format("file is truncated".into())
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], EmbedError> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(truncated)?;
        let s = &self.bytes[self.at..end];
        self.at = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, EmbedError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, EmbedError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

impl<T: Scalar> CooccurrenceMatrix<T> {
    /// Fixed-width records: word1 u32, word2 u32, weight f64, little endian.
    pub fn to_records(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len() * RECORD);
        for &(i, j, x) in self.entries() {
            out.extend_from_slice(&i.to_le_bytes());
            out.extend_from_slice(&j.to_le_bytes());
            out.extend_from_slice(&x.as_f64().to_le_bytes());
        }
        out
    }

    pub fn from_records(bytes: &[u8], vocab_size: usize, window: usize, weighting: Weighting) -> Result<Self, EmbedError> {
        if !bytes.len().is_multiple_of(RECORD) {
            return Err(EmbedError::Format(format!("record file length {} is not a multiple of {RECORD}", bytes.len())));
        }
        let mut entries = Vec::with_capacity(bytes.len() / RECORD);
        for rec in bytes.chunks_exact(RECORD) {
            let i = u32::from_le_bytes(rec[0..4].try_into().expect("4 bytes"));
            let j = u32::from_le_bytes(rec[4..8].try_into().expect("4 bytes"));
            let x = f64::from_le_bytes(rec[8..16].try_into().expect("8 bytes"));
            if i as usize >= vocab_size || j as usize >= vocab_size {
                return Err(EmbedError::Format(format!("record ({i}, {j}) is outside the vocabulary")));
            }
            if !(x.is_finite() && x > 0.0) {
                return Err(EmbedError::Format(format!("record ({i}, {j}) has weight {x}")));
            }
            entries.push((i, j, T::of(x)));
        }
        Ok(Self::from_entries(entries, vocab_size, window, weighting))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> EmbeddingModel<f64> {
        let words = vec!["flu".to_string(), "grippe".to_string()];
        let mut m = EmbeddingModel::from_parts(
            words,
            2,
            vec![0.1, -0.2, 1.0 / 3.0, 2.5e-9],
            vec![0.0, 1.0, -7.0, 0.125],
            vec![0.3, 0.4],
            vec![-0.5, 0.6],
        )
        .unwrap();
        m.meta.iterations = 3;
        m.meta.losses = vec![3.0, 2.0, 1.0];
        m
    }

    #[test]
    fn binary_roundtrip_is_bit_exact() {
        let m = model();
        let back = EmbeddingModel::<f64>::from_bytes(&m.to_bytes()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn truncated_and_mismatched_files_fail() {
        let bytes = model().to_bytes();
        for cut in [0, 5, 20, bytes.len() - 1] {
            assert!(EmbeddingModel::<f64>::from_bytes(&bytes[..cut]).is_err(), "cut {cut}");
        }
        assert!(EmbeddingModel::<f32>::from_bytes(&bytes).is_err());
        let mut wrong = bytes.clone();
        wrong[8] = 9;
        assert!(EmbeddingModel::<f64>::from_bytes(&wrong).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn text_roundtrip_keeps_combined_vectors() {
        let m = model();
        let mut buf = Vec::new();
        m.write_text(&mut buf, VectorMode::Sum).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), m.len());
        let back = EmbeddingModel::<f64>::read_text(&buf[..]).unwrap();
        for w in ["flu", "grippe"] {
            assert_eq!(back.combined_vector(w, VectorMode::Sum).unwrap(), m.combined_vector(w, VectorMode::Sum).unwrap());
        }
    }

    #[test]
    fn records_roundtrip() {
        let m = CooccurrenceMatrix::<f64>::from_entries(vec![(0, 1, 0.5), (1, 0, 0.5), (1, 1, 2.0)], 2, 3, Weighting::Unit);
        let back = CooccurrenceMatrix::<f64>::from_records(&m.to_records(), 2, 3, Weighting::Unit).unwrap();
        assert_eq!(back, m);
        assert!(CooccurrenceMatrix::<f64>::from_records(&m.to_records()[..17], 2, 3, Weighting::Unit).is_err());
        assert!(CooccurrenceMatrix::<f64>::from_records(&m.to_records(), 1, 3, Weighting::Unit).is_err());
    }
}
