//! File layout under the workspace root.
//!
//! ```text
//! stream.txt, stream.meta.json
//! lexicon.json, seeds.json
//! augmented/<variant>.txt, .log.jsonl, .meta.json
//! cooccur/<corpus sha>-w<window>-<weighting>-m<min_count>.bin, .json
//! models/<variant>-d<dim>-w<window>.bin, .txt, .meta.json
//! reports/<variant>-d<dim>-w<window>-n<n>.json, sweep.csv, sweep.json
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use chvenrich::augment::Variant;
use chvenrich::embed::Weighting;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct Workspace {
    pub root: PathBuf,
}

impl Workspace {
    pub fn new(root: PathBuf) -> Self {
        Self { root }
    }

    pub fn stream(&self) -> PathBuf {
        self.root.join("stream.txt")
    }

    pub fn lexicon(&self) -> PathBuf {
        self.root.join("lexicon.json")
    }

    pub fn seeds(&self) -> PathBuf {
        self.root.join("seeds.json")
    }

    pub fn augmented(&self, v: Variant) -> PathBuf {
        self.root.join("augmented").join(format!("{v}.txt"))
    }

    /// The stream a variant trains on: the preprocessed stream for `none`.
    pub fn variant_stream(&self, v: Variant) -> PathBuf {
        match v {
            Variant::None => self.stream(),
            _ => self.augmented(v),
        }
    }

    pub fn cooccur(&self, corpus_sha: &str, window: usize, weighting: Weighting, min_count: usize) -> PathBuf {
        self.root.join("cooccur").join(format!("{corpus_sha}-w{window}-{}-m{min_count}.bin", weighting.name()))
    }

    pub fn model(&self, v: Variant, dim: usize, window: usize) -> PathBuf {
        self.root.join("models").join(format!("{v}-d{dim}-w{window}.bin"))
    }

    pub fn report(&self, name: &str) -> PathBuf {
        self.root.join("reports").join(name)
    }
}

/// `foo.txt` → `foo.<ext>`, e.g. `stream.meta.json` next to `stream.txt`.
pub fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn read_string(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::input(e.to_string()))?;
    text.push('\n');
    write(path, text)
}

/// Fails with an input error naming the stage that produces `path`.
pub fn require(path: &Path, producer: &str) -> CliResult<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::input(format!("{} not found; run `chvenrich {producer}` first", path.display())))
    }
}
