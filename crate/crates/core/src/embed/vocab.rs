use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::corpus::TokenStream;

/// Dense word indexing, most frequent first, ties lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    words: Vec<String>,
    freqs: Vec<u64>,
    pub min_count: usize,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_counts(mut counts: Vec<(String, u64)>, min_count: usize) -> Self {
        counts.retain(|(_, c)| *c >= min_count as u64);
        counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (words, freqs): (Vec<String>, Vec<u64>) = counts.into_iter().unzip();
        let mut v = Self { words, freqs, min_count, index: HashMap::new() };
        v.reindex();
        v
    }

    /// Rebuilds the lookup table, e.g. after deserializing.
    pub fn reindex(&mut self) {
        self.index = self.words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, i: u32) -> &str {
        &self.words[i as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn frequency(&self, i: u32) -> u64 {
        self.freqs[i as usize]
    }
}

pub fn build_vocab(stream: &TokenStream, min_count: usize) -> Result<Vocabulary, EmbedError> {
    if min_count == 0 {
        return Err(EmbedError::InvalidConfig("min_count must be at least 1".into()));
    }
    if stream.is_empty() {
        return Err(EmbedError::EmptyStream);
    }
    let counts = stream.frequencies().into_iter().map(|(w, c)| (w.to_owned(), c as u64)).collect();
    Ok(Vocabulary::from_counts(counts, min_count))
}
