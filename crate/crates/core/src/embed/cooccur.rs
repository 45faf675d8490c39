use std::collections::HashMap;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EmbedError, Vocabulary};
use crate::corpus::TokenStream;
use crate::scalar::Scalar;

/// Largest supported window. Inverse-distance sums are accumulated exactly
/// as integers scaled by lcm(1..=window), which must fit in 128 bits.
pub const MAX_WINDOW: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    /// A pair at distance δ contributes 1/δ.
    #[default]
    InverseDistance,
    /// Every pair in the window contributes 1.
    Unit,
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inverse-distance" | "inverse_distance" | "harmonic" => Ok(Weighting::InverseDistance),
            "unit" => Ok(Weighting::Unit),
            _ => Err(format!("unknown weighting {s:?}")),
        }
    }
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::InverseDistance => "inverse-distance",
            Weighting::Unit => "unit",
        }
    }
}

/// Sparse symmetric co-occurrence counts. Both (i, j) and (j, i) are stored,
/// sorted by row then column; zero weights are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceMatrix<T> {
    entries: Vec<(u32, u32, T)>,
    pub vocab_size: usize,
    pub window: usize,
    pub weighting: Weighting,
}

impl<T: Scalar> CooccurrenceMatrix<T> {
    /// Sorts, merges duplicate cells by summation and drops zeros.
    pub fn from_entries(mut entries: Vec<(u32, u32, T)>, vocab_size: usize, window: usize, weighting: Weighting) -> Self {
        entries.sort_by_key(|e| (e.0, e.1));
        let mut merged: Vec<(u32, u32, T)> = Vec::with_capacity(entries.len());
        for (i, j, x) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += x,
                _ => merged.push((i, j, x)),
            }
        }
        merged.retain(|e| e.2 != T::zero());
        Self { entries: merged, vocab_size, window, weighting }
    }

    pub fn entries(&self) -> &[(u32, u32, T)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: u32, j: u32) -> T {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(i, j)))
            .map_or(T::zero(), |k| self.entries[k].2)
    }

    /// Stored entries of row `i` (the word's co-occurrence vector).
    pub fn row(&self, i: u32) -> &[(u32, u32, T)] {
        let start = self.entries.partition_point(|e| e.0 < i);
        let end = self.entries.partition_point(|e| e.0 <= i);
        &self.entries[start..end]
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|&(i, j, x)| self.get(j, i) == x)
    }
}

fn lcm_upto(n: usize) -> u128 {
    let gcd = |mut a: u128, mut b: u128| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    (1..=n as u128).fold(1, |acc, k| acc / gcd(acc, k) * k)
}

type Accum = HashMap<(u32, u32), u128>;

fn accumulate_docs(stream: &TokenStream, docs: std::ops::Range<usize>, ids: &[Option<u32>], window: usize, incr: &[u128]) -> Accum {
    let mut acc = Accum::new();
    for d in docs {
        let range = stream.document_range(d);
        for p in range.clone() {
            let Some(a) = ids[p] else { continue };
            let end = (p + window).min(range.end - 1);
            for q in p + 1..=end {
                let Some(b) = ids[q] else { continue };
                let w = incr[q - p];
                *acc.entry((a, b)).or_insert(0) += w;
                *acc.entry((b, a)).or_insert(0) += w;
            }
        }
    }
    acc
}

/// Builds the matrix with one shard per chunk of documents. The result does
/// not depend on `shards`.
pub fn build_cooccurrence_sharded<T: Scalar>(
    stream: &TokenStream,
    vocab: &Vocabulary,
    window: usize,
    weighting: Weighting,
    shards: usize,
) -> Result<CooccurrenceMatrix<T>, EmbedError> {
    if window == 0 || window > MAX_WINDOW {
        return Err(EmbedError::InvalidConfig(format!("window must be in 1..={MAX_WINDOW}, got {window}")));
    }
    let scale = match weighting {
        Weighting::InverseDistance => lcm_upto(window),
        Weighting::Unit => 1,
    };
    let incr: Vec<u128> = (0..=window)
        .map(|d| match (weighting, d) {
            (_, 0) => 0,
            (Weighting::InverseDistance, d) => scale / d as u128,
            (Weighting::Unit, _) => 1,
        })
        .collect();
    let ids: Vec<Option<u32>> = stream.tokens().iter().map(|t| vocab.get(t)).collect();

    let ndocs = stream.num_documents();
    let shards = shards.clamp(1, ndocs.max(1));
    let per = ndocs.div_ceil(shards).max(1);
    let merged = (0..shards)
        .into_par_iter()
        .map(|s| accumulate_docs(stream, (s * per).min(ndocs)..((s + 1) * per).min(ndocs), &ids, window, &incr))
        .reduce(Accum::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });

    let entries = merged
        .into_iter()
        .map(|((i, j), v)| {
            let x = Ratio::new_raw(v, scale).to_f64().expect("finite co-occurrence weight");
            (i, j, T::of(x))
        })
        .collect();
    Ok(CooccurrenceMatrix::from_entries(entries, vocab.len(), window, weighting))
}

/// Windowed, document-bounded co-occurrence, using every available thread.
pub fn build_cooccurrence<T: Scalar>(
    stream: &TokenStream,
    vocab: &Vocabulary,
    window: usize,
    weighting: Weighting,
) -> Result<CooccurrenceMatrix<T>, EmbedError> {
    build_cooccurrence_sharded(stream, vocab, window, weighting, rayon::current_num_threads() * 4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::build_vocab;

    fn xyz() -> (TokenStream, Vocabulary) {
        let s = TokenStream::from_documents([vec!["x", "y", "z"]]);
        let v = build_vocab(&s, 1).unwrap();
        (s, v)
    }

    #[test]
    fn unit_pairs_by_hand() {
        let (s, v) = xyz();
        let m: CooccurrenceMatrix<f64> = build_cooccurrence(&s, &v, 2, Weighting::Unit).unwrap();
        let (x, y, z) = (v.get("x").unwrap(), v.get("y").unwrap(), v.get("z").unwrap());
        assert_eq!((m.get(x, y), m.get(x, z), m.get(y, z)), (1.0, 1.0, 1.0));
        assert!(m.is_symmetric());
        assert_eq!(m.len(), 6);
    }

    #[test]
    fn inverse_distance_by_hand() {
        let (s, v) = xyz();
        let m: CooccurrenceMatrix<f64> = build_cooccurrence(&s, &v, 2, Weighting::InverseDistance).unwrap();
        let (x, y, z) = (v.get("x").unwrap(), v.get("y").unwrap(), v.get("z").unwrap());
        assert_eq!((m.get(x, y), m.get(x, z), m.get(y, z)), (1.0, 0.5, 1.0));
    }

    #[test]
    fn windows_stop_at_document_boundaries() {
        let s = TokenStream::from_documents([vec!["x"], vec!["y"]]);
        let v = build_vocab(&s, 1).unwrap();
        let m: CooccurrenceMatrix<f64> = build_cooccurrence(&s, &v, 5, Weighting::Unit).unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn repeated_word_fills_the_diagonal_from_both_sides() {
        let s = TokenStream::from_documents([vec!["x", "x"]]);
        let v = build_vocab(&s, 1).unwrap();
        let m: CooccurrenceMatrix<f64> = build_cooccurrence(&s, &v, 1, Weighting::Unit).unwrap();
        assert_eq!(m.get(0, 0), 2.0);
    }

    #[test]
    fn window_bounds_are_checked() {
        let (s, v) = xyz();
        assert!(build_cooccurrence::<f64>(&s, &v, 0, Weighting::Unit).is_err());
        assert!(build_cooccurrence::<f64>(&s, &v, MAX_WINDOW + 1, Weighting::Unit).is_err());
        assert!(lcm_upto(MAX_WINDOW).checked_mul(1 << 40).is_some());
    }
}
