//! Cosine ranking of the vocabulary against a seed vector.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{EmbeddingModel, VectorMode};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum QueryError {
    #[error("seed {0:?} is not in the model vocabulary")]
    SeedNotFound(String),
    #[error("vector for {0:?} is all zeros; cosine is undefined")]
    ZeroVector(String),
    #[error("vectors have different dimensions ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("candidate list size must be at least 1")]
    InvalidN,
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// (v1·v2) / (|v1||v2|), clamped to [-1, 1]. `None` if either vector is zero.
pub fn cosine_checked<T: Scalar>(a: &[T], b: &[T]) -> Result<Option<T>, QueryError> {
    if a.len() != b.len() {
        return Err(QueryError::DimensionMismatch(a.len(), b.len()));
    }
    let (na, nb) = (dot(a, a).sqrt(), dot(b, b).sqrt());
    if na == T::zero() || nb == T::zero() {
        return Ok(None);
    }
    Ok(Some((dot(a, b) / (na * nb)).max(-T::one()).min(T::one())))
}

pub fn cosine<T: Scalar>(a: &[T], b: &[T]) -> Result<T, QueryError> {
    cosine_checked(a, b)?.ok_or_else(|| QueryError::ZeroVector(String::new()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub term: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateList {
    pub seed: String,
    pub n: usize,
    pub candidates: Vec<Candidate>,
}

impl CandidateList {
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.term.as_str())
    }

    /// `seed \t rank \t term \t score` lines, ranks starting at 1.
    pub fn to_tsv(&self) -> String {
        self.candidates
            .iter()
            .enumerate()
            .map(|(r, c)| format!("{}\t{}\t{}\t{}\n", self.seed, r + 1, c.term, c.score))
            .collect()
    }

    /// Keeps only the first `n` candidates.
    pub fn truncated(&self, n: usize) -> Self {
        Self { seed: self.seed.clone(), n, candidates: self.candidates.iter().take(n).cloned().collect() }
    }
}

/// Precomputed vectors and norms for repeated queries on one model.
pub struct QueryIndex<'a, T> {
    model: &'a EmbeddingModel<T>,
    vectors: Vec<Vec<T>>,
    norms: Vec<T>,
}

impl<'a, T: Scalar> QueryIndex<'a, T> {
    pub fn new(model: &'a EmbeddingModel<T>, mode: VectorMode) -> Self {
        let vectors: Vec<Vec<T>> = (0..model.len()).map(|i| model.vector_at(i, mode)).collect();
        let norms = vectors.iter().map(|v| dot(v, v).sqrt()).collect();
        Self { model, vectors, norms }
    }

    /// Top `n` words by cosine to `seed`, excluding the seed, `exclusions`
    /// and zero vectors. Ties are broken lexicographically.
    pub fn top_candidates(&self, seed: &str, n: usize, exclusions: &BTreeSet<String>) -> Result<CandidateList, QueryError> {
        if n == 0 {
            return Err(QueryError::InvalidN);
        }
        let s = self.model.index_of(seed).ok_or_else(|| QueryError::SeedNotFound(seed.to_owned()))?;
        let ns = self.norms[s];
        if ns == T::zero() {
            return Err(QueryError::ZeroVector(seed.to_owned()));
        }
        let sv = &self.vectors[s];
        let words = self.model.words();
        let mut scored: Vec<(T, usize)> = (0..words.len())
            .filter(|&i| i != s && self.norms[i] != T::zero() && !exclusions.contains(&words[i]))
            .map(|i| {
                let c = dot(sv, &self.vectors[i]) / (ns * self.norms[i]);
                (c.max(-T::one()).min(T::one()), i)
            })
            .collect();
        let order = |a: &(T, usize), b: &(T, usize)| b.0.partial_cmp(&a.0).expect("finite scores").then_with(|| words[a.1].cmp(&words[b.1]));
        if scored.len() > n {
            scored.select_nth_unstable_by(n - 1, order);
            scored.truncate(n);
        }
        scored.sort_by(order);
        let candidates = scored.into_iter().map(|(c, i)| Candidate { term: words[i].clone(), score: c.as_f64() }).collect();
        Ok(CandidateList { seed: seed.to_owned(), n, candidates })
    }
}

pub fn top_candidates<T: Scalar>(
    model: &EmbeddingModel<T>,
    seed: &str,
    n: usize,
    exclusions: &BTreeSet<String>,
    mode: VectorMode,
) -> Result<CandidateList, QueryError> {
    QueryIndex::new(model, mode).top_candidates(seed, n, exclusions)
}
