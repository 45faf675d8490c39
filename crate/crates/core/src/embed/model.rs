use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorMode {
    /// w + w̃
    #[default]
    Sum,
    /// w only
    MainOnly,
}

impl FromStr for VectorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(VectorMode::Sum),
            "main" | "main-only" => Ok(VectorMode::MainOnly),
            _ => Err(format!("unknown vector mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub iterations: usize,
    /// Objective value accumulated during each pass.
    pub losses: Vec<f64>,
    #[serde(default)]
    pub config: serde_json::Value,
}

impl TrainingMeta {
    pub fn final_loss(&self) -> Option<f64> {
        self.losses.last().copied()
    }
}

/// Vocabulary with main/context vectors and biases, all row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel<T> {
    words: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    pub(crate) w: Vec<T>,
    pub(crate) wc: Vec<T>,
    pub(crate) b: Vec<T>,
    pub(crate) bc: Vec<T>,
    pub meta: TrainingMeta,
}

impl<T: Scalar> EmbeddingModel<T> {
    pub fn from_parts(
        words: Vec<String>,
        dim: usize,
        w: Vec<T>,
        wc: Vec<T>,
        b: Vec<T>,
        bc: Vec<T>,
    ) -> Result<Self, EmbedError> {
        let n = words.len();
        if dim == 0 {
            return Err(EmbedError::InvalidConfig("vector size must be at least 1".into()));
        }
        if w.len() != n * dim || wc.len() != n * dim || b.len() != n || bc.len() != n {
            return Err(EmbedError::Format("parameter arrays do not match vocabulary and dimension".into()));
        }
        if w.iter().chain(&wc).chain(&b).chain(&bc).any(|x| !x.is_finite()) {
            return Err(EmbedError::Format("model contains non-finite values".into()));
        }
        let index: HashMap<String, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        if index.len() != n {
            return Err(EmbedError::Format("duplicate word in vocabulary".into()));
        }
        Ok(Self { words, index, dim, w, wc, b, bc, meta: TrainingMeta::default() })
    }

    /// Model whose main vectors are `vectors`, with zero context vectors and biases.
    pub fn from_vectors(words: Vec<String>, dim: usize, vectors: Vec<T>) -> Result<Self, EmbedError> {
        let n = words.len();
        Self::from_parts(words, dim, vectors, vec![T::zero(); n * dim], vec![T::zero(); n], vec![T::zero(); n])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn main(&self, i: usize) -> &[T] {
        &self.w[i * self.dim..(i + 1) * self.dim]
    }

    pub fn context(&self, i: usize) -> &[T] {
        &self.wc[i * self.dim..(i + 1) * self.dim]
    }

    pub fn bias(&self, i: usize) -> T {
        self.b[i]
    }

    pub fn context_bias(&self, i: usize) -> T {
        self.bc[i]
    }

    /// Vector of word `i` under `mode`.
    pub fn vector_at(&self, i: usize, mode: VectorMode) -> Vec<T> {
        match mode {
            VectorMode::Sum => self.main(i).iter().zip(self.context(i)).map(|(a, b)| *a + *b).collect(),
            VectorMode::MainOnly => self.main(i).to_vec(),
        }
    }

    pub fn combined_vector(&self, word: &str, mode: VectorMode) -> Result<Vec<T>, EmbedError> {
        let i = self.index_of(word).ok_or_else(|| EmbedError::NotFound(word.to_owned()))?;
        Ok(self.vector_at(i, mode))
    }

    /// Multiplies every parameter vector by `factor`. Biases are untouched.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.w.iter_mut().chain(out.wc.iter_mut()).for_each(|x| *x *= factor);
        out
    }

    /// Prediction w_i·w̃_j + b_i + b̃_j.
    pub fn predict(&self, i: usize, j: usize) -> T {
        let dot: T = self.main(i).iter().zip(self.context(j)).map(|(a, b)| *a * *b).sum();
        dot + self.b[i] + self.bc[j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> EmbeddingModel<f64> {
        let words = vec!["a".to_string(), "b".to_string()];
        EmbeddingModel::from_parts(words, 2, vec![0.0, 0.0, 1.0, 2.0], vec![3.0, 4.0, 0.5, 0.5], vec![0.0; 2], vec![0.0; 2]).unwrap()
    }

    #[test]
    fn combined_vector_modes() {
        let m = model();
        assert_eq!(m.combined_vector("a", VectorMode::Sum).unwrap(), [3.0, 4.0]);
        assert_eq!(m.combined_vector("b", VectorMode::MainOnly).unwrap(), [1.0, 2.0]);
        assert!(matches!(m.combined_vector("zzz", VectorMode::Sum), Err(EmbedError::NotFound(_))));
    }

    #[test]
    fn rejects_bad_shapes_and_values() {
        let words = vec!["a".to_string()];
        assert!(EmbeddingModel::<f64>::from_vectors(words.clone(), 2, vec![1.0]).is_err());
        assert!(EmbeddingModel::<f64>::from_vectors(words.clone(), 1, vec![f64::NAN]).is_err());
        assert!(EmbeddingModel::<f64>::from_vectors(words, 0, vec![]).is_err());
    }
}
