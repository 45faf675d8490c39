//! Consumer health vocabulary enrichment with GloVe embeddings and WordNet
//! corpus augmentation.

pub mod augment;
pub mod corpus;
pub mod embed;
pub mod eval;
pub mod lexicon;
pub mod query;
pub mod scalar;
pub mod synthetic;
pub mod wordnet;

pub use scalar::Scalar;

/// Double-precision embedding model.
pub type Model = embed::EmbeddingModel<f64>;
/// Single-precision embedding model.
pub type Model32 = embed::EmbeddingModel<f32>;
/// Double-precision co-occurrence matrix.
pub type Matrix = embed::CooccurrenceMatrix<f64>;
pub type Matrix32 = embed::CooccurrenceMatrix<f32>;
pub use eval::Rate;
