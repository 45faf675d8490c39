//! Scoring candidate lists against the ground truth, and parameter sweeps.

mod metrics;
mod sweep;

pub use metrics::{
    harmonic, macro_metrics, micro_metrics, mrr, rate_f64, EvalInput, MacroCounts, MicroCounts, PairResult, Prf, Rate,
};
pub use sweep::{sweep, write_sweep_csv, Grid, SweepContext, SweepRow, SWEEP_CSV_HEADER};

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::embed::{EmbeddingModel, VectorMode};
use crate::lexicon::{GroundTruthLexicon, SeedAssignment};
use crate::query::{QueryError, QueryIndex};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("ground-truth lexicon is empty")]
    EmptyLexicon,
    #[error("candidate list size must be at least 1")]
    InvalidN,
    #[error("{0}")]
    Point(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub n: usize,
    pub micro: Prf,
    #[serde(rename = "macro")]
    pub macro_: Prf,
    #[serde(rename = "MRR")]
    pub mrr: f64,
    #[serde(rename = "NumCon")]
    pub num_con: u64,
    pub micro_counts: MicroCounts,
    pub macro_counts: MacroCounts,
    pub pairs: usize,
    /// Seeds without a usable vector; their lists are not generated and do
    /// not enter the micro denominators.
    pub oov_seeds: Vec<String>,
    pub flags: Vec<String>,
    pub config: serde_json::Value,
}

/// Computes every metric from already generated lists.
pub fn report_from_input(input: &EvalInput, n: usize, config: serde_json::Value) -> EvalReport {
    let (micro, micro_counts) = micro_metrics(input);
    let (macro_, macro_counts) = macro_metrics(input);
    let mut flags = Vec::new();
    if micro_counts.emitted == 0 {
        flags.push("no candidates emitted; micro precision set to 0".to_owned());
    }
    if input.total_synonyms == 0 {
        flags.push("no ground-truth synonyms; micro recall set to 0".to_owned());
    }
    if macro_counts.concepts_attempted == 0 {
        flags.push("no concept attempted; macro precision set to 0".to_owned());
    }
    let oov_seeds: BTreeSet<String> = input.pairs.iter().filter(|p| p.list.is_none()).map(|p| p.seed.clone()).collect();
    EvalReport {
        n,
        micro,
        macro_,
        mrr: mrr(input),
        num_con: macro_counts.concepts_hit,
        micro_counts,
        macro_counts,
        pairs: input.pairs.len(),
        oov_seeds: oov_seeds.into_iter().collect(),
        flags,
        config,
    }
}

/// Candidate lists of size `n` for every assignment pair. OOV seeds get `None`.
pub fn generate_lists<T: Scalar>(
    model: &EmbeddingModel<T>,
    lexicon: &GroundTruthLexicon,
    assignments: &SeedAssignment,
    n: usize,
    mode: VectorMode,
) -> Result<EvalInput, EvalError> {
    if lexicon.is_empty() {
        return Err(EvalError::EmptyLexicon);
    }
    if n == 0 {
        return Err(EvalError::InvalidN);
    }
    let index = QueryIndex::new(model, mode);
    let none = BTreeSet::new();
    let pairs = assignments
        .pairs
        .par_iter()
        .map(|p| {
            let list = match index.top_candidates(&p.seed, n, &none) {
                Ok(l) => Some(l),
                Err(e @ (QueryError::SeedNotFound(_) | QueryError::ZeroVector(_))) => {
                    log::info!("seed skipped: {e}");
                    None
                }
                Err(e) => unreachable!("unexpected query error {e}"),
            };
            PairResult { cui: p.cui.clone(), seed: p.seed.clone(), targets: p.targets.clone(), list }
        })
        .collect();
    Ok(EvalInput {
        pairs,
        total_concepts: lexicon.len() as u64,
        total_synonyms: assignments.pairs.iter().map(|p| p.targets.len() as u64).sum(),
    })
}

/// Restricts every generated list to its first `n` candidates.
pub fn truncate_input(input: &EvalInput, n: usize) -> EvalInput {
    EvalInput {
        pairs: input
            .pairs
            .iter()
            .map(|p| PairResult { list: p.list.as_ref().map(|l| l.truncated(n)), ..p.clone() })
            .collect(),
        ..*input
    }
}

pub fn evaluate<T: Scalar>(
    model: &EmbeddingModel<T>,
    lexicon: &GroundTruthLexicon,
    assignments: &SeedAssignment,
    n: usize,
    mode: VectorMode,
    config: serde_json::Value,
) -> Result<EvalReport, EvalError> {
    let input = generate_lists(model, lexicon, assignments, n, mode)?;
    Ok(report_from_input(&input, n, config))
}
