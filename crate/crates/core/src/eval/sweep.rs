//! Grid evaluation over vector size, window, list size and corpus variant.
//!
//! Work is shared along the grid: one augmented stream per variant, one
//! co-occurrence matrix per (variant, window), one model per
//! (variant, window, d) and one list generation per model, truncated for
//! every n.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde_json::json;

use super::{generate_lists, report_from_input, truncate_input, EvalReport};
use crate::augment::{augment_stream, build_plans, AugmentOptions, SplitMode, Variant};
use crate::corpus::TokenStream;
use crate::embed::{build_cooccurrence, build_vocab, train, CooccurrenceMatrix, TrainConfig, VectorMode, Vocabulary};
use crate::lexicon::{GroundTruthLexicon, SeedAssignment};
use crate::scalar::Scalar;
use crate::wordnet::{InformationContent, Pos, WordNetDb};

pub const SWEEP_CSV_HEADER: [&str; 12] =
    ["d", "window", "n", "variant", "P_micro", "R_micro", "F_micro", "P_macro", "R_macro", "F_macro", "MRR", "NumCon"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub dims: Vec<usize>,
    pub windows: Vec<usize>,
    pub ns: Vec<usize>,
    pub variants: Vec<Variant>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.dims.len() * self.windows.len() * self.ns.len() * self.variants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub struct SweepContext<'a> {
    pub lexicon: &'a GroundTruthLexicon,
    pub assignments: &'a SeedAssignment,
    pub wordnet: Option<&'a WordNetDb>,
    /// Falls back to counts from the unaugmented corpus.
    pub ic: Option<&'a InformationContent>,
    /// Base training settings; `dim` and `window` come from the grid.
    pub train: TrainConfig,
    pub split: SplitMode,
    pub pos: Vec<Pos>,
    pub augment: AugmentOptions,
    pub vector_mode: VectorMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub d: usize,
    pub window: usize,
    pub n: usize,
    pub variant: Variant,
    pub result: Result<EvalReport, String>,
}

fn variant_stream(corpus: &TokenStream, ctx: &SweepContext, variant: Variant, ic: &Option<Result<InformationContent, String>>) -> Result<TokenStream, String> {
    let Some(relation) = variant.relation() else { return Ok(corpus.clone()) };
    let db = ctx.wordnet.ok_or_else(|| format!("variant {variant} needs a WordNet database"))?;
    let ic = match (ctx.ic, ic) {
        (Some(ic), _) => ic,
        (None, Some(Ok(ic))) => ic,
        (None, Some(Err(e))) => return Err(e.clone()),
        (None, None) => unreachable!("information content computed for WordNet variants"),
    };
    let seeds = ctx.lexicon.seed_surfaces(ctx.assignments);
    let plans = build_plans(
        seeds.iter().map(|(stem, forms)| (stem.clone(), forms.iter().map(String::as_str))),
        relation,
        db,
        ic,
        ctx.split,
        &ctx.pos,
    );
    Ok(augment_stream(corpus, &plans, &ctx.augment).tokens)
}

type Built<T> = Result<(Vocabulary, CooccurrenceMatrix<T>), String>;
type PerN = BTreeMap<usize, Result<EvalReport, String>>;

/// One report per grid point, ordered by d, window, n, variant. Failures are
/// confined to the points they affect.
pub fn sweep<T: Scalar>(corpus: &TokenStream, ctx: &SweepContext, grid: &Grid) -> Vec<SweepRow> {
    let needs_ic = ctx.ic.is_none() && ctx.wordnet.is_some() && grid.variants.iter().any(|v| v.relation().is_some());
    let computed_ic = needs_ic.then(|| {
        InformationContent::from_stream(ctx.wordnet.expect("checked"), corpus).map_err(|e| e.to_string())
    });

    let streams: BTreeMap<Variant, Result<TokenStream, String>> =
        grid.variants.iter().map(|&v| (v, variant_stream(corpus, ctx, v, &computed_ic))).collect();

    let mut matrices: BTreeMap<(Variant, usize), Built<T>> = BTreeMap::new();
    for (&v, stream) in &streams {
        for &w in &grid.windows {
            let built = stream.as_ref().map_err(Clone::clone).and_then(|s| {
                let vocab = build_vocab(s, ctx.train.min_count).map_err(|e| e.to_string())?;
                let m = build_cooccurrence(s, &vocab, w, ctx.train.weighting).map_err(|e| e.to_string())?;
                Ok((vocab, m))
            });
            matrices.insert((v, w), built);
        }
    }

    let max_n = grid.ns.iter().copied().max().unwrap_or(0);
    let jobs: Vec<(Variant, usize, usize)> = grid
        .variants
        .iter()
        .flat_map(|&v| grid.windows.iter().flat_map(move |&w| grid.dims.iter().map(move |&d| (v, w, d))))
        .collect();
    let results: BTreeMap<(Variant, usize, usize), PerN> = jobs
        .par_iter()
        .map(|&(v, w, d)| {
            let per_n = evaluate_point(ctx, &matrices[&(v, w)], v, w, d, max_n, &grid.ns);
            ((v, w, d), per_n)
        })
        .collect();

    let mut rows = Vec::with_capacity(grid.len());
    for &d in &grid.dims {
        for &window in &grid.windows {
            for &n in &grid.ns {
                for &variant in &grid.variants {
                    let result = results[&(variant, window, d)][&n].clone();
                    rows.push(SweepRow { d, window, n, variant, result });
                }
            }
        }
    }
    rows
}

fn evaluate_point<T: Scalar>(
    ctx: &SweepContext,
    built: &Result<(Vocabulary, CooccurrenceMatrix<T>), String>,
    variant: Variant,
    window: usize,
    d: usize,
    max_n: usize,
    ns: &[usize],
) -> BTreeMap<usize, Result<EvalReport, String>> {
    let all_err = |e: String| ns.iter().map(|&n| (n, Err(e.clone()))).collect();
    let (vocab, matrix) = match built {
        Ok(b) => b,
        Err(e) => return all_err(e.clone()),
    };
    let config = TrainConfig { dim: d, window, ..ctx.train.clone() };
    let model = match train(matrix, vocab, &config) {
        Ok(m) => m,
        Err(e) => return all_err(e.to_string()),
    };
    let input = match generate_lists(&model, ctx.lexicon, ctx.assignments, max_n.max(1), ctx.vector_mode) {
        Ok(i) => i,
        Err(e) => return all_err(e.to_string()),
    };
    ns.iter()
        .map(|&n| {
            if n == 0 {
                return (n, Err("candidate list size must be at least 1".to_owned()));
            }
            let echo = json!({
                "d": d,
                "window": window,
                "n": n,
                "variant": variant.name(),
                "train": config,
                "split": ctx.split,
                "final_loss": model.meta.final_loss(),
            });
            (n, Ok(report_from_input(&truncate_input(&input, n), n, echo)))
        })
        .collect()
}

/// Writes the sweep matrix; failed points keep their grid columns and leave
/// the metric cells empty.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        let mut rec = vec![row.d.to_string(), row.window.to_string(), row.n.to_string(), row.variant.name().to_owned()];
        match &row.result {
            Ok(r) => {
                for x in [r.micro.p, r.micro.r, r.micro.f, r.macro_.p, r.macro_.r, r.macro_.f] {
                    rec.push(super::rate_f64(x).to_string());
                }
                rec.push(r.mrr.to_string());
                rec.push(r.num_con.to_string());
            }
            Err(_) => rec.extend(std::iter::repeat_n(String::new(), 8)),
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
