//! In-place corpus enrichment: related WordNet lemmas, sorted by Resnik
//! similarity and split into two halves, are inserted around every seed
//! occurrence (X₁ before the seed, X₂ after it).

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{stem, TokenStream};
use crate::wordnet::{resnik, InformationContent, Pos, Relation, WordNetDb};

/// Which corpus variant to build. `None` leaves the stream untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    None,
    Syno,
    Hypo,
    Hyper,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::None, Variant::Syno, Variant::Hypo, Variant::Hyper];

    pub fn relation(self) -> Option<Relation> {
        match self {
            Variant::None => None,
            Variant::Syno => Some(Relation::Synonym),
            Variant::Hypo => Some(Relation::Hyponym),
            Variant::Hyper => Some(Relation::Hypernym),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::None => "none",
            Variant::Syno => "syno",
            Variant::Hypo => "hypo",
            Variant::Hyper => "hyper",
        }
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "glove" | "baseline" => Ok(Variant::None),
            "syno" | "synonym" | "glovesyno" => Ok(Variant::Syno),
            "hypo" | "hyponym" | "glovehypo" => Ok(Variant::Hypo),
            "hyper" | "hypernym" | "glovehyper" => Ok(Variant::Hyper),
            _ => Err(format!("unknown variant {s:?}")),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    /// First ⌈k/2⌉ of the sorted list before the seed, the rest after.
    #[default]
    Contiguous,
    /// Alternate down the sorted list: X₁, X₂, X₁, …
    RoundRobin,
}

impl FromStr for SplitMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "contiguous" => Ok(SplitMode::Contiguous),
            "round-robin" | "round_robin" | "roundrobin" => Ok(SplitMode::RoundRobin),
            _ => Err(format!("unknown split mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedTerm {
    pub lemma: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPlan {
    pub seed: String,
    pub seed_stem: String,
    pub relation: Relation,
    pub sorted: Vec<PlannedTerm>,
    pub left: Vec<PlannedTerm>,
    pub right: Vec<PlannedTerm>,
}

impl AugmentationPlan {
    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Plan from an explicit similarity-scored list.
    pub fn from_scored(seed: &str, relation: Relation, mut scored: Vec<PlannedTerm>, split: SplitMode) -> Self {
        scored.sort_by(|a, b| b.similarity.total_cmp(&a.similarity).then_with(|| a.lemma.cmp(&b.lemma)));
        let (left, right) = split_sorted(&scored, split);
        Self { seed: seed.to_owned(), seed_stem: stem(seed), relation, sorted: scored, left, right }
    }
}

pub fn split_sorted(sorted: &[PlannedTerm], mode: SplitMode) -> (Vec<PlannedTerm>, Vec<PlannedTerm>) {
    match mode {
        SplitMode::Contiguous => {
            let (l, r) = sorted.split_at(sorted.len().div_ceil(2));
            (l.to_vec(), r.to_vec())
        }
        SplitMode::RoundRobin => {
            let left = sorted.iter().step_by(2).cloned().collect();
            let right = sorted.iter().skip(1).step_by(2).cloned().collect();
            (left, right)
        }
    }
}

/// Related lemmas of `seed` sorted by Resnik similarity (descending, ties
/// lexicographic) and split into the two insertion halves.
pub fn build_plan(
    seed: &str,
    relation: Relation,
    db: &WordNetDb,
    ic: &InformationContent,
    split: SplitMode,
    pos_set: &[Pos],
) -> AugmentationPlan {
    let scored = db
        .related_lemmas(seed, relation, pos_set)
        .into_iter()
        .map(|lemma| {
            let similarity = resnik(db, ic, seed, &lemma, pos_set);
            PlannedTerm { lemma, similarity }
        })
        .collect();
    AugmentationPlan::from_scored(seed, relation, scored, split)
}

/// Plans keyed by seed stem.
pub type PlanSet = BTreeMap<String, AugmentationPlan>;

/// One plan per seed stem. Each seed brings its candidate surface forms; the
/// first form with a non-empty relation set is used.
pub fn build_plans<'a, I, S>(
    seeds: I,
    relation: Relation,
    db: &WordNetDb,
    ic: &InformationContent,
    split: SplitMode,
    pos_set: &[Pos],
) -> PlanSet
where
    I: IntoIterator<Item = (String, S)>,
    S: IntoIterator<Item = &'a str>,
{
    let mut plans = PlanSet::new();
    for (seed_stem, surfaces) in seeds {
        if plans.contains_key(&seed_stem) {
            continue;
        }
        let mut chosen = None;
        for surface in surfaces {
            let plan = build_plan(surface, relation, db, ic, split, pos_set);
            let found = !plan.is_empty();
            if chosen.is_none() || found {
                chosen = Some(plan);
            }
            if found {
                break;
            }
        }
        if let Some(mut plan) = chosen {
            plan.seed_stem = seed_stem.clone();
            plans.insert(seed_stem, plan);
        }
    }
    plans
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Matcher {
    /// Token equals the seed stem (the stream is already stemmed).
    #[default]
    Exact,
    /// stem(token) equals the seed stem.
    Stemmed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InsertForm {
    #[default]
    Stemmed,
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentOptions {
    pub matcher: Matcher,
    pub form: InsertForm,
    /// Inserted tokens shorter than this are skipped, like corpus tokens.
    pub min_len: usize,
}

impl Default for AugmentOptions {
    fn default() -> Self {
        Self { matcher: Matcher::Exact, form: InsertForm::Stemmed, min_len: crate::corpus::DEFAULT_MIN_LEN }
    }
}

/// Tokens inserted before and after the seed under `options`.
pub fn insertion_tokens(plan: &AugmentationPlan, options: &AugmentOptions) -> (Vec<String>, Vec<String>) {
    let render = |terms: &[PlannedTerm]| -> Vec<String> {
        terms
            .iter()
            .map(|t| match options.form {
                InsertForm::Stemmed => stem(&t.lemma),
                InsertForm::Surface => t.lemma.clone(),
            })
            .filter(|t| t.chars().count() >= options.min_len && t.chars().any(char::is_alphabetic))
            .collect()
    };
    (render(&plan.left), render(&plan.right))
}

/// One seed occurrence. `position` indexes the original stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Insertion {
    pub position: usize,
    pub seed: String,
    pub before: Vec<String>,
    pub after: Vec<String>,
}

impl Insertion {
    pub fn inserted_count(&self) -> usize {
        self.before.len() + self.after.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AugmentedStream {
    pub tokens: TokenStream,
    pub log: Vec<Insertion>,
}

impl AugmentedStream {
    /// Removes every logged insertion, checking each against the stream.
    pub fn restore(&self) -> Result<TokenStream, String> {
        let toks = self.tokens.tokens();
        let mut keep = vec![true; toks.len()];
        let mut shift = 0usize;
        for ins in &self.log {
            let seed_at = ins.position + shift + ins.before.len();
            let start = seed_at - ins.before.len();
            let end = seed_at + 1 + ins.after.len();
            if end > toks.len() {
                return Err(format!("insertion at {} runs past the stream", ins.position));
            }
            if toks[start..seed_at] != ins.before[..] || toks[seed_at + 1..end] != ins.after[..] {
                return Err(format!("insertion at {} does not match the stream", ins.position));
            }
            keep[start..seed_at].iter_mut().for_each(|k| *k = false);
            keep[seed_at + 1..end].iter_mut().for_each(|k| *k = false);
            shift += ins.inserted_count();
        }
        let docs = self.tokens.documents().enumerate().map(|(d, doc)| {
            let range = self.tokens.document_range(d);
            doc.iter().zip(range).filter(|(_, i)| keep[*i]).map(|(t, _)| t.clone()).collect::<Vec<_>>()
        });
        Ok(TokenStream::from_documents(docs))
    }

    pub fn log_json_lines(&self) -> String {
        self.log.iter().map(|i| serde_json::to_string(i).expect("insertion serializes") + "\n").collect()
    }
}

/// Single pass over `stream`: each seed occurrence gets its plan's halves
/// around it. Inserted tokens are never matched themselves. Every matched
/// occurrence is logged, including those with an empty plan.
pub fn augment_stream(stream: &TokenStream, plans: &PlanSet, options: &AugmentOptions) -> AugmentedStream {
    let rendered: BTreeMap<&str, (Vec<String>, Vec<String>)> =
        plans.iter().map(|(k, p)| (k.as_str(), insertion_tokens(p, options))).collect();
    let mut log = Vec::new();
    let mut docs = Vec::with_capacity(stream.num_documents());
    for d in 0..stream.num_documents() {
        let range = stream.document_range(d);
        let mut out = Vec::with_capacity(range.len());
        for pos in range {
            let tok = &stream.tokens()[pos];
            let key = match options.matcher {
                Matcher::Exact => None,
                Matcher::Stemmed => Some(stem(tok)),
            };
            let key = key.as_deref().unwrap_or(tok);
            match rendered.get(key) {
                Some((before, after)) => {
                    out.extend(before.iter().cloned());
                    out.push(tok.clone());
                    out.extend(after.iter().cloned());
                    log.push(Insertion { position: pos, seed: key.to_owned(), before: before.clone(), after: after.clone() });
                }
                None => out.push(tok.clone()),
            }
        }
        docs.push(out);
    }
    AugmentedStream { tokens: TokenStream::from_documents(docs), log }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scored(items: &[(&str, f64)]) -> Vec<PlannedTerm> {
        items.iter().map(|(l, s)| PlannedTerm { lemma: l.to_string(), similarity: *s }).collect()
    }

    fn lemmas(terms: &[PlannedTerm]) -> Vec<&str> {
        terms.iter().map(|t| t.lemma.as_str()).collect()
    }

    fn headache_plan() -> AugmentationPlan {
        let items = scored(&[("concern", 2.0), ("vexation", 1.0), ("worry", 4.0), ("cephalalgia", 3.0)]);
        AugmentationPlan::from_scored("headache", Relation::Synonym, items, SplitMode::Contiguous)
    }

    #[test]
    fn contiguous_split_of_sorted_list() {
        let p = headache_plan();
        assert_eq!(lemmas(&p.sorted), ["worry", "cephalalgia", "concern", "vexation"]);
        assert_eq!(lemmas(&p.left), ["worry", "cephalalgia"]);
        assert_eq!(lemmas(&p.right), ["concern", "vexation"]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let p = AugmentationPlan::from_scored("x", Relation::Synonym, scored(&[("b", 1.0), ("a", 1.0), ("c", 1.0)]), SplitMode::Contiguous);
        assert_eq!(lemmas(&p.sorted), ["a", "b", "c"]);
        assert_eq!(lemmas(&p.left), ["a", "b"]);
    }

    #[test]
    fn round_robin_alternates() {
        let s = scored(&[("a", 5.0), ("b", 4.0), ("c", 3.0), ("d", 2.0), ("e", 1.0)]);
        let (l, r) = split_sorted(&s, SplitMode::RoundRobin);
        assert_eq!(lemmas(&l), ["a", "c", "e"]);
        assert_eq!(lemmas(&r), ["b", "d"]);
    }

    #[test]
    fn empty_plan_has_empty_halves() {
        let p = AugmentationPlan::from_scored("x", Relation::Hyponym, Vec::new(), SplitMode::Contiguous);
        assert!(p.left.is_empty() && p.right.is_empty());
    }

    #[test]
    fn seed_occurrences_get_both_halves() {
        let mut plans = PlanSet::new();
        plans.insert("headach".into(), headache_plan());
        let stream = TokenStream::from_documents([vec!["headach", "bad", "night", "headach", "again", "sleep"]]);
        let aug = augment_stream(&stream, &plans, &AugmentOptions::default());
        assert_eq!(aug.log.len(), 2);
        assert_eq!(aug.tokens.len(), 6 + 2 * 4);
        assert_eq!(aug.log[0].before, ["worri", "cephalalgia"]);
        assert_eq!(aug.log[0].after, ["concern", "vexat"]);
        assert_eq!(aug.restore().unwrap(), stream);
    }

    #[test]
    fn no_seed_means_identity() {
        let mut plans = PlanSet::new();
        plans.insert("headach".into(), headache_plan());
        let stream = TokenStream::from_documents([vec!["fever", "chill"], vec!["rash"]]);
        let aug = augment_stream(&stream, &plans, &AugmentOptions::default());
        assert_eq!(aug.tokens, stream);
        assert!(aug.log.is_empty());
    }

    #[test]
    fn variant_names_parse() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
    }
}
