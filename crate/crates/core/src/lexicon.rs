//! Concept/term tables, the ground-truth filter chain and seed assignment.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{stem, tokenize_text, TokenStream};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("concept {cui} has {count} terms, need at least 2 to split into seed and targets")]
    TooFewTerms { cui: String, count: usize },
}

/// One concept with its raw layman terms in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptEntry {
    pub cui: String,
    pub concept_name: String,
    pub terms: Vec<String>,
}

/// Reads `cui \t concept_name \t term` rows, grouping by cui.
pub fn load_concepts(path: &Path, has_header: bool) -> Result<Vec<ConceptEntry>, LexiconError> {
    let file = File::open(path).map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })?;
    read_concepts(file, has_header)
}

pub fn read_concepts<R: Read>(input: R, has_header: bool) -> Result<Vec<ConceptEntry>, LexiconError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(has_header)
        .flexible(true)
        .quoting(false)
        .from_reader(input);

    let mut entries: Vec<ConceptEntry> = Vec::new();
    let mut by_cui: HashMap<String, usize> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| LexiconError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != 3 {
            return Err(LexiconError::Malformed { line, reason: format!("expected 3 columns, found {}", record.len()) });
        }
        let (cui, name, term) = (record[0].trim(), record[1].trim(), record[2].trim());
        if cui.is_empty() || term.is_empty() {
            return Err(LexiconError::Malformed { line, reason: "empty cui or term".into() });
        }
        let idx = *by_cui.entry(cui.to_owned()).or_insert_with(|| {
            entries.push(ConceptEntry { cui: cui.to_owned(), concept_name: name.to_owned(), terms: Vec::new() });
            entries.len() - 1
        });
        let terms = &mut entries[idx].terms;
        if !terms.iter().any(|t| t == term) {
            terms.push(term.to_owned());
        }
    }
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthConfig {
    /// Terms must occur strictly more often than this in the corpus.
    pub min_freq: usize,
    pub min_terms: usize,
    pub drop_concept_name: bool,
}

impl Default for GroundTruthConfig {
    fn default() -> Self {
        Self { min_freq: 100, min_terms: 2, drop_concept_name: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthConcept {
    pub concept: String,
    /// Stemmed unique unigram terms.
    pub terms: BTreeSet<String>,
    /// Lowercased surface forms that produced each stem.
    pub surface: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthLexicon {
    pub concepts: BTreeMap<String, GroundTruthConcept>,
    #[serde(default)]
    pub provenance: String,
}

impl GroundTruthLexicon {
    pub fn total_terms(&self) -> usize {
        self.concepts.values().map(|c| c.terms.len()).sum()
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Surface forms recorded for `stem` in concept `cui`.
    pub fn surface_forms(&self, cui: &str, stem: &str) -> Vec<&str> {
        self.concepts
            .get(cui)
            .and_then(|c| c.surface.get(stem))
            .map(|s| s.iter().map(String::as_str).collect())
            .unwrap_or_default()
    }

    /// Surface forms for every seed stem in `assignments`. A stem without a
    /// recorded surface form stands for itself.
    pub fn seed_surfaces(&self, assignments: &SeedAssignment) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for p in &assignments.pairs {
            let forms = out.entry(p.seed.clone()).or_default();
            for f in self.surface_forms(&p.cui, &p.seed) {
                if !forms.iter().any(|x| x == f) {
                    forms.push(f.to_owned());
                }
            }
        }
        for (stem, forms) in out.iter_mut() {
            if forms.is_empty() {
                forms.push(stem.clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.concepts)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        Ok(Self { concepts: serde_json::from_str(text)?, provenance: String::new() })
    }
}

fn single_token(term: &str) -> Option<String> {
    if term.split_whitespace().count() != 1 {
        return None;
    }
    let mut toks = tokenize_text(term);
    (toks.len() == 1).then(|| toks.remove(0))
}

fn stemmed_name(name: &str) -> String {
    tokenize_text(name).iter().map(|t| stem(t)).collect::<Vec<_>>().join("_")
}

/// Applies the ground-truth filters to every entry.
pub fn build_ground_truth(
    entries: &[ConceptEntry],
    corpus: &TokenStream,
    config: GroundTruthConfig,
) -> GroundTruthLexicon {
    let freq = corpus.frequencies();
    let mut concepts = BTreeMap::new();
    for entry in entries {
        let name_stem = stemmed_name(&entry.concept_name);
        let mut surface: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for term in &entry.terms {
            let Some(tok) = single_token(term) else { continue };
            let s = stem(&tok);
            if config.drop_concept_name && s == name_stem {
                continue;
            }
            if freq.get(s.as_str()).copied().unwrap_or(0) <= config.min_freq {
                continue;
            }
            surface.entry(s).or_default().insert(tok);
        }
        if surface.len() < config.min_terms.max(1) {
            continue;
        }
        let terms = surface.keys().cloned().collect();
        concepts.insert(
            entry.cui.clone(),
            GroundTruthConcept { concept: entry.concept_name.clone(), terms, surface },
        );
    }
    GroundTruthLexicon { concepts, provenance: String::new() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SeedMode {
    /// Every term serves once as the seed.
    #[default]
    LeaveOneOut,
    /// Only the lexicographically smallest term is a seed.
    FirstTerm,
    /// One term per concept drawn with the given RNG seed.
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedPair {
    pub cui: String,
    pub seed: String,
    pub targets: BTreeSet<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedAssignment {
    pub pairs: Vec<SeedPair>,
}

impl SeedAssignment {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Distinct seed stems, sorted.
    pub fn seeds(&self) -> BTreeSet<&str> {
        self.pairs.iter().map(|p| p.seed.as_str()).collect()
    }
}

pub fn assign_seeds(lexicon: &GroundTruthLexicon, mode: SeedMode) -> Result<SeedAssignment, LexiconError> {
    let mut rng = match mode {
        SeedMode::Random { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut pairs = Vec::new();
    for (cui, concept) in &lexicon.concepts {
        if concept.terms.len() < 2 {
            return Err(LexiconError::TooFewTerms { cui: cui.clone(), count: concept.terms.len() });
        }
        let pair = |seed: &String| SeedPair {
            cui: cui.clone(),
            seed: seed.clone(),
            targets: concept.terms.iter().filter(|t| *t != seed).cloned().collect(),
        };
        match mode {
            SeedMode::LeaveOneOut => pairs.extend(concept.terms.iter().map(pair)),
            SeedMode::FirstTerm => pairs.push(pair(concept.terms.first().expect("non-empty"))),
            SeedMode::Random { .. } => {
                let terms: Vec<&String> = concept.terms.iter().collect();
                let rng = rng.as_mut().expect("rng for random mode");
                pairs.push(pair(terms.choose(rng).expect("non-empty")));
            }
        }
    }
    Ok(SeedAssignment { pairs })
}
