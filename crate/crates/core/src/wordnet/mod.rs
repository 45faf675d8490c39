//! WordNet database: WNdb parsing, relation queries, information content
//! and Resnik similarity.

mod builder;
mod ic;
mod parse;

pub use builder::{SynsetHandle, WordNetBuilder};
pub use ic::{information_content, resnik, IcSource, InformationContent};
pub use parse::load_wordnet;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error("missing WordNet file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file} at byte {byte}: {reason}")]
    Parse { file: String, byte: usize, reason: String },
    #[error("{file} at byte {byte}: pointer to unknown synset {target}")]
    Dangling { file: String, byte: usize, target: SynsetId },
    #[error("lemma index inconsistent for {lemma:?}: {reason}")]
    Inconsistent { lemma: String, reason: String },
    #[error("hypernym cycle through synset {0}")]
    Cycle(SynsetId),
    #[error("information content: {0}")]
    Ic(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn file_suffix(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
        }
    }

    pub fn tag(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::Adv => 'r',
        }
    }

    /// Parses a WNdb POS letter; satellite adjectives (`s`) map to `Adj`.
    pub fn from_tag(tag: &str) -> Option<Pos> {
        match tag {
            "n" => Some(Pos::Noun),
            "v" => Some(Pos::Verb),
            "a" | "s" => Some(Pos::Adj),
            "r" => Some(Pos::Adv),
            _ => None,
        }
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Pos::from_tag(s)
            .or_else(|| Pos::ALL.into_iter().find(|p| p.file_suffix() == s))
            .ok_or_else(|| format!("unknown part of speech {s:?}"))
    }
}

/// Synset identity: byte offset in `data.<pos>` plus the POS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SynsetId {
    pub offset: u32,
    pub pos: Pos,
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub hypernyms: Vec<SynsetId>,
    pub hyponyms: Vec<SynsetId>,
    pub gloss: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Synonym,
    Hyponym,
    Hypernym,
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "synonym" | "syno" => Ok(Relation::Synonym),
            "hyponym" | "hypo" => Ok(Relation::Hyponym),
            "hypernym" | "hyper" => Ok(Relation::Hypernym),
            _ => Err(format!("unknown relation {s:?}")),
        }
    }
}

/// Lemma spelling used for lookups: lowercase, spaces joined by underscores.
pub fn normalize_lemma(lemma: &str) -> String {
    lemma.trim().to_lowercase().split_whitespace().collect::<Vec<_>>().join("_")
}

/// Immutable in-memory WordNet.
#[derive(Debug, Clone, Default)]
pub struct WordNetDb {
    synsets: BTreeMap<SynsetId, Synset>,
    lemma_index: BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>>,
    roots: Vec<SynsetId>,
}

impl WordNetDb {
    pub(crate) fn from_parts(
        synsets: BTreeMap<SynsetId, Synset>,
        lemma_index: BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>>,
    ) -> Result<Self, WordNetError> {
        let roots = synsets.values().filter(|s| s.hypernyms.is_empty()).map(|s| s.id).collect();
        let db = Self { synsets, lemma_index, roots };
        db.check_lemma_index()?;
        db.check_acyclic()?;
        Ok(db)
    }

    pub fn synset(&self, id: SynsetId) -> Option<&Synset> {
        self.synsets.get(&id)
    }

    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn roots(&self) -> &[SynsetId] {
        &self.roots
    }

    pub fn contains_lemma(&self, lemma: &str) -> bool {
        self.lemma_index.contains_key(&normalize_lemma(lemma))
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.lemma_index.keys().map(String::as_str)
    }

    /// Senses of `lemma` restricted to `pos_set`, in index order.
    pub fn senses(&self, lemma: &str, pos_set: &[Pos]) -> Vec<SynsetId> {
        let Some(by_pos) = self.lemma_index.get(&normalize_lemma(lemma)) else { return Vec::new() };
        by_pos
            .iter()
            .filter(|(p, _)| pos_set.contains(p))
            .flat_map(|(_, ids)| ids.iter().copied())
            .collect()
    }

    /// Transitive closure over hypernym (`up`) or hyponym edges, excluding the start.
    pub fn closure(&self, start: SynsetId, up: bool) -> BTreeSet<SynsetId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start];
        while let Some(id) = stack.pop() {
            let Some(s) = self.synsets.get(&id) else { continue };
            let next = if up { &s.hypernyms } else { &s.hyponyms };
            for &n in next {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen
    }

    pub fn ancestors_or_self(&self, id: SynsetId) -> BTreeSet<SynsetId> {
        let mut set = self.closure(id, true);
        set.insert(id);
        set
    }

    /// Related lemmas over every sense of `lemma` in `pos_set`. Hyponyms and
    /// hypernyms are transitive. The query lemma is never returned.
    pub fn related_lemmas(&self, lemma: &str, relation: Relation, pos_set: &[Pos]) -> BTreeSet<String> {
        let query = normalize_lemma(lemma);
        let senses = self.senses(&query, pos_set);
        let mut synsets = BTreeSet::new();
        for s in senses {
            match relation {
                Relation::Synonym => {
                    synsets.insert(s);
                }
                Relation::Hyponym => synsets.extend(self.closure(s, false)),
                Relation::Hypernym => synsets.extend(self.closure(s, true)),
            }
        }
        synsets
            .iter()
            .filter_map(|id| self.synsets.get(id))
            .flat_map(|s| s.lemmas.iter())
            .filter(|l| **l != query)
            .cloned()
            .collect()
    }

    fn check_lemma_index(&self) -> Result<(), WordNetError> {
        for (lemma, by_pos) in &self.lemma_index {
            for ids in by_pos.values() {
                for id in ids {
                    let s = self.synsets.get(id).ok_or_else(|| WordNetError::Inconsistent {
                        lemma: lemma.clone(),
                        reason: format!("indexed synset {id} does not exist"),
                    })?;
                    if !s.lemmas.contains(lemma) {
                        return Err(WordNetError::Inconsistent {
                            lemma: lemma.clone(),
                            reason: format!("synset {id} does not list the lemma"),
                        });
                    }
                }
            }
        }
        for s in self.synsets.values() {
            for lemma in &s.lemmas {
                let indexed = self
                    .lemma_index
                    .get(lemma)
                    .and_then(|m| m.get(&s.id.pos))
                    .is_some_and(|ids| ids.contains(&s.id));
                if !indexed {
                    return Err(WordNetError::Inconsistent {
                        lemma: lemma.clone(),
                        reason: format!("synset {} is missing from the index", s.id),
                    });
                }
            }
        }
        Ok(())
    }

    fn check_acyclic(&self) -> Result<(), WordNetError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Open,
            Done,
        }
        let mut marks: BTreeMap<SynsetId, Mark> = BTreeMap::new();
        for &start in self.synsets.keys() {
            if marks.contains_key(&start) {
                continue;
            }
            // Iterative DFS; the bool flags the post-order visit.
            let mut stack = vec![(start, false)];
            while let Some((id, post)) = stack.pop() {
                if post {
                    marks.insert(id, Mark::Done);
                    continue;
                }
                match marks.get(&id) {
                    Some(Mark::Done) => continue,
                    Some(Mark::Open) => return Err(WordNetError::Cycle(id)),
                    None => {}
                }
                marks.insert(id, Mark::Open);
                stack.push((id, true));
                for &h in &self.synsets[&id].hypernyms {
                    match marks.get(&h) {
                        Some(Mark::Open) => return Err(WordNetError::Cycle(h)),
                        Some(Mark::Done) => {}
                        None => stack.push((h, false)),
                    }
                }
            }
        }
        Ok(())
    }
}
