//! Information content and Resnik similarity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use super::{Pos, SynsetId, WordNetDb, WordNetError};
use crate::corpus::{stem, TokenStream};

/// Where synset probabilities come from.
#[derive(Debug, Clone, Copy)]
pub enum IcSource<'a> {
    /// Count lemma occurrences in a stemmed token stream.
    Stream(&'a TokenStream),
    /// Load a precomputed `offset pos ic` file verbatim.
    File(&'a Path),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InformationContent {
    ic: BTreeMap<SynsetId, f64>,
    pub source: String,
}

impl InformationContent {
    pub fn from_map(ic: BTreeMap<SynsetId, f64>, source: impl Into<String>) -> Self {
        Self { ic, source: source.into() }
    }

    /// IC of a synset; synsets absent from the table have IC 0.
    pub fn get(&self, id: SynsetId) -> f64 {
        self.ic.get(&id).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SynsetId, f64)> + '_ {
        self.ic.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.ic.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ic.is_empty()
    }

    /// Counts are split evenly over each lemma's senses, every leaf synset
    /// gets one extra count, and totals propagate to every ancestor once.
    /// IC(c) = -ln(count(c) / count(root)), using the largest root above c.
    pub fn from_lemma_counts(db: &WordNetDb, counts: &HashMap<String, f64>, source: impl Into<String>) -> Result<Self, WordNetError> {
        let mut raw: BTreeMap<SynsetId, f64> = BTreeMap::new();
        let mut total = 0.0;
        for lemma in db.lemmas() {
            let c = counts.get(lemma).copied().unwrap_or(0.0);
            if c <= 0.0 {
                continue;
            }
            let senses = db.senses(lemma, &Pos::ALL);
            let share = c / senses.len() as f64;
            for s in senses {
                *raw.entry(s).or_insert(0.0) += share;
            }
            total += c;
        }
        if total <= 0.0 {
            return Err(WordNetError::Ic("no WordNet lemma occurs in the frequency source".into()));
        }
        for s in db.synsets() {
            if s.hyponyms.is_empty() {
                *raw.entry(s.id).or_insert(0.0) += 1.0;
            }
        }

        let ancestors: BTreeMap<SynsetId, BTreeSet<SynsetId>> =
            db.synsets().map(|s| (s.id, db.ancestors_or_self(s.id))).collect();
        let mut count: BTreeMap<SynsetId, f64> = BTreeMap::new();
        for (id, r) in &raw {
            for a in &ancestors[id] {
                *count.entry(*a).or_insert(0.0) += r;
            }
        }
        let mut ic = BTreeMap::new();
        for (id, anc) in &ancestors {
            let c = count[id];
            let norm = anc
                .iter()
                .filter(|a| db.synset(**a).is_some_and(|s| s.hypernyms.is_empty()))
                .map(|a| count[a])
                .fold(0.0, f64::max);
            let value = if c >= norm { 0.0 } else { -(c / norm).ln() };
            ic.insert(*id, value);
        }
        Ok(Self { ic, source: source.into() })
    }

    /// Counts every WordNet lemma via its stem in `stream`.
    pub fn from_stream(db: &WordNetDb, stream: &TokenStream) -> Result<Self, WordNetError> {
        let freq = stream.frequencies();
        let counts: HashMap<String, f64> = db
            .lemmas()
            .filter_map(|l| freq.get(stem(l).as_str()).map(|&n| (l.to_owned(), n as f64)))
            .collect();
        Self::from_lemma_counts(db, &counts, "token-stream")
    }

    pub fn read(text: &str, source: impl Into<String>) -> Result<Self, WordNetError> {
        let mut ic = BTreeMap::new();
        let mut byte = 0;
        for line in text.split_inclusive('\n') {
            let at = byte;
            byte += line.len();
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |reason: &str| WordNetError::Parse { file: "ic".into(), byte: at, reason: reason.into() };
            let f: Vec<&str> = trimmed.split_ascii_whitespace().collect();
            let [offset, pos, value] = f[..] else { return Err(err("expected `offset pos ic`")) };
            let offset = offset.parse().map_err(|_| err("bad synset offset"))?;
            let pos = Pos::from_tag(pos).ok_or_else(|| err("bad part of speech"))?;
            let value: f64 = value.parse().map_err(|_| err("bad ic value"))?;
            if !(value.is_finite() && value >= 0.0) {
                return Err(err("ic must be finite and non-negative"));
            }
            ic.insert(SynsetId { offset, pos }, value);
        }
        Ok(Self { ic, source: source.into() })
    }

    pub fn load(path: &Path) -> Result<Self, WordNetError> {
        let text = fs::read_to_string(path).map_err(|source| WordNetError::Io { path: path.to_path_buf(), source })?;
        Self::read(&text, path.display().to_string()).map_err(|e| match e {
            WordNetError::Parse { byte, reason, .. } => WordNetError::Parse { file: path.display().to_string(), byte, reason },
            other => other,
        })
    }

    /// Writes the table with shortest round-trip float formatting.
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (id, v) in &self.ic {
            writeln!(out, "{:08} {} {v:?}", id.offset, id.pos.tag())?;
        }
        out.flush()
    }
}

pub fn information_content(db: &WordNetDb, source: IcSource<'_>) -> Result<InformationContent, WordNetError> {
    match source {
        IcSource::Stream(s) => InformationContent::from_stream(db, s),
        IcSource::File(p) => InformationContent::load(p),
    }
}

/// Lemma-level Resnik similarity: the best IC of a common subsumer over all
/// sense pairs, or 0 when no pair shares an ancestor.
pub fn resnik(db: &WordNetDb, ic: &InformationContent, a: &str, b: &str, pos_set: &[Pos]) -> f64 {
    let sa = db.senses(a, pos_set);
    let sb = db.senses(b, pos_set);
    if sa.is_empty() || sb.is_empty() {
        return 0.0;
    }
    let anc_b: Vec<BTreeSet<SynsetId>> = sb.iter().map(|&s| db.ancestors_or_self(s)).collect();
    let mut best = 0.0f64;
    for &x in &sa {
        let anc_a = db.ancestors_or_self(x);
        for ab in &anc_b {
            for c in anc_a.intersection(ab) {
                best = best.max(ic.get(*c));
            }
        }
    }
    best
}
