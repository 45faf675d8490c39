//! Micro/macro precision, recall and F over candidate lists, plus MRR.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::query::CandidateList;

/// Exact rate in [0, 1].
pub type Rate = Ratio<u64>;

fn rate(num: u64, den: u64) -> Rate {
    if den == 0 {
        Rate::zero()
    } else {
        Rate::new(num, den)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Harmonic mean 2PR/(P+R), or 0 when P + R = 0.
pub fn harmonic(p: Rate, r: Rate) -> Rate {
    let (pn, pd, rn, rd) = (*p.numer() as u128, *p.denom() as u128, *r.numer() as u128, *r.denom() as u128);
    let num = 2 * pn * rn;
    let den = pn * rd + rn * pd;
    if num == 0 || den == 0 {
        return Rate::zero();
    }
    let g = gcd(num, den);
    let (num, den) = (num / g, den / g);
    Rate::new(u64::try_from(num).expect("F numerator fits u64"), u64::try_from(den).expect("F denominator fits u64"))
}

pub fn rate_f64(r: Rate) -> f64 {
    r.to_f64().expect("rate converts to f64")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prf {
    pub p: Rate,
    pub r: Rate,
    pub f: Rate,
}

impl Prf {
    pub fn new(p: Rate, r: Rate) -> Self {
        Self { p, r, f: harmonic(p, r) }
    }

    pub fn zero() -> Self {
        Self::new(Rate::zero(), Rate::zero())
    }
}

impl Serialize for Prf {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Prf", 6)?;
        st.serialize_field("P", &rate_f64(self.p))?;
        st.serialize_field("R", &rate_f64(self.r))?;
        st.serialize_field("F", &rate_f64(self.f))?;
        st.serialize_field("P_exact", &self.p.to_string())?;
        st.serialize_field("R_exact", &self.r.to_string())?;
        st.serialize_field("F_exact", &self.f.to_string())?;
        st.end()
    }
}

/// One seed pair and its candidate list (`None` when the seed had no vector).
#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub cui: String,
    pub seed: String,
    pub targets: BTreeSet<String>,
    pub list: Option<CandidateList>,
}

impl PairResult {
    fn hits(&self) -> impl Iterator<Item = (usize, &str)> + '_ {
        self.list
            .iter()
            .flat_map(|l| l.terms().enumerate())
            .filter(|(_, t)| self.targets.contains(*t))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalInput {
    pub pairs: Vec<PairResult>,
    pub total_concepts: u64,
    pub total_synonyms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MicroCounts {
    pub true_found: u64,
    pub emitted: u64,
    pub total_synonyms: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MacroCounts {
    pub concepts_hit: u64,
    pub concepts_attempted: u64,
    pub total_concepts: u64,
}

/// Micro rates over generated lists: true synonyms found over candidates
/// emitted, and over all ground-truth targets.
pub fn micro_metrics(input: &EvalInput) -> (Prf, MicroCounts) {
    let mut found = 0u64;
    let mut emitted = 0u64;
    for pair in &input.pairs {
        if let Some(l) = &pair.list {
            emitted += l.candidates.len() as u64;
            found += pair.hits().count() as u64;
        }
    }
    let counts = MicroCounts { true_found: found, emitted, total_synonyms: input.total_synonyms };
    (Prf::new(rate(found, emitted), rate(found, input.total_synonyms)), counts)
}

/// Macro rates: concepts with at least one true synonym in any of their
/// lists, over concepts attempted (precision) and all concepts (recall).
pub fn macro_metrics(input: &EvalInput) -> (Prf, MacroCounts) {
    let mut per_concept: BTreeMap<&str, bool> = BTreeMap::new();
    for pair in input.pairs.iter().filter(|p| p.list.is_some()) {
        let hit = per_concept.entry(&pair.cui).or_insert(false);
        *hit |= pair.hits().next().is_some();
    }
    let hit = per_concept.values().filter(|h| **h).count() as u64;
    let attempted = per_concept.len() as u64;
    let counts = MacroCounts { concepts_hit: hit, concepts_attempted: attempted, total_concepts: input.total_concepts };
    (Prf::new(rate(hit, attempted), rate(hit, input.total_concepts)), counts)
}

/// Mean over every pair of 1/rank of the first true synonym (0 on a miss
/// or a missing list).
pub fn mrr(input: &EvalInput) -> f64 {
    if input.pairs.is_empty() {
        return 0.0;
    }
    let total: f64 = input
        .pairs
        .iter()
        .map(|p| p.hits().next().map_or(0.0, |(rank, _)| 1.0 / (rank + 1) as f64))
        .sum();
    total / input.pairs.len() as f64
}
