//! Planted-synonym corpora.
//!
//! Each concept owns a pair of words (s, t) and a topic drawn from a shared
//! pool of context words, so every context word serves several concepts.
//! Wherever a concept word is emitted a fair coin picks s or t: the two see
//! the same context distribution, while any context word sees a blend.
//! Every generated word is its own stem, so the stream is already in
//! preprocessed form.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{stem_word, StopwordSet, TokenStream};
use crate::lexicon::{ConceptEntry, GroundTruthConfig};
use crate::wordnet::{Pos, WordNetBuilder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub concepts: usize,
    pub topic_words: usize,
    /// Size of the shared pool topics are drawn from. While there is room,
    /// every pool word joins at least two topics.
    pub pool_words: usize,
    pub background_words: usize,
    pub documents: usize,
    pub doc_len: usize,
    /// Probability of emitting the concept word at a position.
    pub pair_rate: f64,
    /// Probability of emitting a topic word otherwise (background word else).
    pub topic_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            concepts: 10,
            topic_words: 8,
            pool_words: 30,
            background_words: 40,
            documents: 2500,
            doc_len: 20,
            pair_rate: 0.2,
            topic_rate: 0.6,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlantedPair {
    pub cui: String,
    pub s: String,
    pub t: String,
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub stream: TokenStream,
    pub pairs: Vec<PlantedPair>,
    pub pool: Vec<String>,
    pub topics: Vec<Vec<String>>,
    pub background: Vec<String>,
}

const ONSETS: [&str; 14] = ["b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "t", "v", "z", "br"];
const VOWELS: [&str; 4] = ["a", "o", "u", "i"];
const CODAS: [&str; 6] = ["k", "t", "p", "d", "g", "m"];

fn word(rng: &mut ChaCha8Rng) -> String {
    let mut w = String::new();
    for _ in 0..rng.random_range(2..=3) {
        w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
        w.push_str(VOWELS[rng.random_range(0..VOWELS.len())]);
    }
    w.push_str(CODAS[rng.random_range(0..CODAS.len())]);
    w
}

fn fresh_words(rng: &mut ChaCha8Rng, n: usize, used: &mut BTreeSet<String>, stopwords: &StopwordSet) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let w = word(rng);
        if stem_word(&w) == w && !stopwords.contains(&w) && used.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

impl SyntheticCorpus {
    pub fn generate(config: &SyntheticConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let stopwords = StopwordSet::english_default();
        let mut used = BTreeSet::new();
        let pairs: Vec<PlantedPair> = (0..config.concepts)
            .map(|k| {
                let w = fresh_words(&mut rng, 2, &mut used, &stopwords);
                PlantedPair { cui: format!("C{:07}", k + 1), s: w[0].clone(), t: w[1].clone() }
            })
            .collect();
        let pool = fresh_words(&mut rng, config.pool_words.max(config.topic_words), &mut used, &stopwords);
        let mut picks: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); config.concepts];
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.shuffle(&mut rng);
        for &w in &order {
            let mut open: Vec<usize> = (0..config.concepts).filter(|&k| picks[k].len() < config.topic_words).collect();
            if open.len() < 2 {
                break;
            }
            open.shuffle(&mut rng);
            open.sort_by_key(|&k| picks[k].len());
            for &k in &open[..2] {
                picks[k].insert(w);
            }
        }
        for p in &mut picks {
            while p.len() < config.topic_words {
                p.insert(rng.random_range(0..pool.len()));
            }
        }
        let topics: Vec<Vec<String>> = picks.iter().map(|p| p.iter().map(|&i| pool[i].clone()).collect()).collect();
        let background = fresh_words(&mut rng, config.background_words, &mut used, &stopwords);

        let mut stream = TokenStream::default();
        for _ in 0..config.documents {
            let k = rng.random_range(0..config.concepts);
            let doc: Vec<&str> = (0..config.doc_len)
                .map(|_| {
                    if rng.random_bool(config.pair_rate) {
                        if rng.random_bool(0.5) { &pairs[k].s } else { &pairs[k].t }
                    } else if rng.random_bool(config.topic_rate) {
                        &topics[k][rng.random_range(0..topics[k].len())]
                    } else {
                        &background[rng.random_range(0..background.len())]
                    }
                })
                .map(String::as_str)
                .collect();
            stream.push_document(doc);
        }
        Self { stream, pairs, pool, topics, background }
    }

    /// One concept per planted pair, named so that neither term matches the
    /// concept name.
    pub fn concepts(&self) -> Vec<ConceptEntry> {
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, p)| ConceptEntry {
                cui: p.cui.clone(),
                concept_name: format!("planted concept {}", i + 1),
                terms: vec![p.s.clone(), p.t.clone()],
            })
            .collect()
    }

    /// Every planted pair occurs far more often than this frequency floor.
    pub fn ground_truth_config(&self) -> GroundTruthConfig {
        GroundTruthConfig { min_freq: 10, ..GroundTruthConfig::default() }
    }

    /// A noun hierarchy with one synset per planted pair under a shared root,
    /// plus one synset per pool word under a second branch.
    pub fn wordnet(&self) -> WordNetBuilder {
        let mut b = WordNetBuilder::new();
        let root = b.synset(Pos::Noun, &["entity"], "root");
        let concepts = b.noun(&["planted_concept"], Some(root));
        for p in &self.pairs {
            b.noun(&[p.s.as_str(), p.t.as_str()], Some(concepts));
        }
        let other = b.noun(&["topic_word"], Some(root));
        for w in &self.pool {
            b.noun(&[w.as_str()], Some(other));
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_determinism() {
        let c = SyntheticConfig::default();
        let a = SyntheticCorpus::generate(&c);
        let b = SyntheticCorpus::generate(&c);
        assert_eq!(a.stream, b.stream);
        assert_eq!(a.stream.len(), c.documents * c.doc_len);
        assert_eq!(a.stream.num_documents(), c.documents);
        a.stream.validate(3).unwrap();
        let f = a.stream.frequencies();
        for p in &a.pairs {
            assert!(f[p.s.as_str()] > 200 && f[p.t.as_str()] > 200);
        }
        let other = SyntheticCorpus::generate(&SyntheticConfig { seed: 8, ..c });
        assert_ne!(a.stream, other.stream);
    }

    #[test]
    fn fixture_wordnet_links_pairs() {
        let c = SyntheticCorpus::generate(&SyntheticConfig { documents: 50, ..SyntheticConfig::default() });
        let db = c.wordnet().build().unwrap();
        let p = &c.pairs[0];
        let syn = db.related_lemmas(&p.s, crate::wordnet::Relation::Synonym, &[Pos::Noun]);
        assert_eq!(syn.into_iter().collect::<Vec<_>>(), std::slice::from_ref(&p.t));
    }
}
