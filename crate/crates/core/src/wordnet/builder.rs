//! Programmatic WNdb writer for fixtures.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use super::parse::{from_sources, PosSource};
use super::{normalize_lemma, Pos, SynsetId, WordNetDb, WordNetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetHandle(usize);

#[derive(Debug, Clone)]
struct Entry {
    pos: Pos,
    lemmas: Vec<String>,
    gloss: String,
    hypernyms: Vec<usize>,
    hyponyms: Vec<usize>,
}

/// Builds small WordNet databases and renders them as valid WNdb files.
///
/// ```
/// use chvenrich::wordnet::{Pos, Relation, WordNetBuilder};
/// let mut b = WordNetBuilder::new();
/// let root = b.noun(&["entity"], None);
/// b.noun(&["ache", "aching"], Some(root));
/// let db = b.build().unwrap();
/// assert!(db.related_lemmas("ache", Relation::Synonym, &[Pos::Noun]).contains("aching"));
/// ```
#[derive(Debug, Clone, Default)]
pub struct WordNetBuilder {
    entries: Vec<Entry>,
}

impl WordNetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn synset(&mut self, pos: Pos, lemmas: &[&str], gloss: &str) -> SynsetHandle {
        assert!(!lemmas.is_empty(), "a synset needs at least one lemma");
        let mut norm: Vec<String> = Vec::new();
        for l in lemmas {
            let l = normalize_lemma(l);
            if !norm.contains(&l) {
                norm.push(l);
            }
        }
        self.entries.push(Entry { pos, lemmas: norm, gloss: gloss.to_owned(), hypernyms: Vec::new(), hyponyms: Vec::new() });
        SynsetHandle(self.entries.len() - 1)
    }

    /// Noun synset, optionally placed under `parent`.
    pub fn noun(&mut self, lemmas: &[&str], parent: Option<SynsetHandle>) -> SynsetHandle {
        let h = self.synset(Pos::Noun, lemmas, "");
        if let Some(p) = parent {
            self.hypernym(h, p);
        }
        h
    }

    /// Adds `parent` as a hypernym of `child` (and the inverse hyponym edge).
    pub fn hypernym(&mut self, child: SynsetHandle, parent: SynsetHandle) -> &mut Self {
        if !self.entries[child.0].hypernyms.contains(&parent.0) {
            self.entries[child.0].hypernyms.push(parent.0);
            self.entries[parent.0].hyponyms.push(child.0);
        }
        self
    }

    fn data_line(&self, i: usize, offsets: &[u32]) -> String {
        let e = &self.entries[i];
        let mut line = format!("{:08} 03 {} {:02x}", offsets[i], e.pos.tag(), e.lemmas.len());
        for l in &e.lemmas {
            line.push_str(&format!(" {l} 0"));
        }
        line.push_str(&format!(" {:03}", e.hypernyms.len() + e.hyponyms.len()));
        for (sym, targets) in [("@", &e.hypernyms), ("~", &e.hyponyms)] {
            for &t in targets {
                let tp = self.entries[t].pos;
                line.push_str(&format!(" {sym} {:08} {} 0000", offsets[t], tp.tag()));
            }
        }
        line.push_str(&format!(" | {}\n", e.gloss));
        line
    }

    fn offsets(&self) -> Vec<u32> {
        // Offsets are fixed width, so line lengths do not depend on them.
        let zero = vec![0u32; self.entries.len()];
        let mut next: BTreeMap<Pos, u32> = BTreeMap::new();
        (0..self.entries.len())
            .map(|i| {
                let at = next.entry(self.entries[i].pos).or_insert(0);
                let offset = *at;
                *at += self.data_line(i, &zero).len() as u32;
                offset
            })
            .collect()
    }

    /// Final identifier of a synset once rendered.
    pub fn id(&self, h: SynsetHandle) -> SynsetId {
        SynsetId { offset: self.offsets()[h.0], pos: self.entries[h.0].pos }
    }

    /// `(pos, index text, data text)` for every POS with at least one synset.
    pub fn render(&self) -> Vec<(Pos, String, String)> {
        let offsets = self.offsets();
        let mut out = Vec::new();
        for pos in Pos::ALL {
            let members: Vec<usize> = (0..self.entries.len()).filter(|&i| self.entries[i].pos == pos).collect();
            if members.is_empty() {
                continue;
            }
            let data: String = members.iter().map(|&i| self.data_line(i, &offsets)).collect();
            let mut senses: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for &i in &members {
                for l in &self.entries[i].lemmas {
                    senses.entry(l).or_default().push(i);
                }
            }
            let mut index = String::new();
            for (lemma, ids) in senses {
                let mut syms = BTreeSet::new();
                for &i in &ids {
                    if !self.entries[i].hypernyms.is_empty() {
                        syms.insert("@");
                    }
                    if !self.entries[i].hyponyms.is_empty() {
                        syms.insert("~");
                    }
                }
                index.push_str(&format!("{lemma} {} {} {}", pos.tag(), ids.len(), syms.len()));
                for s in &syms {
                    index.push_str(&format!(" {s}"));
                }
                index.push_str(&format!(" {} 0", ids.len()));
                for i in ids {
                    index.push_str(&format!(" {:08}", offsets[i]));
                }
                index.push_str("  \n");
            }
            out.push((pos, index, data));
        }
        out
    }

    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (pos, index, data) in self.render() {
            fs::write(dir.join(format!("index.{}", pos.file_suffix())), index)?;
            fs::write(dir.join(format!("data.{}", pos.file_suffix())), data)?;
        }
        Ok(())
    }

    /// Renders and parses back, so fixtures go through the real loader.
    pub fn build(&self) -> Result<WordNetDb, WordNetError> {
        let rendered = self.render();
        let sources: Vec<PosSource> = rendered
            .iter()
            .map(|(pos, index, data)| PosSource {
                pos: *pos,
                index_name: format!("index.{}", pos.file_suffix()),
                index,
                data_name: format!("data.{}", pos.file_suffix()),
                data,
            })
            .collect();
        from_sources(&sources)
    }
}
