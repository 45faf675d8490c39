//! Corpus ingestion: tokenization, stopword/number/length filtering and
//! stemming into a [`TokenStream`].

mod stem;

pub use stem::{stem, stem_word};

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

/// Minimum token length applied when callers do not override it.
pub const DEFAULT_MIN_LEN: usize = 3;

const ENGLISH_STOPWORDS: &str = include_str!("stopwords_en.txt");
const DOMAIN_STOPWORDS: &[&str] = &["test", "doctor", "symptom", "physician"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("document {id}: invalid UTF-8 at byte {valid_up_to}")]
    InvalidUtf8 { id: String, valid_up_to: usize },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("token stream line {line}: {reason}")]
    MalformedStream { line: usize, reason: String },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

/// One input document, e.g. a forum question or answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self { id: id.into(), text: text.into() }
    }

    /// Decodes raw bytes, reporting the document id on invalid UTF-8.
    pub fn from_bytes(id: impl Into<String>, bytes: Vec<u8>) -> Result<Self, CorpusError> {
        let id = id.into();
        match String::from_utf8(bytes) {
            Ok(text) => Ok(Self { id, text }),
            Err(e) => Err(CorpusError::InvalidUtf8 { id, valid_up_to: e.utf8_error().valid_up_to() }),
        }
    }
}

/// General and domain stopwords. Membership is tested against the union.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordSet {
    pub general: BTreeSet<String>,
    pub domain: BTreeSet<String>,
}

impl StopwordSet {
    pub fn new<G, D>(general: G, domain: D) -> Self
    where
        G: IntoIterator,
        G::Item: AsRef<str>,
        D: IntoIterator,
        D::Item: AsRef<str>,
    {
        let norm = |s: &str| s.trim().to_lowercase();
        Self {
            general: general.into_iter().map(|s| norm(s.as_ref())).filter(|s| !s.is_empty()).collect(),
            domain: domain.into_iter().map(|s| norm(s.as_ref())).filter(|s| !s.is_empty()).collect(),
        }
    }

    /// Shipped English list plus the default medical-forum domain list.
    pub fn english_default() -> Self {
        Self::new(ENGLISH_STOPWORDS.lines(), DOMAIN_STOPWORDS.iter())
    }

    pub fn default_domain() -> BTreeSet<String> {
        DOMAIN_STOPWORDS.iter().map(|s| s.to_string()).collect()
    }

    /// Loads either list from a one-word-per-line file; `None` keeps the default.
    pub fn from_files(general: Option<&Path>, domain: Option<&Path>) -> Result<Self, CorpusError> {
        let defaults = Self::english_default();
        let load = |p: &Path| -> Result<Vec<String>, CorpusError> {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            Ok(text.lines().map(str::to_owned).collect())
        };
        let general = match general {
            Some(p) => load(p)?,
            None => defaults.general.into_iter().collect(),
        };
        let domain = match domain {
            Some(p) => load(p)?,
            None => defaults.domain.into_iter().collect(),
        };
        Ok(Self::new(general, domain))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.general.contains(token) || self.domain.contains(token)
    }
}

/// Splits on whitespace, trims leading/trailing punctuation and lowercases.
/// Internal characters such as underscores or apostrophes are kept.
pub fn tokenize(doc: &RawDocument) -> Vec<String> {
    tokenize_text(&doc.text)
}

pub fn tokenize_text(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|raw| raw.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn is_word_like(token: &str) -> bool {
    token.chars().any(char::is_alphabetic)
}

/// Drops stopwords, tokens without any letter (numbers, punctuation) and
/// tokens shorter than `min_len` characters. Survivor order is preserved.
pub fn normalize<I, S>(tokens: I, stopwords: &StopwordSet, min_len: usize) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    tokens
        .into_iter()
        .filter_map(|t| {
            let t = t.as_ref();
            let keep = is_word_like(t) && t.chars().count() >= min_len && !stopwords.contains(t);
            keep.then(|| t.to_owned())
        })
        .collect()
}

/// Full per-document pipeline: tokenize, normalize, stem. Stems that fall
/// under `min_len` are dropped as well.
pub fn preprocess_document(doc: &RawDocument, stopwords: &StopwordSet, min_len: usize) -> Vec<String> {
    normalize(tokenize(doc), stopwords, min_len)
        .into_iter()
        .map(|t| stem(&t))
        .filter(|t| t.chars().count() >= min_len)
        .collect()
}

/// Preprocesses every document (in parallel) and concatenates the results
/// in input order.
pub fn preprocess_corpus(docs: &[RawDocument], stopwords: &StopwordSet, min_len: usize) -> TokenStream {
    let per_doc: Vec<Vec<String>> = docs.par_iter().map(|d| preprocess_document(d, stopwords, min_len)).collect();
    TokenStream::from_documents(per_doc)
}

/// Reads a corpus: a file holds one document per line, a directory holds one
/// document per `.txt` file (visited in file-name order).
pub fn read_corpus(path: &Path) -> Result<Vec<RawDocument>, CorpusError> {
    let meta = fs::metadata(path).map_err(io_err(path))?;
    if meta.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(io_err(path))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
            .collect();
        files.sort();
        files
            .into_iter()
            .map(|p| {
                let bytes = fs::read(&p).map_err(io_err(&p))?;
                RawDocument::from_bytes(p.display().to_string(), bytes)
            })
            .collect()
    } else {
        let bytes = fs::read(path).map_err(io_err(path))?;
        bytes
            .split(|&b| b == b'\n')
            .enumerate()
            .filter(|(_, line)| !line.is_empty())
            .map(|(i, line)| {
                let line = line.strip_suffix(b"\r").unwrap_or(line);
                RawDocument::from_bytes(format!("{}:{}", path.display(), i + 1), line.to_vec())
            })
            .collect()
    }
}

/// Ordered normalized tokens with the index where each document starts.
///
/// Documents that contribute no tokens are not represented, so boundaries are
/// strictly increasing and the first boundary (if any) is 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    tokens: Vec<String>,
    doc_boundaries: Vec<usize>,
}

impl TokenStream {
    pub fn from_documents<I, D, S>(docs: I) -> Self
    where
        I: IntoIterator<Item = D>,
        D: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut stream = Self::default();
        for doc in docs {
            stream.push_document(doc);
        }
        stream
    }

    /// Appends a document; empty documents are skipped.
    pub fn push_document<D, S>(&mut self, doc: D)
    where
        D: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let start = self.tokens.len();
        self.tokens.extend(doc.into_iter().map(Into::into));
        if self.tokens.len() > start {
            self.doc_boundaries.push(start);
        }
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn doc_boundaries(&self) -> &[usize] {
        &self.doc_boundaries
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn num_documents(&self) -> usize {
        self.doc_boundaries.len()
    }

    /// Token index range of document `i`.
    pub fn document_range(&self, i: usize) -> std::ops::Range<usize> {
        let start = self.doc_boundaries[i];
        let end = self.doc_boundaries.get(i + 1).copied().unwrap_or(self.tokens.len());
        start..end
    }

    pub fn documents(&self) -> impl ExactSizeIterator<Item = &[String]> + '_ {
        (0..self.num_documents()).map(move |i| &self.tokens[self.document_range(i)])
    }

    pub fn frequencies(&self) -> HashMap<&str, usize> {
        let mut counts = HashMap::new();
        for t in &self.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
        counts
    }

    /// Checks the structural invariants; returns the first violation.
    pub fn validate(&self, min_len: usize) -> Result<(), String> {
        if let Some(&first) = self.doc_boundaries.first() {
            if first != 0 {
                return Err(format!("first boundary is {first}"));
            }
        } else if !self.tokens.is_empty() {
            return Err("tokens without a document boundary".into());
        }
        if let Some(w) = self.doc_boundaries.windows(2).find(|w| w[0] >= w[1]) {
            return Err(format!("boundaries not increasing: {} then {}", w[0], w[1]));
        }
        if self.doc_boundaries.last().is_some_and(|&b| b >= self.tokens.len()) {
            return Err("empty trailing document".into());
        }
        for t in &self.tokens {
            if t.chars().any(char::is_uppercase) {
                return Err(format!("token {t:?} is not lowercase"));
            }
            if t.chars().count() < min_len {
                return Err(format!("token {t:?} shorter than {min_len}"));
            }
            if !is_word_like(t) || t.chars().any(char::is_whitespace) {
                return Err(format!("token {t:?} is not a word"));
            }
        }
        Ok(())
    }

    /// Writes one document per line, tokens separated by single spaces.
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for doc in self.documents() {
            writeln!(out, "{}", doc.join(" "))?;
        }
        out.flush()
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self, CorpusError> {
        let mut stream = Self::default();
        for (i, line) in input.lines().enumerate() {
            let line = line.map_err(|e| CorpusError::MalformedStream { line: i + 1, reason: e.to_string() })?;
            stream.push_document(line.split_whitespace());
        }
        Ok(stream)
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let file = fs::File::create(path).map_err(io_err(path))?;
        self.write_to(io::BufWriter::new(file)).map_err(io_err(path))
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let file = fs::File::open(path).map_err(io_err(path))?;
        Self::read_from(io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize(&RawDocument::new("d", "I had a Headache!")), toks(&["i", "had", "a", "headache"]));
        assert!(tokenize(&RawDocument::new("d", "")).is_empty());
        assert_eq!(tokenize(&RawDocument::new("d", "pig_out, twice")), toks(&["pig_out", "twice"]));
        assert_eq!(tokenize_text("\"(don't)\" -- ..."), toks(&["don't"]));
    }

    #[test]
    fn invalid_utf8_names_document() {
        let err = RawDocument::from_bytes("post-17", vec![b'o', b'k', 0xff]).unwrap_err();
        assert!(err.to_string().contains("post-17"), "{err}");
    }

    #[test]
    fn normalize_examples() {
        let sw = StopwordSet::english_default();
        assert_eq!(normalize(toks(&["i", "had", "a", "headache"]), &sw, 3), toks(&["headache"]));
        let domain_only = StopwordSet::new(Vec::<String>::new(), ["test", "doctor", "symptom", "physician"]);
        assert_eq!(normalize(toks(&["doctor", "said", "rest"]), &domain_only, 3), toks(&["said", "rest"]));
        assert!(normalize(toks(&["ok", "123", "!!"]), &sw, 3).is_empty());
        assert_eq!(normalize(toks(&["b12", "2021", "12-3"]), &StopwordSet::default(), 3), toks(&["b12"]));
    }

    #[test]
    fn default_domain_list_is_applied() {
        let sw = StopwordSet::english_default();
        assert!(sw.contains("doctor") && sw.contains("the"));
        assert!(!sw.contains("headache"));
    }

    #[test]
    fn preprocess_composes_stages() {
        let sw = StopwordSet::english_default();
        let s = preprocess_corpus(&[RawDocument::new("a", "I had a headache")], &sw, 3);
        assert_eq!(s.tokens(), toks(&["headach"]).as_slice());
        let s = preprocess_corpus(
            &[RawDocument::new("a", "fevers and chills"), RawDocument::new("b", "the rash spread")],
            &sw,
            3,
        );
        assert_eq!(s.doc_boundaries(), &[0, 2]);
        assert_eq!(s.tokens(), toks(&["fever", "chill", "rash", "spread"]).as_slice());
        assert!(preprocess_corpus(&[], &sw, 3).is_empty());
    }

    #[test]
    fn stems_shorter_than_min_len_are_dropped() {
        // "ties" passes the length filter but stems to "tie"; "ies" stems to "ie".
        let sw = StopwordSet::default();
        let s = preprocess_document(&RawDocument::new("a", "ies ties"), &sw, 3);
        assert_eq!(s, toks(&["tie"]));
    }

    #[test]
    fn stream_file_roundtrip() {
        let s = TokenStream::from_documents(vec![vec!["abc", "def"], vec![], vec!["ghi"]]);
        assert_eq!(s.doc_boundaries(), &[0, 2]);
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "abc def\nghi\n");
        assert_eq!(TokenStream::read_from(&buf[..]).unwrap(), s);
        s.validate(3).unwrap();
    }
}
