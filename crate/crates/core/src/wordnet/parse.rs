//! WNdb `index.<pos>` / `data.<pos>` reader.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use super::{Pos, Synset, SynsetId, WordNetDb, WordNetError};

/// Raw text of one POS's file pair, with display names for diagnostics.
pub(crate) struct PosSource<'a> {
    pub pos: Pos,
    pub index_name: String,
    pub index: &'a str,
    pub data_name: String,
    pub data: &'a str,
}

/// Loads every POS present in `dir`. Noun files are mandatory; any other POS
/// is optional but needs both its index and data file.
pub fn load_wordnet(dir: &Path) -> Result<WordNetDb, WordNetError> {
    let mut texts = Vec::new();
    for pos in Pos::ALL {
        let index_path = dir.join(format!("index.{}", pos.file_suffix()));
        let data_path = dir.join(format!("data.{}", pos.file_suffix()));
        let (has_index, has_data) = (index_path.is_file(), data_path.is_file());
        if !has_index && !has_data && pos != Pos::Noun {
            continue;
        }
        for (present, p) in [(has_index, &index_path), (has_data, &data_path)] {
            if !present {
                return Err(WordNetError::MissingFile(p.clone()));
            }
        }
        let read = |p: &Path| fs::read_to_string(p).map_err(|source| WordNetError::Io { path: p.to_path_buf(), source });
        texts.push((pos, index_path.display().to_string(), read(&index_path)?, data_path.display().to_string(), read(&data_path)?));
    }
    let sources: Vec<PosSource> = texts
        .iter()
        .map(|(pos, index_name, index, data_name, data)| PosSource {
            pos: *pos,
            index_name: index_name.clone(),
            index,
            data_name: data_name.clone(),
            data,
        })
        .collect();
    from_sources(&sources)
}

/// Lines with their starting byte offsets; license header lines (leading
/// two spaces) and blank lines are skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut pos = 0;
    text.split_inclusive('\n').filter_map(move |raw| {
        let start = pos;
        pos += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        (!line.starts_with("  ") && !line.trim().is_empty()).then_some((start, line))
    })
}

fn strip_adj_marker(word: &str) -> &str {
    match word.find('(') {
        Some(i) if word.ends_with(')') => &word[..i],
        _ => word,
    }
}

struct PendingPointers {
    file: String,
    byte: usize,
    targets: Vec<SynsetId>,
}

fn parse_data_line(
    pos: Pos,
    file: &str,
    byte: usize,
    line: &str,
) -> Result<(Synset, Vec<SynsetId>), WordNetError> {
    let err = |reason: String| WordNetError::Parse { file: file.to_owned(), byte, reason };
    let (fields, gloss) = match line.split_once(" | ") {
        Some((f, g)) => (f, g.trim_end()),
        None => (line.trim_end().trim_end_matches(" |"), ""),
    };
    let mut it = fields.split_ascii_whitespace();
    let mut next = |what: &str| it.next().ok_or_else(|| err(format!("missing {what}")));

    let offset_str = next("synset offset")?;
    let offset: u32 = offset_str.parse().map_err(|_| err(format!("bad synset offset {offset_str:?}")))?;
    if offset as usize != byte {
        return Err(err(format!("synset offset {offset_str} does not match line position")));
    }
    next("lex_filenum")?;
    let ss_type = next("ss_type")?;
    if Pos::from_tag(ss_type) != Some(pos) {
        return Err(err(format!("ss_type {ss_type:?} does not belong in this file")));
    }
    let w_cnt_str = next("w_cnt")?;
    let w_cnt = usize::from_str_radix(w_cnt_str, 16).map_err(|_| err(format!("bad w_cnt {w_cnt_str:?}")))?;
    if w_cnt == 0 {
        return Err(err("synset has no words".into()));
    }
    let mut lemmas: Vec<String> = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = strip_adj_marker(next("word")?).to_lowercase();
        let lex_id = next("lex_id")?;
        u8::from_str_radix(lex_id, 16).map_err(|_| err(format!("bad lex_id {lex_id:?}")))?;
        if !lemmas.contains(&word) {
            lemmas.push(word);
        }
    }
    let p_cnt_str = next("p_cnt")?;
    let p_cnt: usize = p_cnt_str.parse().map_err(|_| err(format!("bad p_cnt {p_cnt_str:?}")))?;
    let mut hypernyms = Vec::new();
    let mut hyponyms = Vec::new();
    let mut pointers = Vec::new();
    for _ in 0..p_cnt {
        let sym = next("pointer symbol")?;
        let target = next("pointer offset")?;
        let tpos = next("pointer pos")?;
        let st = next("pointer source/target")?;
        if st.len() != 4 || u16::from_str_radix(st, 16).is_err() {
            return Err(err(format!("bad source/target field {st:?}")));
        }
        let offset: u32 = target.parse().map_err(|_| err(format!("bad pointer offset {target:?}")))?;
        let tpos = Pos::from_tag(tpos).ok_or_else(|| err(format!("bad pointer pos {tpos:?}")))?;
        let id = SynsetId { offset, pos: tpos };
        match sym {
            "@" | "@i" => hypernyms.push(id),
            "~" | "~i" => hyponyms.push(id),
            _ => continue,
        }
        pointers.push(id);
    }
    hypernyms.dedup();
    hyponyms.dedup();
    let id = SynsetId { offset, pos };
    Ok((Synset { id, lemmas, hypernyms, hyponyms, gloss: gloss.to_owned() }, pointers))
}

fn parse_index_line(
    pos: Pos,
    file: &str,
    byte: usize,
    line: &str,
) -> Result<(String, Vec<SynsetId>), WordNetError> {
    let err = |reason: String| WordNetError::Parse { file: file.to_owned(), byte, reason };
    let mut it = line.split_ascii_whitespace();
    let mut next = |what: &str| it.next().ok_or_else(|| err(format!("missing {what}")));
    let lemma = next("lemma")?.to_lowercase();
    let p = next("pos")?;
    if Pos::from_tag(p) != Some(pos) {
        return Err(err(format!("pos {p:?} does not belong in this file")));
    }
    let count = |s: &str, what: &str| s.parse::<usize>().map_err(|_| err(format!("bad {what} {s:?}")));
    let synset_cnt = count(next("synset_cnt")?, "synset_cnt")?;
    let p_cnt = count(next("p_cnt")?, "p_cnt")?;
    for _ in 0..p_cnt {
        next("pointer symbol")?;
    }
    next("sense_cnt")?;
    next("tagsense_cnt")?;
    let mut ids = Vec::with_capacity(synset_cnt);
    for _ in 0..synset_cnt {
        let o = next("synset offset")?;
        let offset = o.parse::<u32>().map_err(|_| err(format!("bad synset offset {o:?}")))?;
        ids.push(SynsetId { offset, pos });
    }
    if it.next().is_some() {
        return Err(err("trailing fields after synset offsets".into()));
    }
    Ok((lemma, ids))
}

pub(crate) fn from_sources(sources: &[PosSource]) -> Result<WordNetDb, WordNetError> {
    let mut synsets = BTreeMap::new();
    let mut pending = Vec::new();
    for src in sources {
        for (byte, line) in content_lines(src.data) {
            let (synset, targets) = parse_data_line(src.pos, &src.data_name, byte, line)?;
            pending.push(PendingPointers { file: src.data_name.clone(), byte, targets });
            synsets.insert(synset.id, synset);
        }
    }
    for p in pending {
        if let Some(&target) = p.targets.iter().find(|t| !synsets.contains_key(t)) {
            return Err(WordNetError::Dangling { file: p.file, byte: p.byte, target });
        }
    }

    let mut lemma_index: BTreeMap<String, BTreeMap<Pos, Vec<SynsetId>>> = BTreeMap::new();
    let mut seen: HashMap<(String, Pos), usize> = HashMap::new();
    for src in sources {
        for (byte, line) in content_lines(src.index) {
            let (lemma, ids) = parse_index_line(src.pos, &src.index_name, byte, line)?;
            if let Some(&first) = seen.get(&(lemma.clone(), src.pos)) {
                return Err(WordNetError::Parse {
                    file: src.index_name.clone(),
                    byte,
                    reason: format!("lemma {lemma:?} already indexed at byte {first}"),
                });
            }
            if let Some(&target) = ids.iter().find(|t| !synsets.contains_key(t)) {
                return Err(WordNetError::Dangling { file: src.index_name.clone(), byte, target });
            }
            seen.insert((lemma.clone(), src.pos), byte);
            lemma_index.entry(lemma).or_default().insert(src.pos, ids);
        }
    }
    WordNetDb::from_parts(synsets, lemma_index)
}
