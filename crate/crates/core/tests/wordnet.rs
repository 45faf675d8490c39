use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use chvenrich::wordnet::{load_wordnet, resnik, InformationContent, Pos, Relation, WordNetDb, WordNetError};

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/wordnet")
}

fn fixture() -> WordNetDb {
    load_wordnet(&fixture_dir()).expect("fixture loads")
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

#[test]
fn fixture_contains_headache() {
    let db = fixture();
    assert!(db.contains_lemma("headache"));
    assert_eq!(db.senses("headache", &[Pos::Noun]).len(), 2);
    assert_eq!(db.roots().len(), 1);
    assert_eq!(db.synset(db.roots()[0]).unwrap().lemmas, ["entity"]);
}

#[test]
fn headache_synonyms_union_all_senses() {
    let db = fixture();
    let syn = db.related_lemmas("headache", Relation::Synonym, &[Pos::Noun]);
    assert_eq!(syn, set(&["cephalalgia", "concern", "head_ache", "vexation", "worry"]));
}

#[test]
fn headache_hyponyms_include_the_burden_family() {
    let db = fixture();
    let hypo = db.related_lemmas("headache", Relation::Hyponym, &[Pos::Noun]);
    for w in ["dead_weight", "burden", "fardel", "imposition", "bugaboo", "pill", "business"] {
        assert!(hypo.contains(w), "{w} missing from {hypo:?}");
    }
    assert!(!hypo.contains("headache"));
}

#[test]
fn headache_hypernyms_reach_entity() {
    let db = fixture();
    let hyper = db.related_lemmas("headache", Relation::Hypernym, &[Pos::Noun]);
    assert!(hyper.contains("entity"));
    assert!(hyper.contains("pain"));
}

#[test]
fn unknown_lemma_has_no_relations() {
    let db = fixture();
    for r in [Relation::Synonym, Relation::Hyponym, Relation::Hypernym] {
        assert!(db.related_lemmas("zzzz-notaword", r, &[Pos::Noun]).is_empty());
    }
}

#[test]
fn empty_directory_is_a_missing_file_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_wordnet(dir.path()), Err(WordNetError::MissingFile(_))));
}

#[test]
fn corrupted_offset_names_file_and_byte() {
    let dir = tempfile::tempdir().unwrap();
    let data = std::fs::read_to_string(fixture_dir().join("data.noun")).unwrap();
    let index = std::fs::read_to_string(fixture_dir().join("index.noun")).unwrap();
    let line_start = data.find("\n00").unwrap() + 1;
    let mut broken = data.clone();
    broken.replace_range(line_start..line_start + 8, "99999999");
    std::fs::write(dir.path().join("data.noun"), broken).unwrap();
    std::fs::write(dir.path().join("index.noun"), index).unwrap();
    match load_wordnet(dir.path()) {
        Err(WordNetError::Parse { file, byte, .. }) => {
            assert!(file.ends_with("data.noun"));
            assert_eq!(byte, line_start);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn ic_is_monotone_and_zero_at_roots_on_fixture() {
    let db = fixture();
    let counts: HashMap<String, f64> = db.lemmas().enumerate().map(|(i, l)| (l.to_owned(), (i % 7) as f64)).collect();
    let ic = InformationContent::from_lemma_counts(&db, &counts, "fixture").unwrap();
    for s in db.synsets() {
        assert!(ic.get(s.id) >= 0.0);
        if s.hypernyms.is_empty() {
            assert_eq!(ic.get(s.id), 0.0);
        }
        for &h in &s.hypernyms {
            assert!(ic.get(h) <= ic.get(s.id), "{} above {}", h, s.id);
        }
    }
}

#[test]
fn resnik_is_bounded_by_each_side() {
    let db = fixture();
    let counts: HashMap<String, f64> = db.lemmas().map(|l| (l.to_owned(), l.len() as f64)).collect();
    let ic = InformationContent::from_lemma_counts(&db, &counts, "fixture").unwrap();
    let lemmas: Vec<&str> = db.lemmas().collect();
    let max_ic = |l: &str| db.senses(l, &[Pos::Noun]).into_iter().map(|s| ic.get(s)).fold(0.0, f64::max);
    for a in lemmas.iter().step_by(3) {
        for b in lemmas.iter().step_by(5) {
            let r = resnik(&db, &ic, a, b, &[Pos::Noun]);
            assert!(r <= max_ic(a).min(max_ic(b)) + 1e-12);
        }
    }
}

/// Full WordNet check, enabled by pointing `WNDB_DIR` at a WNdb 3.0 `dict` directory.
#[test]
fn full_wordnet_when_available() {
    let Ok(dir) = std::env::var("WNDB_DIR") else {
        eprintln!("WNDB_DIR not set; skipping full WordNet load");
        return;
    };
    let db = load_wordnet(Path::new(&dir)).expect("full WordNet loads");
    assert!(db.len() > 117_000, "{} synsets", db.len());
    let syn = db.related_lemmas("headache", Relation::Synonym, &[Pos::Noun]);
    assert_eq!(syn, set(&["cephalalgia", "concern", "head_ache", "vexation", "worry"]));
    let hypo = db.related_lemmas("headache", Relation::Hyponym, &[Pos::Noun]);
    for w in ["dead_weight", "burden", "fardel", "imposition", "bugaboo", "pill", "business"] {
        assert!(hypo.contains(w), "{w}");
    }
}
