use std::collections::BTreeSet;

use proptest::prelude::*;

use chvenrich::embed::{EmbeddingModel, VectorMode};
use chvenrich::query::{cosine, top_candidates, QueryError};
use chvenrich::Model;

fn model_strategy() -> impl Strategy<Value = Model> {
    (2usize..5).prop_flat_map(|d| {
        prop::collection::vec(-1.0f64..1.0, 8 * d).prop_map(move |v| {
            let words = (0..8).map(|i| format!("word{i}")).collect();
            EmbeddingModel::from_vectors(words, d, v).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn cosine_is_symmetric_and_bounded(a in prop::collection::vec(-5.0f64..5.0, 4), b in prop::collection::vec(-5.0f64..5.0, 4)) {
        if let (Ok(x), Ok(y)) = (cosine(&a, &b), cosine(&b, &a)) {
            prop_assert_eq!(x, y);
            prop_assert!((-1.0..=1.0).contains(&x));
        }
    }

    /// Scaling every vector by a positive power of two keeps the ranking.
    #[test]
    fn ranking_is_scale_invariant(model in model_strategy(), k in -4i32..8, n in 1usize..8) {
        let none = BTreeSet::new();
        let scaled = model.scaled(2f64.powi(k));
        let a = top_candidates(&model, "word0", n, &none, VectorMode::Sum);
        let b = top_candidates(&scaled, "word0", n, &none, VectorMode::Sum);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.terms().collect::<Vec<_>>(), b.terms().collect::<Vec<_>>());
                prop_assert!(a.candidates.len() == n.min(7) || a.candidates.len() < n);
                prop_assert!(a.candidates.windows(2).all(|w| w[0].score >= w[1].score));
                prop_assert!(a.terms().all(|t| t != "word0"));
            }
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }
}

#[test]
fn zero_seed_vector_is_reported() {
    let words = vec!["aaa".to_string(), "bbb".to_string()];
    let m = Model::from_vectors(words, 2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
    let none = BTreeSet::new();
    assert_eq!(top_candidates(&m, "aaa", 1, &none, VectorMode::Sum), Err(QueryError::ZeroVector("aaa".into())));
    assert!(top_candidates(&m, "bbb", 1, &none, VectorMode::Sum).unwrap().candidates.is_empty());
}

#[test]
fn tsv_lines_rank_from_one() {
    let words = (0..3).map(|i| format!("w{i}")).collect();
    let m = Model::from_vectors(words, 2, vec![1.0, 0.0, 1.0, 0.1, 0.0, 1.0]).unwrap();
    let l = top_candidates(&m, "w0", 2, &BTreeSet::new(), VectorMode::MainOnly).unwrap();
    let tsv = l.to_tsv();
    let first: Vec<&str> = tsv.lines().next().unwrap().split('\t').collect();
    assert_eq!(&first[..3], ["w0", "1", "w1"]);
    assert_eq!(tsv.lines().count(), 2);
}
