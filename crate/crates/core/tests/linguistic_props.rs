mod common;

use common::transcripts::transcript;
use proptest::prelude::*;
use voicemark::linguistic::semantic::semantic_measures;
use voicemark::linguistic::{brunet, extract_linguistic, honore, mattr, type_token_ratio, LinguisticConfig};

fn letters(max: usize) -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 0..=max)
}

proptest! {
    #[test]
    fn graph_matches_oracle_across_sentences(sentences in prop::collection::vec(letters(8), 0..4)) {
        prop_assert_eq!(common::graph_actual(&sentences), common::graph_oracle(&sentences));
    }

    #[test]
    fn mattr_bounds(words in prop::collection::vec("[a-h]", 1..120), window in 2usize..60) {
        let m = mattr(&words, window);
        prop_assert!((0.0..=1.0).contains(&m));
        if words.len() <= window {
            prop_assert_eq!(m, type_token_ratio(&words));
        }
    }

    #[test]
    fn ttr_does_not_grow_under_self_concatenation(words in prop::collection::vec("[a-h]{1,2}", 1..60)) {
        let doubled: Vec<String> = words.iter().chain(&words).cloned().collect();
        prop_assert!(type_token_ratio(&doubled) <= type_token_ratio(&words));
    }

    #[test]
    fn richness_indices_match_formulas(n in 1usize..5000, v_frac in 0.01f64..1.0, h_frac in 0.0f64..1.0) {
        let v = ((n as f64 * v_frac).ceil() as usize).clamp(1, n);
        let h = ((v as f64 * h_frac).floor() as usize).min(v);
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        prop_assert!(rel(brunet(n, v), (n as f64).powf((v as f64).powf(-0.165))) <= 1e-9);
        let expected = if n == 1 { 0.0 } else { 100.0 * (n as f64).ln() / (1.0 - h as f64 / v as f64).max(0.01) };
        let got = honore(n, v, h, 0.01);
        let ok = if expected == 0.0 { got == 0.0 } else { rel(got, expected) <= 1e-9 };
        prop_assert!(ok, "honore {} vs {}", got, expected);
    }

    #[test]
    fn coherence_is_scale_invariant(
        t in transcript(),
        seed_vectors in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 7),
        c in 0.01f64..100.0,
    ) {
        let vectors: Vec<Vec<f64>> = seed_vectors[..t.sentence_count()].to_vec();
        let scaled: Vec<Vec<f64>> = vectors.iter().map(|v| v.iter().map(|x| x * c).collect()).collect();
        let a = semantic_measures(&t.clone().with_embeddings(vectors).unwrap());
        let b = semantic_measures(&t.with_embeddings(scaled).unwrap());
        prop_assert!((a.first_order_coherence - b.first_order_coherence).abs() <= 1e-12);
        prop_assert!((a.second_order_coherence - b.second_order_coherence).abs() <= 1e-12);
    }

    #[test]
    fn ratios_stay_in_range(t in transcript()) {
        let f = extract_linguistic(&t, &LinguisticConfig::default()).unwrap();
        let s = t.sentence_count() as f64;
        let unit = [
            f.lexical.type_token_ratio,
            f.lexical.mattr,
            f.lexical.lemma_ttr,
            f.lexical.pronoun_ratio,
            f.syntactic.passive_voice_ratio,
            f.graph.graph_density,
            f.semantic.sentence_repetition_ratio,
            f.semantic.discourse_cohesion,
        ];
        prop_assert!(unit.iter().all(|v| (0.0..=1.0).contains(v)), "{:?}", unit);
        prop_assert!(f.semantic.sentence_repetition_ratio <= 1.0 - 1.0 / s + 1e-12);
        prop_assert!((-1.0..=1.0).contains(&f.sentiment.compound));
        let mass = f.sentiment.neg + f.sentiment.neu + f.sentiment.pos;
        prop_assert!(mass == 0.0 || (mass - 1.0).abs() <= 1e-9);
        prop_assert!(f.named().iter().all(|(_, v)| v.is_finite()));
    }
}
