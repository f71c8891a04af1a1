//! Embedding coherence, lemma cohesion and sentence repetition.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::transcript::{AnnotatedTranscript, Sentence};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SemanticFields {
    pub first_order_coherence: f64,
    pub second_order_coherence: f64,
    pub discourse_cohesion: f64,
    pub sentence_repetition_ratio: f64,
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Mean cosine between vectors `lag` apart; 0 when no such pair exists.
pub fn lagged_coherence(vectors: &[Vec<f64>], lag: usize) -> f64 {
    if lag == 0 || vectors.len() <= lag {
        return 0.0;
    }
    let pairs = vectors.len() - lag;
    (0..pairs).map(|i| cosine(&vectors[i], &vectors[i + lag])).sum::<f64>() / pairs as f64
}

pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

fn lemma_set(s: &Sentence) -> BTreeSet<String> {
    s.words().map(|w| w.lemma.to_lowercase()).collect()
}

/// Lowercased word forms joined by single spaces.
fn normalized(s: &Sentence) -> String {
    s.words().map(|w| w.form.to_lowercase()).collect::<Vec<_>>().join(" ")
}

pub fn semantic_measures(t: &AnnotatedTranscript) -> SemanticFields {
    let (first, second) = match &t.embeddings {
        Some(v) => (lagged_coherence(v, 1), lagged_coherence(v, 2)),
        None => (0.0, 0.0),
    };

    let sets: Vec<_> = t.sentences.iter().map(lemma_set).collect();
    let cohesion = if sets.len() < 2 {
        0.0
    } else {
        sets.windows(2).map(|w| jaccard(&w[0], &w[1])).sum::<f64>() / (sets.len() - 1) as f64
    };

    let mut seen = HashSet::new();
    let duplicates = t.sentences.iter().filter(|s| !seen.insert(normalized(s))).count();
    let repetition = if t.sentences.is_empty() {
        0.0
    } else {
        duplicates as f64 / t.sentences.len() as f64
    };

    SemanticFields {
        first_order_coherence: first,
        second_order_coherence: second,
        discourse_cohesion: cohesion,
        sentence_repetition_ratio: repetition,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linguistic::test_support::transcript_from_words;

    #[test]
    fn identical_and_orthogonal_embeddings() {
        let same = vec![vec![0.3, 0.4]; 4];
        assert!((lagged_coherence(&same, 1) - 1.0).abs() < 1e-12);
        assert!((lagged_coherence(&same, 2) - 1.0).abs() < 1e-12);
        let ortho = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        assert_eq!(lagged_coherence(&ortho, 1), 0.0);
        assert_eq!(lagged_coherence(&ortho, 2), 0.0);
    }

    #[test]
    fn too_few_sentences() {
        let v = vec![vec![1.0], vec![1.0]];
        assert_eq!(lagged_coherence(&v, 2), 0.0);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn repetition_and_cohesion() {
        let t = transcript_from_words(&[vec!["a", "b"], vec!["a", "b"], vec!["c"]]);
        let f = semantic_measures(&t);
        assert!((f.sentence_repetition_ratio - 1.0 / 3.0).abs() < 1e-12);
        assert!((f.discourse_cohesion - 0.5).abs() < 1e-12);
        assert_eq!(f.first_order_coherence, 0.0);
    }
}
