//! Dependency and constituency measures of syntactic complexity.

use serde::{Deserialize, Serialize};

use crate::transcript::{AnnotatedTranscript, Sentence};

use super::LinguisticConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SyntacticFields {
    pub mean_sentence_length: f64,
    pub mean_clause_length: f64,
    pub syntactic_depth_mean: f64,
    pub syntactic_depth_max: f64,
    pub clause_ratio: f64,
    pub verb_tense_switches: f64,
    pub verb_tense_switch_ratio: f64,
    pub syntactic_embedding_depth: f64,
    pub passive_voice_ratio: f64,
    pub mean_constituency_depth: f64,
    pub max_constituency_depth: f64,
}

/// Depth of every token: 1 for the root, plus one per edge to the root.
pub fn token_depths(s: &Sentence) -> Vec<usize> {
    s.tokens
        .iter()
        .map(|t| {
            let mut depth = 1;
            let mut cur = t.head;
            while cur != 0 {
                depth += 1;
                cur = s.tokens[cur - 1].head;
            }
            depth
        })
        .collect()
}

pub fn sentence_depth(s: &Sentence) -> usize {
    token_depths(s).into_iter().max().unwrap_or(0)
}

fn is_clause_head(deprel: &str, cfg: &LinguisticConfig) -> bool {
    let base = deprel.split(':').next().unwrap_or(deprel);
    cfg.clause_deprels.iter().any(|d| d == deprel || d == base)
}

/// Adjacent pairs with differing tense along the given sequence.
pub fn tense_switches<S: AsRef<str>>(tenses: &[S]) -> usize {
    tenses.windows(2).filter(|w| w[0].as_ref() != w[1].as_ref()).count()
}

pub fn syntactic_measures(t: &AnnotatedTranscript, cfg: &LinguisticConfig) -> SyntacticFields {
    let sentences = t.sentence_count();
    let words = t.word_count();
    if sentences == 0 {
        return SyntacticFields::default();
    }
    let depths: Vec<usize> = t.sentences.iter().map(sentence_depth).collect();
    let max_depth = depths.iter().copied().max().unwrap_or(0) as f64;
    let clauses = t
        .sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .filter(|tok| is_clause_head(&tok.deprel, cfg))
        .count();

    let tensed: Vec<&str> = t
        .sentences
        .iter()
        .flat_map(|s| &s.tokens)
        .filter(|tok| tok.upos == "VERB" || tok.upos == "AUX")
        .filter_map(|tok| tok.feat("Tense"))
        .collect();
    let switches = tense_switches(&tensed);

    let verbs: Vec<_> = t.words().filter(|w| w.upos == "VERB").collect();
    let passive = verbs.iter().filter(|w| w.feat("Voice") == Some("Pass")).count();

    let (mean_cd, max_cd) = match &t.trees {
        Some(trees) if !trees.is_empty() => {
            let d: Vec<usize> = trees.iter().map(|tr| tr.depth()).collect();
            (
                d.iter().sum::<usize>() as f64 / d.len() as f64,
                *d.iter().max().unwrap() as f64,
            )
        }
        _ => (0.0, 0.0),
    };

    SyntacticFields {
        mean_sentence_length: words as f64 / sentences as f64,
        mean_clause_length: if clauses == 0 { 0.0 } else { words as f64 / clauses as f64 },
        syntactic_depth_mean: depths.iter().sum::<usize>() as f64 / sentences as f64,
        syntactic_depth_max: max_depth,
        clause_ratio: clauses as f64 / sentences as f64,
        verb_tense_switches: switches as f64,
        verb_tense_switch_ratio: if tensed.is_empty() {
            0.0
        } else {
            switches as f64 / tensed.len() as f64
        },
        syntactic_embedding_depth: max_depth,
        passive_voice_ratio: if verbs.is_empty() {
            0.0
        } else {
            passive as f64 / verbs.len() as f64
        },
        mean_constituency_depth: mean_cd,
        max_constituency_depth: max_cd,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linguistic::test_support::{sentence, tok, transcript};

    #[test]
    fn single_token_sentence() {
        let t = transcript(vec![sentence(vec![tok("yes", "INTJ", "", 0, "root")])]);
        let f = syntactic_measures(&t, &LinguisticConfig::default());
        assert_eq!(f.syntactic_depth_max, 1.0);
        assert_eq!(f.clause_ratio, 1.0);
        assert_eq!(f.mean_clause_length, 1.0);
    }

    #[test]
    fn chain_depth() {
        // 1 <- 2 <- 3: token 3 is the root, 2 depends on 3, 1 on 2
        let s = sentence(vec![
            tok("a", "X", "", 2, "dep"),
            tok("b", "X", "", 3, "dep"),
            tok("c", "X", "", 0, "root"),
        ]);
        assert_eq!(token_depths(&s), vec![3, 2, 1]);
        assert_eq!(sentence_depth(&s), 3);
    }

    #[test]
    fn tense_switch_example() {
        assert_eq!(tense_switches(&["Past", "Past", "Pres", "Past"]), 2);
        let s = sentence(vec![
            tok("went", "VERB", "Tense=Past", 0, "root"),
            tok("saw", "VERB", "Tense=Past", 1, "conj"),
            tok("is", "VERB", "Tense=Pres", 1, "conj"),
            tok("ran", "VERB", "Tense=Past", 1, "conj"),
        ]);
        let f = syntactic_measures(&transcript(vec![s]), &LinguisticConfig::default());
        assert_eq!(f.verb_tense_switches, 2.0);
        assert_eq!(f.verb_tense_switch_ratio, 0.5);
    }

    #[test]
    fn passive_ratio_and_clauses() {
        let s = sentence(vec![
            tok("it", "PRON", "", 2, "nsubj:pass"),
            tok("eaten", "VERB", "Tense=Past|Voice=Pass", 0, "root"),
            tok("and", "CCONJ", "", 4, "cc"),
            tok("left", "VERB", "Tense=Past", 2, "conj"),
            tok("saying", "VERB", "VerbForm=Ger", 2, "advcl"),
        ]);
        let f = syntactic_measures(&transcript(vec![s]), &LinguisticConfig::default());
        assert!((f.passive_voice_ratio - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.clause_ratio, 2.0);
    }

    #[test]
    fn no_verbs() {
        let t = transcript(vec![sentence(vec![tok("hi", "INTJ", "", 0, "root")])]);
        let f = syntactic_measures(&t, &LinguisticConfig::default());
        assert_eq!((f.verb_tense_switches, f.verb_tense_switch_ratio, f.passive_voice_ratio), (0.0, 0.0, 0.0));
        assert_eq!((f.mean_constituency_depth, f.max_constituency_depth), (0.0, 0.0));
    }
}
