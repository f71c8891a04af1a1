//! Lexical richness, part-of-speech ratios and morphological counts.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::transcript::conllu::feats_string;
use crate::transcript::AnnotatedTranscript;

use super::LinguisticConfig;

pub const CONTENT_UPOS: [&str; 5] = ["NOUN", "VERB", "ADJ", "ADV", "PROPN"];
pub const PROPOSITION_UPOS: [&str; 6] = ["VERB", "ADJ", "ADV", "ADP", "CCONJ", "SCONJ"];
pub const FILLERS: [&str; 6] = ["um", "uh", "erm", "uhm", "er", "hmm"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LexicalFields {
    pub word_count: f64,
    pub sentence_count: f64,
    pub avg_word_length: f64,
    pub type_token_ratio: f64,
    pub mattr: f64,
    pub brunet_index: f64,
    pub honore_stat: f64,
    pub lexical_density: f64,
    pub idea_density: f64,
    pub content_function_ratio: f64,
    pub pronoun_ratio: f64,
    pub tense_past: f64,
    pub tense_pres: f64,
    pub voice_pass: f64,
    pub number_plur: f64,
    pub lemma_ttr: f64,
    pub upos_diversity: f64,
    pub morphological_richness: f64,
    pub propositional_density: f64,
    pub filler_count: f64,
}

/// Brunet's W = N^(V^-0.165).
pub fn brunet(n: usize, v: usize) -> f64 {
    if n == 0 || v == 0 {
        return 0.0;
    }
    (n as f64).powf((v as f64).powf(-0.165))
}

/// Honoré's R = 100 ln N / (1 - H/V), with the denominator floored at
/// `min_denominator` so that all-hapax texts stay finite.
pub fn honore(n: usize, v: usize, hapax: usize, min_denominator: f64) -> f64 {
    if n == 0 || v == 0 {
        return 0.0;
    }
    let denom = (1.0 - hapax as f64 / v as f64).max(min_denominator);
    100.0 * (n as f64).ln() / denom
}

pub fn type_token_ratio<S: AsRef<str>>(words: &[S]) -> f64 {
    if words.is_empty() {
        return 0.0;
    }
    let types: HashSet<&str> = words.iter().map(AsRef::as_ref).collect();
    types.len() as f64 / words.len() as f64
}

/// Moving-average TTR over windows of `window` words; plain TTR when the
/// text is not longer than one window.
pub fn mattr<S: AsRef<str>>(words: &[S], window: usize) -> f64 {
    let n = words.len();
    if n == 0 {
        return 0.0;
    }
    if n <= window || window == 0 {
        return type_token_ratio(words);
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for w in &words[..window] {
        *counts.entry(w.as_ref()).or_default() += 1;
    }
    let mut sum = counts.len() as f64 / window as f64;
    for i in window..n {
        let out = words[i - window].as_ref();
        let c = counts.get_mut(out).expect("word in window");
        *c -= 1;
        if *c == 0 {
            counts.remove(out);
        }
        *counts.entry(words[i].as_ref()).or_default() += 1;
        sum += counts.len() as f64 / window as f64;
    }
    sum / (n - window + 1) as f64
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn lexical_indices(t: &AnnotatedTranscript, cfg: &LinguisticConfig) -> LexicalFields {
    let words: Vec<_> = t.words().collect();
    let n = words.len();
    if n == 0 {
        return LexicalFields {
            sentence_count: t.sentence_count() as f64,
            ..LexicalFields::default()
        };
    }
    let forms: Vec<String> = words.iter().map(|w| w.form.to_lowercase()).collect();
    let lemmas: Vec<String> = words.iter().map(|w| w.lemma.to_lowercase()).collect();

    let mut freq: HashMap<&str, usize> = HashMap::new();
    for f in &forms {
        *freq.entry(f).or_default() += 1;
    }
    let v = freq.len();
    let hapax = freq.values().filter(|&&c| c == 1).count();

    let count_upos = |set: &[&str]| words.iter().filter(|w| set.contains(&w.upos.as_str())).count();
    let content = count_upos(&CONTENT_UPOS);
    let function = n - content;
    let propositions = count_upos(&PROPOSITION_UPOS);
    let pronouns = count_upos(&["PRON"]);
    let feat_count = |k: &str, val: &str| words.iter().filter(|w| w.feat(k) == Some(val)).count();

    let upos: HashSet<&str> = words.iter().map(|w| w.upos.as_str()).collect();
    let morph: HashSet<String> = words
        .iter()
        .filter(|w| !w.feats.is_empty())
        .map(|w| feats_string(&w.feats))
        .collect();
    let fillers = forms.iter().filter(|f| cfg.fillers.iter().any(|x| x == *f)).count();

    LexicalFields {
        word_count: n as f64,
        sentence_count: t.sentence_count() as f64,
        avg_word_length: words.iter().map(|w| w.form.chars().count()).sum::<usize>() as f64 / n as f64,
        type_token_ratio: ratio(v, n),
        mattr: mattr(&forms, cfg.mattr_window),
        brunet_index: brunet(n, v),
        honore_stat: honore(n, v, hapax, cfg.honore_min_denominator),
        lexical_density: ratio(content, n),
        idea_density: ratio(propositions, n),
        content_function_ratio: if function == 0 {
            content as f64
        } else {
            content as f64 / function as f64
        },
        pronoun_ratio: ratio(pronouns, n),
        tense_past: feat_count("Tense", "Past") as f64,
        tense_pres: feat_count("Tense", "Pres") as f64,
        voice_pass: feat_count("Voice", "Pass") as f64,
        number_plur: feat_count("Number", "Plur") as f64,
        lemma_ttr: type_token_ratio(&lemmas),
        upos_diversity: ratio(upos.len(), n),
        morphological_richness: ratio(morph.len(), n),
        propositional_density: ratio(propositions, n),
        filler_count: fillers as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linguistic::test_support::transcript_from_words;

    #[test]
    fn all_distinct_words() {
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let t = transcript_from_words(&[words.iter().map(String::as_str).collect()]);
        let f = lexical_indices(&t, &LinguisticConfig::default());
        assert_eq!(f.type_token_ratio, 1.0);
        assert_eq!(f.mattr, 1.0);
        // H = V = 10: denominator floored at 0.01
        assert!((f.honore_stat - 100.0 * 10f64.ln() / 0.01).abs() < 1e-9);
    }

    #[test]
    fn richness_formulas() {
        assert!((brunet(100, 50) - 11.19).abs() < 0.01);
        assert!((honore(100, 50, 20, 0.01) - 767.53).abs() < 0.01);
        assert_eq!(brunet(0, 0), 0.0);
    }

    #[test]
    fn mattr_window() {
        let words: Vec<String> = (0..60).map(|i| format!("w{}", i % 30)).collect();
        // every window of 50 over a period-30 sequence holds 30 types
        assert!((mattr(&words, 50) - 30.0 / 50.0).abs() < 1e-12);
        let short: Vec<&str> = vec!["a", "b", "a"];
        assert_eq!(mattr(&short, 50), type_token_ratio(&short));
    }

    #[test]
    fn empty_transcript_is_zero() {
        let t = transcript_from_words(&[]);
        assert_eq!(lexical_indices(&t, &LinguisticConfig::default()), LexicalFields::default());
    }

    #[test]
    fn fillers_case_insensitive() {
        let t = transcript_from_words(&[vec!["Um", "so", "UH", "hmm", "yes"]]);
        assert_eq!(lexical_indices(&t, &LinguisticConfig::default()).filler_count, 3.0);
    }
}
