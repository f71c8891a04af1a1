//! Lexicon-and-rules valence scoring in the style of VADER.
//!
//! Idiom handling and the "but" re-weighting rule are not implemented.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SentimentError {
    #[error("lexicon {path}: {message}")]
    Io { path: String, message: String },
    #[error("lexicon line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("normalization constant must be positive, got {0}")]
    BadAlpha(f64),
}

const SAMPLE_LEXICON: &str = include_str!("../../data/sample_lexicon.tsv");

const INCREMENTS: [&str; 16] = [
    "absolutely", "amazingly", "completely", "deeply", "enormously", "entirely", "extremely",
    "highly", "incredibly", "most", "really", "so", "totally", "truly", "utterly", "very",
];
const DECREMENTS: [&str; 10] = [
    "almost", "barely", "hardly", "kinda", "less", "little", "marginally", "occasionally",
    "slightly", "somewhat",
];
const NEGATIONS: [&str; 20] = [
    "not", "no", "never", "none", "nobody", "nothing", "neither", "nor", "nowhere", "cannot",
    "cant", "dont", "didnt", "doesnt", "isnt", "wasnt", "wont", "without", "aint", "shouldnt",
];

/// Parses `token<TAB>valence[<TAB>...]` lines; `#` starts a comment line.
pub fn parse_lexicon(text: &str) -> Result<BTreeMap<String, f64>, SentimentError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let token = cols.next().unwrap_or("").trim();
        let value = cols.next().ok_or_else(|| SentimentError::Parse {
            line: i + 1,
            message: "missing valence column".into(),
        })?;
        let v: f64 = value.trim().parse().map_err(|_| SentimentError::Parse {
            line: i + 1,
            message: format!("bad valence {value:?}"),
        })?;
        if token.is_empty() || !v.is_finite() {
            return Err(SentimentError::Parse { line: i + 1, message: "empty token or non-finite valence".into() });
        }
        map.insert(token.to_lowercase(), v);
    }
    Ok(map)
}

pub fn load_lexicon(path: &Path) -> Result<BTreeMap<String, f64>, SentimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| SentimentError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_lexicon(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentConfig {
    pub lexicon: BTreeMap<String, f64>,
    /// Intensifier → signed increment.
    pub boosters: BTreeMap<String, f64>,
    pub negations: BTreeSet<String>,
    pub alpha: f64,
    pub negation_scalar: f64,
    /// Scale applied to a booster two tokens back.
    pub booster_decay: f64,
    pub caps_increment: f64,
    pub exclamation_increment: f64,
    pub max_exclamations: usize,
}

impl SentimentConfig {
    pub fn with_lexicon(lexicon: BTreeMap<String, f64>) -> Self {
        let mut boosters = BTreeMap::new();
        for w in INCREMENTS {
            boosters.insert(w.to_string(), 0.293);
        }
        for w in DECREMENTS {
            boosters.insert(w.to_string(), -0.293);
        }
        Self {
            lexicon,
            boosters,
            negations: NEGATIONS.iter().map(|s| s.to_string()).collect(),
            alpha: 15.0,
            negation_scalar: -0.74,
            booster_decay: 0.95,
            caps_increment: 0.733,
            exclamation_increment: 0.292,
            max_exclamations: 3,
        }
    }

    /// The small lexicon bundled with the crate, for tests and demos.
    pub fn sample() -> Self {
        Self::with_lexicon(parse_lexicon(SAMPLE_LEXICON).expect("bundled lexicon parses"))
    }

    pub fn from_file(path: &Path) -> Result<Self, SentimentError> {
        let cfg = Self::with_lexicon(load_lexicon(path)?);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SentimentError> {
        if self.lexicon.is_empty() {
            return Err(SentimentError::EmptyLexicon);
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(SentimentError::BadAlpha(self.alpha));
        }
        Ok(())
    }

    fn is_negation(&self, lower: &str) -> bool {
        self.negations.contains(lower) || lower.ends_with("n't")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SentimentScores {
    pub neg: f64,
    pub neu: f64,
    pub pos: f64,
    pub compound: f64,
}

/// x / sqrt(x² + alpha), clipped to [-1, 1].
pub fn normalize(x: f64, alpha: f64) -> f64 {
    (x / (x * x + alpha).sqrt()).clamp(-1.0, 1.0)
}

fn is_caps(token: &str) -> bool {
    token.chars().any(char::is_alphabetic) && !token.chars().any(char::is_lowercase)
}

fn tokens(text: &str) -> Vec<&str> {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| c.is_ascii_punctuation() && c != '\''))
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn sentiment_scores(text: &str, cfg: &SentimentConfig) -> SentimentScores {
    let toks = tokens(text);
    if toks.is_empty() {
        return SentimentScores::default();
    }
    let lower: Vec<String> = toks.iter().map(|t| t.to_lowercase()).collect();
    let caps: Vec<bool> = toks.iter().map(|t| is_caps(t)).collect();
    let mixed_case = caps.iter().any(|&c| c) && caps.iter().any(|&c| !c);

    let mut valences = Vec::with_capacity(toks.len());
    for i in 0..toks.len() {
        let Some(&base) = cfg.lexicon.get(&lower[i]) else {
            valences.push(0.0);
            continue;
        };
        let mut v = base;
        if caps[i] && mixed_case {
            v += cfg.caps_increment * v.signum();
        }
        for back in 1..=2usize {
            if i < back {
                break;
            }
            if let Some(&b) = cfg.boosters.get(&lower[i - back]) {
                let mut s = if v < 0.0 { -b } else { b };
                if back == 2 {
                    s *= cfg.booster_decay;
                }
                v += s;
            }
        }
        for back in 1..=3usize {
            if i >= back && cfg.is_negation(&lower[i - back]) {
                v *= cfg.negation_scalar;
            }
        }
        valences.push(v);
    }

    let sum: f64 = valences.iter().sum();
    let bangs = text.matches('!').count().min(cfg.max_exclamations) as f64;
    let emphasis = bangs * cfg.exclamation_increment;
    let total = if sum > 0.0 {
        sum + emphasis
    } else if sum < 0.0 {
        sum - emphasis
    } else {
        sum
    };
    let compound = normalize(total, cfg.alpha);

    let mut pos = 0.0;
    let mut neg = 0.0;
    let mut neu = 0.0;
    for &v in &valences {
        if v > 0.0 {
            pos += v + 1.0;
        } else if v < 0.0 {
            neg += v - 1.0;
        } else {
            neu += 1.0;
        }
    }
    if pos > neg.abs() {
        pos += emphasis;
    } else if pos < neg.abs() {
        neg -= emphasis;
    }
    let mass = pos + neg.abs() + neu;
    SentimentScores {
        neg: (neg / mass).abs(),
        neu: neu / mass,
        pos: pos / mass,
        compound,
    }
}
