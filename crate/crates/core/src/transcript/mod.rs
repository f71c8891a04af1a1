//! Annotated transcripts: CoNLL-U dependency annotation, optional bracketed
//! constituency trees and optional sentence embeddings.
//!
//! Annotations are consumed, never produced; tokenization, tagging and
//! parsing happen upstream.

pub mod bracketed;
pub mod conllu;
pub mod embeddings;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bracketed::{parse_bracketed, ConstituencyTree};
pub use conllu::{parse_conllu, write_conllu};
pub use embeddings::{load_embeddings, parse_embeddings};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranscriptError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: token id {found} where {expected} was expected")]
    NonContiguousId {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("sentence starting at line {line}: head {head} outside 0..={len}")]
    HeadOutOfRange { line: usize, head: usize, len: usize },
    #[error("sentence {sentence} (line {line}): head links form a cycle")]
    Cycle { sentence: usize, line: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unbalanced parentheses near byte {offset}")]
    Unbalanced { offset: usize },
    #[error("empty tree node at byte {offset}")]
    EmptyNode { offset: usize },
    #[error("embedding index {0} is missing")]
    MissingIndex(usize),
    #[error("line {line}: embedding has dimension {found}, expected {expected}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-finite embedding component")]
    NonFinite { line: usize },
    #[error("{what}: {found} entries for {sentences} sentences")]
    CountMismatch {
        what: &'static str,
        found: usize,
        sentences: usize,
    },
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the sentence.
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub feats: BTreeMap<String, String>,
    /// Head token id, 0 for the root.
    pub head: usize,
    pub deprel: String,
}

impl Token {
    pub fn is_punct(&self) -> bool {
        self.upos == "PUNCT"
    }

    pub fn feat(&self, key: &str) -> Option<&str> {
        self.feats.get(key).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Non-punctuation tokens.
    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| !t.is_punct())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedTranscript {
    pub sentences: Vec<Sentence>,
    pub trees: Option<Vec<ConstituencyTree>>,
    pub embeddings: Option<Vec<Vec<f64>>>,
    pub raw_text: Option<String>,
}

impl AnnotatedTranscript {
    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// All tokens including punctuation.
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }

    /// Non-punctuation tokens, the `N` of every lexical index.
    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(|s| s.words().count()).sum()
    }

    pub fn words(&self) -> impl Iterator<Item = &Token> {
        self.sentences.iter().flat_map(Sentence::words)
    }

    /// The raw text if the source carried it, else forms joined by spaces.
    pub fn text(&self) -> String {
        match &self.raw_text {
            Some(t) => t.clone(),
            None => self
                .sentences
                .iter()
                .flat_map(|s| s.tokens.iter().map(|t| t.form.as_str()))
                .collect::<Vec<_>>()
                .join(" "),
        }
    }

    pub fn with_trees(mut self, trees: Vec<ConstituencyTree>) -> Result<Self, TranscriptError> {
        if trees.len() != self.sentences.len() {
            return Err(TranscriptError::CountMismatch {
                what: "constituency trees",
                found: trees.len(),
                sentences: self.sentences.len(),
            });
        }
        self.trees = Some(trees);
        Ok(self)
    }

    pub fn with_embeddings(mut self, vectors: Vec<Vec<f64>>) -> Result<Self, TranscriptError> {
        if vectors.len() != self.sentences.len() {
            return Err(TranscriptError::CountMismatch {
                what: "embeddings",
                found: vectors.len(),
                sentences: self.sentences.len(),
            });
        }
        self.embeddings = Some(vectors);
        Ok(self)
    }

    /// Embedding dimension, when embeddings are attached.
    pub fn embedding_dim(&self) -> Option<usize> {
        self.embeddings.as_ref().and_then(|e| e.first()).map(Vec::len)
    }
}

fn read(path: &Path) -> Result<String, TranscriptError> {
    std::fs::read_to_string(path).map_err(|e| TranscriptError::Io(format!("{}: {e}", path.display())))
}

/// Reads a CoNLL-U file and attaches optional tree and embedding sidecars.
pub fn ingest(
    conllu: &Path,
    trees: Option<&Path>,
    embeddings: Option<&Path>,
) -> Result<AnnotatedTranscript, TranscriptError> {
    let mut t = parse_conllu(&read(conllu)?)?;
    if let Some(p) = trees {
        t = t.with_trees(parse_bracketed(&read(p)?)?)?;
    }
    if let Some(p) = embeddings {
        t = t.with_embeddings(load_embeddings(p)?)?;
    }
    Ok(t)
}
