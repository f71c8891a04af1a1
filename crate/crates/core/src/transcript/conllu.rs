//! CoNLL-U reader and writer.

use std::collections::BTreeMap;

use super::{AnnotatedTranscript, Sentence, Token, TranscriptError};

fn parse_feats(field: &str, line: usize) -> Result<BTreeMap<String, String>, TranscriptError> {
    let mut feats = BTreeMap::new();
    if field == "_" || field.is_empty() {
        return Ok(feats);
    }
    for pair in field.split('|') {
        let (k, v) = pair.split_once('=').ok_or_else(|| TranscriptError::Syntax {
            line,
            message: format!("feature {pair:?} is not key=value"),
        })?;
        feats.insert(k.to_string(), v.to_string());
    }
    Ok(feats)
}

fn check_tree(sentence: &Sentence, index: usize, line: usize) -> Result<(), TranscriptError> {
    let n = sentence.tokens.len();
    let roots = sentence.tokens.iter().filter(|t| t.head == 0).count();
    if roots != 1 {
        return Err(TranscriptError::Syntax {
            line,
            message: format!("sentence {} has {roots} roots, expected exactly one", index + 1),
        });
    }
    for start in &sentence.tokens {
        let mut cur = start.id;
        let mut steps = 0;
        while cur != 0 {
            cur = sentence.tokens[cur - 1].head;
            steps += 1;
            if steps > n {
                return Err(TranscriptError::Cycle {
                    sentence: index + 1,
                    line,
                });
            }
        }
    }
    Ok(())
}

struct Pending {
    tokens: Vec<Token>,
    text: Option<String>,
    first_line: usize,
}

fn finish(
    pending: &mut Option<Pending>,
    sentences: &mut Vec<Sentence>,
    texts: &mut Vec<Option<String>>,
) -> Result<(), TranscriptError> {
    if let Some(p) = pending.take() {
        if p.tokens.is_empty() {
            return Ok(());
        }
        let n = p.tokens.len();
        for t in &p.tokens {
            if t.head > n {
                return Err(TranscriptError::HeadOutOfRange {
                    line: p.first_line,
                    head: t.head,
                    len: n,
                });
            }
        }
        let sentence = Sentence { tokens: p.tokens };
        check_tree(&sentence, sentences.len(), p.first_line)?;
        sentences.push(sentence);
        texts.push(p.text);
    }
    Ok(())
}

/// Parses CoNLL-U text. Comment lines are ignored except `# text = ...`,
/// which feeds the raw text; multiword ranges (`1-2`) and empty nodes
/// (`1.1`) are skipped.
pub fn parse_conllu(text: &str) -> Result<AnnotatedTranscript, TranscriptError> {
    let mut sentences = Vec::new();
    let mut texts = Vec::new();
    let mut pending: Option<Pending> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut pending, &mut sentences, &mut texts)?;
            continue;
        }
        let p = pending.get_or_insert_with(|| Pending {
            tokens: Vec::new(),
            text: None,
            first_line: line_no,
        });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(t) = comment.trim().strip_prefix("text =") {
                p.text = Some(t.trim().to_string());
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(TranscriptError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let id: usize = cols[0].parse().map_err(|_| TranscriptError::Syntax {
            line: line_no,
            message: format!("bad token id {:?}", cols[0]),
        })?;
        if id != p.tokens.len() + 1 {
            return Err(TranscriptError::NonContiguousId {
                line: line_no,
                expected: p.tokens.len() + 1,
                found: id,
            });
        }
        let head: usize = cols[6].parse().map_err(|_| TranscriptError::Syntax {
            line: line_no,
            message: format!("bad head {:?}", cols[6]),
        })?;
        if head == id {
            return Err(TranscriptError::Cycle {
                sentence: sentences.len() + 1,
                line: line_no,
            });
        }
        p.tokens.push(Token {
            id,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            feats: parse_feats(cols[5], line_no)?,
            head,
            deprel: cols[7].to_string(),
        });
    }
    finish(&mut pending, &mut sentences, &mut texts)?;

    let raw_text = if texts.iter().all(Option::is_some) && !texts.is_empty() {
        Some(texts.into_iter().flatten().collect::<Vec<_>>().join(" "))
    } else {
        None
    };
    Ok(AnnotatedTranscript {
        sentences,
        trees: None,
        embeddings: None,
        raw_text,
    })
}

/// Canonical `key=value|...` rendering of a feature map (`_` when empty).
pub fn feats_string(feats: &BTreeMap<String, String>) -> String {
    if feats.is_empty() {
        "_".to_string()
    } else {
        feats
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Writes the transcript as CoNLL-U. Unmodelled columns are emitted as `_`.
pub fn write_conllu(t: &AnnotatedTranscript) -> String {
    let mut out = String::new();
    for s in &t.sentences {
        for tok in &s.tokens {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t_\t{}\t{}\t{}\t_\t_\n",
                tok.id,
                tok.form,
                tok.lemma,
                tok.upos,
                feats_string(&tok.feats),
                tok.head,
                tok.deprel
            ));
        }
        out.push('\n');
    }
    out
}
