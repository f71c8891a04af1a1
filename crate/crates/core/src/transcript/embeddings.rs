//! JSON-Lines sentence-embedding sidecars: `{"index": i, "vector": [...]}`.

use std::path::Path;

use serde::Deserialize;

use super::TranscriptError;

#[derive(Deserialize)]
struct Line {
    index: usize,
    // Parsed leniently so that `NaN`-like values can be reported precisely.
    vector: Vec<serde_json::Value>,
}

/// Parses embedding lines; returns vectors ordered by `index` (0-based,
/// contiguous).
pub fn parse_embeddings(text: &str) -> Result<Vec<Vec<f64>>, TranscriptError> {
    let mut entries: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut dim: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let parsed: Line = serde_json::from_str(raw).map_err(|e| TranscriptError::Syntax {
            line: line_no,
            message: e.to_string(),
        })?;
        let mut v = Vec::with_capacity(parsed.vector.len());
        for c in &parsed.vector {
            match c.as_f64() {
                Some(x) if x.is_finite() => v.push(x),
                _ => return Err(TranscriptError::NonFinite { line: line_no }),
            }
        }
        match dim {
            None if v.is_empty() => {
                return Err(TranscriptError::DimensionMismatch {
                    line: line_no,
                    expected: 1,
                    found: 0,
                })
            }
            None => dim = Some(v.len()),
            Some(d) if d != v.len() => {
                return Err(TranscriptError::DimensionMismatch {
                    line: line_no,
                    expected: d,
                    found: v.len(),
                })
            }
            _ => {}
        }
        entries.push((parsed.index, v));
    }
    entries.sort_by_key(|(i, _)| *i);
    for (expected, (idx, _)) in entries.iter().enumerate() {
        if *idx != expected {
            return Err(TranscriptError::MissingIndex(expected));
        }
    }
    Ok(entries.into_iter().map(|(_, v)| v).collect())
}

pub fn load_embeddings(path: &Path) -> Result<Vec<Vec<f64>>, TranscriptError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| TranscriptError::Io(format!("{}: {e}", path.display())))?;
    parse_embeddings(&text)
}
