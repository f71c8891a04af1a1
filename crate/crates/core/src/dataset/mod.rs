//! Joins per-recording acoustic, linguistic and external features with
//! labels into the canonical feature matrix.

pub mod corpus;
pub mod external;
pub mod manifest;

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acoustic::AcousticFeatures;
use crate::linguistic::LinguisticFeatures;
use crate::matrix::{format_value, parse_value, FeatureMatrix};
use crate::model::{binarize_labels, Instrument, ModelError};

pub use corpus::{extract_corpus, CorpusConfig, CorpusExtraction};
pub use external::{ingest_external, parse_external, ExternalRecord};
pub use manifest::{FeatureGroup, FeatureManifest, ManifestEntry, Source};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("registry: {0}")]
    Registry(String),
    #[error("{id}: {field} = {value} is outside [0, 1]")]
    ProbabilityRange { id: String, field: &'static str, value: f64 },
    #[error("{id}: emotion probabilities sum to {sum}")]
    EmotionSum { id: String, sum: f64 },
    #[error("duplicate recording id {0}")]
    Duplicate(String),
    #[error("header: {0}")]
    Header(String),
    #[error("column {column} is not a {expected} feature")]
    UnknownColumn { column: String, expected: Source },
    #[error("recording {0} is labelled but has no features in any source")]
    OrphanLabel(String),
    #[error("{id}: {message}")]
    Extract { id: String, message: String },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Labels(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for DatasetError {
    fn from(e: std::io::Error) -> Self {
        DatasetError::Io(e.to_string())
    }
}

/// Feature values from one source, keyed by recording id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceTable {
    pub source: Source,
    pub columns: Vec<String>,
    pub rows: BTreeMap<String, Vec<f64>>,
}

const CONSTITUENCY: [&str; 2] = ["mean_constituency_depth", "max_constituency_depth"];

impl SourceTable {
    pub fn new(source: Source, columns: Vec<String>) -> Self {
        Self { source, columns, rows: BTreeMap::new() }
    }

    pub fn insert(&mut self, id: &str, values: Vec<f64>) -> Result<(), DatasetError> {
        if values.len() != self.columns.len() {
            return Err(DatasetError::Parse { line: 0, message: format!("{id}: {} values for {} columns", values.len(), self.columns.len()) });
        }
        if self.rows.insert(id.to_string(), values).is_some() {
            return Err(DatasetError::Duplicate(id.to_string()));
        }
        Ok(())
    }

    pub fn from_acoustic<'a>(items: impl IntoIterator<Item = (&'a str, &'a AcousticFeatures)>) -> Result<Self, DatasetError> {
        let mut t = Self::new(Source::Acoustic, crate::acoustic::FEATURE_NAMES.map(String::from).to_vec());
        for (id, f) in items {
            t.insert(id, f.named().iter().map(|(_, v)| *v).collect())?;
        }
        Ok(t)
    }

    /// Constituency depths become missing for transcripts without trees.
    pub fn from_linguistic<'a>(items: impl IntoIterator<Item = (&'a str, &'a LinguisticFeatures)>) -> Result<Self, DatasetError> {
        let mut t = Self::new(Source::Linguistic, crate::linguistic::FEATURE_NAMES.map(String::from).to_vec());
        for (id, f) in items {
            let values = f
                .named()
                .iter()
                .map(|(n, v)| if !f.has_trees && CONSTITUENCY.contains(n) { f64::NAN } else { *v })
                .collect();
            t.insert(id, values)?;
        }
        Ok(t)
    }

    pub fn from_external(records: &[ExternalRecord]) -> Result<Self, DatasetError> {
        let mut t = Self::new(Source::External, manifest::EXTERNAL_NAMES.map(String::from).to_vec());
        for r in records {
            t.insert(&r.recording_id, r.values().to_vec())?;
        }
        Ok(t)
    }

    /// CSV with a `recording_id` column followed by feature columns; alias
    /// names are mapped to canonical ones.
    pub fn read_csv<R: Read>(source: Source, reader: R, manifest: &FeatureManifest) -> Result<Self, DatasetError> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if header.first().map(String::as_str) != Some("recording_id") {
            return Err(DatasetError::Header("first column must be recording_id".into()));
        }
        let mut columns = Vec::new();
        for h in &header[1..] {
            match manifest.entry(h) {
                Some(e) if e.source == source => columns.push(e.name.clone()),
                _ => return Err(DatasetError::UnknownColumn { column: h.clone(), expected: source }),
            }
        }
        let mut t = Self::new(source, columns);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let values = rec
                .iter()
                .skip(1)
                .map(|s| parse_value(s).ok_or_else(|| DatasetError::Parse { line: i + 2, message: format!("bad number {s:?}") }))
                .collect::<Result<Vec<_>, _>>()?;
            t.insert(&rec[0], values)?;
        }
        Ok(t)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), DatasetError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["recording_id".to_string()];
        header.extend(self.columns.iter().cloned());
        out.write_record(&header)?;
        for (id, values) in &self.rows {
            let mut rec = vec![id.clone()];
            rec.extend(values.iter().map(|v| if v.is_nan() { String::new() } else { format_value(*v) }));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub recording_id: String,
    pub subject_id: String,
    pub label: u8,
}

/// Labels CSV with header `recording_id,subject_id,label` (binary) or
/// `recording_id,subject_id,score` (binarized with `instrument`).
pub fn parse_labels<R: Read>(reader: R, instrument: Option<Instrument>) -> Result<Vec<LabelRecord>, DatasetError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let scored = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["recording_id", "subject_id", "label"] => false,
        ["recording_id", "subject_id", "score"] => true,
        _ => return Err(DatasetError::Header("expected recording_id,subject_id,label|score".into())),
    };
    let instrument = match (scored, instrument) {
        (true, None) => return Err(DatasetError::Header("score labels need an instrument".into())),
        (_, i) => i,
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let bad = |m: String| DatasetError::Parse { line, message: m };
        let value = rec[2].trim();
        let label = if scored {
            let score: i64 = value.parse().map_err(|_| bad(format!("bad score {value:?}")))?;
            binarize_labels(&[score], instrument.expect("checked above"))?[0]
        } else {
            match value {
                "0" => 0,
                "1" => 1,
                _ => return Err(bad(format!("label {value:?} is not 0 or 1"))),
            }
        };
        if !seen.insert(rec[0].to_string()) {
            return Err(DatasetError::Duplicate(rec[0].to_string()));
        }
        out.push(LabelRecord { recording_id: rec[0].to_string(), subject_id: rec[1].to_string(), label });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completeness {
    pub recording_id: String,
    pub missing_sources: Vec<Source>,
    /// Columns that are missing, whether from an absent source or a value
    /// the source could not compute.
    pub missing_columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assembled {
    pub matrix: FeatureMatrix,
    pub completeness: Vec<Completeness>,
    pub manifest_hash: String,
}

impl Assembled {
    pub fn is_complete(&self) -> bool {
        self.completeness.iter().all(|c| c.missing_columns.is_empty())
    }
}

/// Builds the labelled matrix in manifest column order, rows sorted by
/// recording id. Recordings without labels are left out.
pub fn assemble(
    sources: &[SourceTable],
    labels: &[LabelRecord],
    manifest: &FeatureManifest,
) -> Result<Assembled, DatasetError> {
    manifest.check_registries()?;
    for t in sources {
        for c in &t.columns {
            if manifest.entry(c).map(|e| e.source) != Some(t.source) {
                return Err(DatasetError::UnknownColumn { column: c.clone(), expected: t.source });
            }
        }
    }
    // canonical column → (table, position)
    let mut locate: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for (ti, t) in sources.iter().enumerate() {
        for (ci, c) in t.columns.iter().enumerate() {
            locate.insert(manifest.resolve(c).expect("checked"), (ti, ci));
        }
    }

    let mut sorted: Vec<&LabelRecord> = labels.iter().collect();
    sorted.sort_by(|a, b| a.recording_id.cmp(&b.recording_id));
    let mut rows = Vec::with_capacity(sorted.len());
    let mut completeness = Vec::with_capacity(sorted.len());
    for rec in &sorted {
        let id = rec.recording_id.as_str();
        if !sources.iter().any(|t| t.rows.contains_key(id)) {
            return Err(DatasetError::OrphanLabel(id.to_string()));
        }
        let mut row = Vec::with_capacity(manifest.features.len());
        let mut missing_sources = BTreeSet::new();
        let mut missing_columns = Vec::new();
        for e in &manifest.features {
            let value = locate
                .get(e.name.as_str())
                .and_then(|&(ti, ci)| sources[ti].rows.get(id).map(|r| r[ci]));
            match value {
                Some(v) if !v.is_nan() => row.push(v),
                Some(_) => {
                    row.push(f64::NAN);
                    missing_columns.push(e.name.clone());
                }
                None => {
                    row.push(f64::NAN);
                    missing_sources.insert(e.source);
                    missing_columns.push(e.name.clone());
                }
            }
        }
        rows.push(row);
        completeness.push(Completeness {
            recording_id: id.to_string(),
            missing_sources: missing_sources.into_iter().collect(),
            missing_columns,
        });
    }
    let matrix = FeatureMatrix::new(
        manifest.names(),
        rows,
        sorted.iter().map(|r| r.recording_id.clone()).collect(),
        sorted.iter().map(|r| r.subject_id.clone()).collect(),
        sorted.iter().map(|r| r.label).collect(),
    )
    .map_err(|e| DatasetError::Manifest(e.to_string()))?;
    Ok(Assembled { matrix, completeness, manifest_hash: manifest.hash.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(ids: &[&str], trees: bool) -> Vec<SourceTable> {
        let acoustic = AcousticFeatures::default();
        let linguistic = LinguisticFeatures { has_trees: trees, ..LinguisticFeatures::default() };
        let external: Vec<ExternalRecord> = ids
            .iter()
            .map(|id| ExternalRecord {
                recording_id: id.to_string(),
                emotion_neu: 0.25,
                emotion_hap: 0.25,
                emotion_ang: 0.25,
                emotion_sad: 0.25,
                sarcasm_prob: 0.1,
            })
            .collect();
        vec![
            SourceTable::from_acoustic(ids.iter().map(|id| (*id, &acoustic))).unwrap(),
            SourceTable::from_linguistic(ids.iter().map(|id| (*id, &linguistic))).unwrap(),
            SourceTable::from_external(&external).unwrap(),
        ]
    }

    fn labels(ids: &[&str]) -> Vec<LabelRecord> {
        ids.iter()
            .enumerate()
            .map(|(i, id)| LabelRecord { recording_id: id.to_string(), subject_id: format!("s{i}"), label: (i % 2) as u8 })
            .collect()
    }

    #[test]
    fn complete_assembly() {
        let ids = ["r3", "r1", "r2"];
        let a = assemble(&tables(&ids, true), &labels(&ids), &FeatureManifest::builtin()).unwrap();
        assert_eq!((a.matrix.n_rows(), a.matrix.n_cols()), (3, 82));
        assert_eq!(a.matrix.missing_count(), 0);
        assert!(a.is_complete());
        assert_eq!(a.matrix.row_ids, vec!["r1", "r2", "r3"]);
    }

    #[test]
    fn missing_trees_mark_constituency() {
        let ids = ["a"];
        let a = assemble(&tables(&ids, false), &labels(&ids), &FeatureManifest::builtin()).unwrap();
        assert_eq!(a.completeness[0].missing_columns, CONSTITUENCY.map(String::from).to_vec());
        assert!(a.completeness[0].missing_sources.is_empty());
        assert_eq!(a.matrix.missing_count(), 2);
    }

    #[test]
    fn missing_source_and_orphans() {
        let ids = ["a", "b"];
        let mut t = tables(&ids, true);
        t[2].rows.remove("b");
        let a = assemble(&t, &labels(&ids), &FeatureManifest::builtin()).unwrap();
        assert_eq!(a.completeness[1].missing_sources, vec![Source::External]);
        assert_eq!(a.completeness[1].missing_columns.len(), 5);
        let mut l = labels(&ids);
        l.push(LabelRecord { recording_id: "ghost".into(), subject_id: "s9".into(), label: 0 });
        let err = assemble(&t, &l, &FeatureManifest::builtin()).unwrap_err();
        assert!(matches!(err, DatasetError::OrphanLabel(id) if id == "ghost"));
    }

    #[test]
    fn csv_round_trip_with_alias() {
        let m = FeatureManifest::builtin();
        let src = "recording_id,sentiment_positive,word_count\nx,0.5,12\n";
        let t = SourceTable::read_csv(Source::Linguistic, src.as_bytes(), &m).unwrap();
        assert_eq!(t.columns, vec!["vader_positive", "word_count"]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(SourceTable::read_csv(Source::Linguistic, buf.as_slice(), &m).unwrap(), t);
        let err = SourceTable::read_csv(Source::Acoustic, src.as_bytes(), &m).unwrap_err();
        assert!(matches!(err, DatasetError::UnknownColumn { .. }));
    }

    #[test]
    fn label_files() {
        let l = parse_labels("recording_id,subject_id,score\na,s1,15\nb,s2,3\n".as_bytes(), Some(Instrument::Phq9)).unwrap();
        assert_eq!(l.iter().map(|r| r.label).collect::<Vec<_>>(), vec![1, 0]);
        assert!(parse_labels("recording_id,subject_id,score\na,s1,15\n".as_bytes(), None).is_err());
        let l = parse_labels("recording_id,subject_id,label\na,s1,1\n".as_bytes(), None).unwrap();
        assert_eq!(l[0].label, 1);
    }
}
