//! Emotion and sarcasm probabilities computed upstream, one CSV row per
//! recording.

use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetError;

pub const EXTERNAL_HEADER: [&str; 6] =
    ["recording_id", "emotion_neu", "emotion_hap", "emotion_ang", "emotion_sad", "sarcasm_prob"];

/// Allowed deviation of the emotion probabilities' sum from 1.
pub const SUM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalRecord {
    pub recording_id: String,
    pub emotion_neu: f64,
    pub emotion_hap: f64,
    pub emotion_ang: f64,
    pub emotion_sad: f64,
    pub sarcasm_prob: f64,
}

impl ExternalRecord {
    pub fn values(&self) -> [f64; 5] {
        [self.emotion_neu, self.emotion_hap, self.emotion_ang, self.emotion_sad, self.sarcasm_prob]
    }

    /// Range-checks every probability and renormalizes the emotions when
    /// their sum is within tolerance of 1.
    pub fn validated(mut self) -> Result<Self, DatasetError> {
        for (field, v) in EXTERNAL_HEADER[1..].iter().zip(self.values()) {
            if !(0.0..=1.0).contains(&v) {
                return Err(DatasetError::ProbabilityRange { id: self.recording_id, field, value: v });
            }
        }
        let sum = self.emotion_neu + self.emotion_hap + self.emotion_ang + self.emotion_sad;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(DatasetError::EmotionSum { id: self.recording_id, sum });
        }
        if sum != 1.0 {
            self.emotion_neu /= sum;
            self.emotion_hap /= sum;
            self.emotion_ang /= sum;
            self.emotion_sad /= sum;
        }
        Ok(self)
    }
}

pub fn parse_external<R: Read>(reader: R) -> Result<Vec<ExternalRecord>, DatasetError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if header != EXTERNAL_HEADER {
        return Err(DatasetError::Header(format!("expected {}, found {}", EXTERNAL_HEADER.join(","), header.join(","))));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rec in rdr.deserialize::<ExternalRecord>() {
        let rec = rec?.validated()?;
        if !seen.insert(rec.recording_id.clone()) {
            return Err(DatasetError::Duplicate(rec.recording_id));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn ingest_external(path: &Path) -> Result<Vec<ExternalRecord>, DatasetError> {
    let f = std::fs::File::open(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
    parse_external(f)
}
