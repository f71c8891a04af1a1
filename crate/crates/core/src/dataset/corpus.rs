//! Feature extraction over a corpus directory:
//!
//! ```text
//! labels.csv                  recording_id,subject_id,label|score
//! external.csv                optional emotion/sarcasm probabilities
//! audio/<id>.wav
//! transcripts/<id>.conllu     with optional <id>.trees and <id>.emb.jsonl
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{external, parse_labels, DatasetError, LabelRecord, SourceTable};
use crate::acoustic::{extract_acoustic_with, AcousticConfig, AcousticFeatures};
use crate::audio::decode_wav;
use crate::linguistic::{extract_linguistic, LinguisticConfig, LinguisticFeatures};
use crate::model::Instrument;
use crate::transcript::ingest;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub acoustic: AcousticConfig,
    #[serde(skip)]
    pub linguistic: LinguisticConfig,
    pub instrument: Option<Instrument>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusExtraction {
    pub sources: Vec<SourceTable>,
    pub labels: Vec<LabelRecord>,
    /// Every file read, in a stable order, for digesting.
    pub inputs: Vec<PathBuf>,
}

fn stems(dir: &Path, ext: &str) -> Result<BTreeSet<String>, DatasetError> {
    if !dir.is_dir() {
        return Ok(BTreeSet::new());
    }
    let mut out = BTreeSet::new();
    for e in fs::read_dir(dir)? {
        let name = e?.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(ext) {
            out.insert(stem.to_string());
        }
    }
    Ok(out)
}

fn existing(p: PathBuf) -> Option<PathBuf> {
    p.is_file().then_some(p)
}

pub fn extract_corpus(dir: &Path, cfg: &CorpusConfig) -> Result<CorpusExtraction, DatasetError> {
    let mut inputs = Vec::new();
    let labels_path = dir.join("labels.csv");
    let labels = parse_labels(fs::File::open(&labels_path)?, cfg.instrument)?;
    inputs.push(labels_path);

    let audio_dir = dir.join("audio");
    let mut acoustic: Vec<(String, AcousticFeatures)> = Vec::new();
    for id in stems(&audio_dir, ".wav")? {
        let path = audio_dir.join(format!("{id}.wav"));
        let buf = decode_wav(&fs::read(&path)?).map_err(|e| DatasetError::Extract { id: id.clone(), message: e.to_string() })?;
        acoustic.push((id, extract_acoustic_with(&buf, &cfg.acoustic)));
        inputs.push(path);
    }

    let tdir = dir.join("transcripts");
    let mut linguistic: Vec<(String, LinguisticFeatures)> = Vec::new();
    for id in stems(&tdir, ".conllu")? {
        let conllu = tdir.join(format!("{id}.conllu"));
        let trees = existing(tdir.join(format!("{id}.trees")));
        let emb = existing(tdir.join(format!("{id}.emb.jsonl")));
        let t = ingest(&conllu, trees.as_deref(), emb.as_deref())
            .map_err(|e| DatasetError::Extract { id: id.clone(), message: e.to_string() })?;
        let f = extract_linguistic(&t, &cfg.linguistic).map_err(|e| DatasetError::Extract { id: id.clone(), message: e.to_string() })?;
        linguistic.push((id, f));
        inputs.push(conllu);
        inputs.extend(trees);
        inputs.extend(emb);
    }

    let mut sources = vec![
        SourceTable::from_acoustic(acoustic.iter().map(|(id, f)| (id.as_str(), f)))?,
        SourceTable::from_linguistic(linguistic.iter().map(|(id, f)| (id.as_str(), f)))?,
    ];
    let ext_path = dir.join("external.csv");
    if ext_path.is_file() {
        sources.push(SourceTable::from_external(&external::ingest_external(&ext_path)?)?);
        inputs.push(ext_path);
    }
    Ok(CorpusExtraction { sources, labels, inputs })
}
