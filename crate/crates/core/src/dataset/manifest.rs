//! The canonical 82-feature manifest: names in column order, each with a
//! feature group and the module that produces it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::DatasetError;
use crate::{acoustic, linguistic};

pub const MANIFEST_JSON: &str = include_str!("../../data/manifest.json");
pub const MANIFEST_LEN: usize = 82;

/// Columns supplied by upstream neural models rather than computed here.
pub const EXTERNAL_NAMES: [&str; 5] = ["emotion_neu", "emotion_hap", "emotion_ang", "emotion_sad", "sarcasm_prob"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Prosodic,
    VoiceQuality,
    PsycholinguisticAcoustic,
    Lexical,
    Syntactic,
    Semantic,
    PsycholinguisticLinguistic,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 7] = [
        FeatureGroup::Prosodic,
        FeatureGroup::VoiceQuality,
        FeatureGroup::PsycholinguisticAcoustic,
        FeatureGroup::Lexical,
        FeatureGroup::Syntactic,
        FeatureGroup::Semantic,
        FeatureGroup::PsycholinguisticLinguistic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureGroup::Prosodic => "prosodic",
            FeatureGroup::VoiceQuality => "voice_quality",
            FeatureGroup::PsycholinguisticAcoustic => "psycholinguistic_acoustic",
            FeatureGroup::Lexical => "lexical",
            FeatureGroup::Syntactic => "syntactic",
            FeatureGroup::Semantic => "semantic",
            FeatureGroup::PsycholinguisticLinguistic => "psycholinguistic_linguistic",
        }
    }
}

impl fmt::Display for FeatureGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Acoustic,
    Linguistic,
    External,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Acoustic => "acoustic",
            Source::Linguistic => "linguistic",
            Source::External => "external",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub group: FeatureGroup,
    pub source: Source,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureManifest {
    pub version: String,
    /// Alternative spellings accepted on input.
    #[serde(default)]
    pub aliases: BTreeMap<String, String>,
    pub features: Vec<ManifestEntry>,
    /// sha256 of the manifest file bytes.
    #[serde(skip)]
    pub hash: String,
}

impl FeatureManifest {
    /// The manifest shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(MANIFEST_JSON).expect("bundled manifest is valid")
    }

    pub fn load(path: &Path) -> Result<Self, DatasetError> {
        let text = std::fs::read_to_string(path).map_err(|e| DatasetError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, DatasetError> {
        let mut m: FeatureManifest =
            serde_json::from_str(text).map_err(|e| DatasetError::Manifest(e.to_string()))?;
        m.hash = hex::encode(Sha256::digest(text.as_bytes()));
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), DatasetError> {
        if self.features.len() != MANIFEST_LEN {
            return Err(DatasetError::Manifest(format!("{} entries, expected {MANIFEST_LEN}", self.features.len())));
        }
        let mut names = BTreeSet::new();
        for e in &self.features {
            if !names.insert(e.name.as_str()) {
                return Err(DatasetError::Manifest(format!("duplicate feature {}", e.name)));
            }
        }
        let groups: BTreeSet<FeatureGroup> = self.features.iter().map(|e| e.group).collect();
        if groups.len() != FeatureGroup::ALL.len() {
            return Err(DatasetError::Manifest("not every feature group is used".into()));
        }
        for (alias, target) in &self.aliases {
            if !names.contains(target.as_str()) || names.contains(alias.as_str()) {
                return Err(DatasetError::Manifest(format!("bad alias {alias} -> {target}")));
            }
        }
        Ok(())
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|e| e.name.clone()).collect()
    }

    pub fn entry(&self, name: &str) -> Option<&ManifestEntry> {
        let name = self.aliases.get(name).map(String::as_str).unwrap_or(name);
        self.features.iter().find(|e| e.name == name)
    }

    /// Canonical name for `name`, following aliases.
    pub fn resolve<'a>(&'a self, name: &'a str) -> Option<&'a str> {
        self.entry(name).map(|e| e.name.as_str())
    }

    /// Feature names per group, groups in canonical order.
    pub fn groups(&self) -> Vec<(String, Vec<String>)> {
        FeatureGroup::ALL
            .iter()
            .map(|g| {
                let names = self.features.iter().filter(|e| e.group == *g).map(|e| e.name.clone()).collect();
                (g.to_string(), names)
            })
            .collect()
    }

    pub fn names_for(&self, source: Source) -> Vec<String> {
        self.features.iter().filter(|e| e.source == source).map(|e| e.name.clone()).collect()
    }

    /// Checks that every manifest name is produced by exactly one module
    /// registry, the one its `source` tag names, and that no registry
    /// produces a name outside the manifest.
    pub fn check_registries(&self) -> Result<(), DatasetError> {
        let registries: [(Source, &[&str]); 3] = [
            (Source::Acoustic, &acoustic::FEATURE_NAMES),
            (Source::Linguistic, &linguistic::FEATURE_NAMES),
            (Source::External, &EXTERNAL_NAMES),
        ];
        for e in &self.features {
            let producers: Vec<Source> =
                registries.iter().filter(|(_, names)| names.contains(&e.name.as_str())).map(|(s, _)| *s).collect();
            if producers != [e.source] {
                return Err(DatasetError::Registry(format!("{} is produced by {producers:?}, manifest says {}", e.name, e.source)));
            }
        }
        for (source, names) in registries {
            for n in names {
                if self.entry(n).is_none() {
                    return Err(DatasetError::Registry(format!("{source} produces {n}, which is not in the manifest")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_is_consistent() {
        let m = FeatureManifest::builtin();
        assert_eq!(m.features.len(), 82);
        assert_eq!(m.hash.len(), 64);
        m.check_registries().unwrap();
        let sizes: Vec<usize> = m.groups().iter().map(|(_, v)| v.len()).collect();
        assert_eq!(sizes, vec![17, 5, 4, 18, 29, 4, 5]);
        assert_eq!(m.resolve("sentiment_positive"), Some("vader_positive"));
        assert_eq!(m.entry("filler_count").unwrap().group, FeatureGroup::VoiceQuality);
    }

    #[test]
    fn rejects_short_manifest() {
        let text = r#"{"version": "x", "features": [{"name": "ZCR", "group": "prosodic", "source": "acoustic"}]}"#;
        assert!(matches!(FeatureManifest::parse(text), Err(DatasetError::Manifest(_))));
    }

    #[test]
    fn registry_mismatch_detected() {
        let mut m = FeatureManifest::builtin();
        m.features[0].source = Source::Linguistic;
        assert!(matches!(m.check_registries(), Err(DatasetError::Registry(_))));
    }
}
