//! Pipeline configuration: a TOML file with one table per stage.
//!
//! | key                        | default          |
//! |----------------------------|------------------|
//! | `run.seed`                 | 0                |
//! | `run.output`               | `voicemark-out`  |
//! | `run.timestamp`            | `SOURCE_DATE_EPOCH`, else the clock |
//! | `run.aggregate_subjects`   | true             |
//! | `inputs.*`                 | unset            |
//! | `extract.acoustic.*`       | acoustic defaults |
//! | `extract.mattr_window`     | 50               |
//! | `extract.lexicon`          | bundled sample lexicon |
//! | `stats.enabled`            | true             |
//! | `stats.alpha`              | 0.05             |
//! | `stats.standardize`        | false            |
//! | `stats.correlations`       | true             |
//! | `cv.enabled`               | true             |
//! | `cv.k`                     | 4                |
//! | `cv.repeats`               | 1                |
//! | `gbt.*`                    | 200 trees, depth 4, η 0.1, λ 1, γ 0, min child weight 1 |
//! | `train.enabled`            | true             |
//! | `explain.shap`             | true             |
//! | `explain.lime`             | true             |
//! | `explain.lime_samples`     | 1000             |
//! | `explain.lime_instances`   | 0 (all rows)     |
//! | `explain.pdp`              | true             |
//! | `explain.pdp_top`          | 5                |
//! | `explain.pdp_grid`         | 20               |
//! | `ablate.enabled`           | true             |
//! | `histograms.enabled`       | true             |
//! | `histograms.bins`          | 40               |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ReportError;
use crate::acoustic::AcousticConfig;
use crate::model::{GbtConfig, Instrument};

pub const SEED_ENV: &str = "VOICEMARK_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub output: PathBuf,
    /// Unix seconds recorded in the run manifest.
    pub timestamp: Option<u64>,
    /// Collapse recordings to per-subject medians before analysis.
    pub aggregate_subjects: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seed: 0, output: PathBuf::from("voicemark-out"), timestamp: None, aggregate_subjects: true }
    }
}

/// Either a corpus directory, an assembled matrix, or per-source tables
/// plus labels.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub corpus: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub acoustic: Option<PathBuf>,
    pub linguistic: Option<PathBuf>,
    pub external: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub instrument: Option<Instrument>,
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractSection {
    pub acoustic: AcousticConfig,
    pub mattr_window: usize,
    pub lexicon: Option<PathBuf>,
}

impl Default for ExtractSection {
    fn default() -> Self {
        Self { acoustic: AcousticConfig::default(), mattr_window: 50, lexicon: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSection {
    pub enabled: bool,
    pub alpha: f64,
    pub standardize: bool,
    pub correlations: bool,
}

impl Default for StatsSection {
    fn default() -> Self {
        Self { enabled: true, alpha: 0.05, standardize: false, correlations: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSection {
    pub enabled: bool,
    pub k: usize,
    pub repeats: usize,
}

impl Default for CvSection {
    fn default() -> Self {
        Self { enabled: true, k: 4, repeats: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Toggle {
    pub enabled: bool,
}

impl Default for Toggle {
    fn default() -> Self {
        Self { enabled: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainSection {
    pub shap: bool,
    pub lime: bool,
    pub lime_samples: usize,
    pub lime_instances: usize,
    pub pdp: bool,
    pub pdp_top: usize,
    pub pdp_grid: usize,
}

impl Default for ExplainSection {
    fn default() -> Self {
        Self { shap: true, lime: true, lime_samples: 1000, lime_instances: 0, pdp: true, pdp_top: 5, pdp_grid: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistogramSection {
    pub enabled: bool,
    pub bins: usize,
}

impl Default for HistogramSection {
    fn default() -> Self {
        Self { enabled: true, bins: 40 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub run: RunSection,
    pub inputs: InputSection,
    pub extract: ExtractSection,
    pub stats: StatsSection,
    pub cv: CvSection,
    pub gbt: GbtConfig,
    pub train: Toggle,
    pub explain: ExplainSection,
    pub ablate: Toggle,
    pub histograms: HistogramSection,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, ReportError> {
        toml::from_str(text).map_err(|e| ReportError::Config(e.to_string()))
    }

    /// Reads a config file; relative input and output paths are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, ReportError> {
        let text = std::fs::read_to_string(path).map_err(|e| ReportError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.run.output);
        let i = &mut self.inputs;
        for p in [&mut i.corpus, &mut i.matrix, &mut i.acoustic, &mut i.linguistic, &mut i.external, &mut i.labels, &mut i.manifest]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        if let Some(p) = &mut self.extract.lexicon {
            fix(p);
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Applies a `VOICEMARK_SEED` value, if any, over `run.seed`.
    pub fn with_seed_override(mut self, value: Option<&str>) -> Result<Self, ReportError> {
        if let Some(v) = value {
            self.run.seed = v.trim().parse().map_err(|_| ReportError::Config(format!("{SEED_ENV}={v:?} is not a u64")))?;
        }
        Ok(self)
    }

    pub fn with_env_seed(self) -> Result<Self, ReportError> {
        let v = std::env::var(SEED_ENV).ok();
        self.with_seed_override(v.as_deref())
    }

    pub fn validate(&self) -> Result<(), ReportError> {
        let bad = |m: String| Err(ReportError::Config(m));
        if !(self.stats.alpha > 0.0 && self.stats.alpha < 1.0) {
            return bad(format!("stats.alpha = {} is outside (0, 1)", self.stats.alpha));
        }
        if self.histograms.bins == 0 {
            return bad("histograms.bins must be positive".into());
        }
        if self.explain.pdp_grid < 2 {
            return bad("explain.pdp_grid must be at least 2".into());
        }
        let i = &self.inputs;
        let tables = i.acoustic.is_some() || i.linguistic.is_some() || i.external.is_some();
        let modes = usize::from(i.corpus.is_some()) + usize::from(i.matrix.is_some()) + usize::from(tables);
        if modes != 1 {
            return bad("set exactly one of inputs.corpus, inputs.matrix, or per-source tables".into());
        }
        if tables && i.labels.is_none() {
            return bad("per-source tables need inputs.labels".into());
        }
        Ok(())
    }
}
