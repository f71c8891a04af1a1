//! Gradient-boosted tree classification, subject-level cross-validation and
//! the explanation stack: gain importance, TreeSHAP, LIME, partial
//! dependence and feature-group ablation.

pub mod cv;
pub mod gbt;
pub mod lime;
pub mod metrics;
pub mod pdp;
pub mod shap;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::FeatureMatrix;

pub use cv::{cross_validate, CvConfig, CvResult, FoldResult};
pub use gbt::{gain_importance, train_gbt, GbtConfig, GbtModel, Node, Tree};
pub use lime::{aggregate_lime, lime_explain, LimeConfig, LimeExplanation};
pub use metrics::{auc, metrics, Metrics};
pub use pdp::{pdp, PdpCurve};
pub use shap::{tree_shap, Explanation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("expected {expected} features, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("class {class} has {found} subjects, fewer than k = {k}")]
    TooFewSubjects { class: u8, found: usize, k: usize },
    #[error("subject {0} has rows with different labels")]
    MixedSubjectLabels(String),
    #[error("{instrument:?} score {score} is outside {min}..={max}")]
    ScoreRange { instrument: Instrument, score: i64, min: i64, max: i64 },
    #[error("no rows")]
    Empty,
    #[error("non-finite feature value after imputation")]
    NonFinite,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("model format: {0}")]
    Format(String),
}

/// Median of the values; mean of the middle two for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// Subject → label, requiring every row of a subject to agree.
pub fn subject_labels(x: &FeatureMatrix) -> Result<BTreeMap<String, u8>, ModelError> {
    let mut out: BTreeMap<String, u8> = BTreeMap::new();
    for (s, &l) in x.subject_ids.iter().zip(&x.labels) {
        if *out.entry(s.clone()).or_insert(l) != l {
            return Err(ModelError::MixedSubjectLabels(s.clone()));
        }
    }
    Ok(out)
}

/// One row per subject holding the per-feature median of that subject's
/// rows (missing values ignored; all-missing stays missing). Rows are
/// ordered by subject id.
pub fn aggregate_subjects(x: &FeatureMatrix) -> Result<FeatureMatrix, ModelError> {
    let labels = subject_labels(x)?;
    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in x.subject_ids.iter().enumerate() {
        members.entry(s).or_default().push(i);
    }
    let mut rows = Vec::with_capacity(members.len());
    for idx in members.values() {
        let row = (0..x.n_cols())
            .map(|j| {
                let vals: Vec<f64> = idx.iter().map(|&i| x.rows[i][j]).filter(|v| !v.is_nan()).collect();
                median(&vals).unwrap_or(f64::NAN)
            })
            .collect();
        rows.push(row);
    }
    let ids: Vec<String> = members.keys().map(|s| s.to_string()).collect();
    let y = ids.iter().map(|s| labels[s]).collect();
    FeatureMatrix::new(x.columns.clone(), rows, ids.clone(), ids, y).map_err(|e| ModelError::Format(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Instrument {
    #[serde(rename = "PHQ9")]
    Phq9,
    #[serde(rename = "GAD7")]
    Gad7,
    #[serde(rename = "ASRS")]
    Asrs,
}

impl Instrument {
    /// Positive when the score is at or above this value.
    pub fn threshold(self) -> i64 {
        match self {
            Instrument::Phq9 => 15,
            Instrument::Gad7 => 10,
            Instrument::Asrs => 13,
        }
    }

    pub fn range(self) -> (i64, i64) {
        match self {
            Instrument::Phq9 => (0, 27),
            Instrument::Gad7 => (0, 21),
            // 18 items scored 0-4
            Instrument::Asrs => (0, 72),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().replace('-', "").as_str() {
            "PHQ9" => Some(Self::Phq9),
            "GAD7" => Some(Self::Gad7),
            "ASRS" => Some(Self::Asrs),
            _ => None,
        }
    }
}

pub fn binarize_labels(scores: &[i64], instrument: Instrument) -> Result<Vec<u8>, ModelError> {
    let (min, max) = instrument.range();
    scores
        .iter()
        .map(|&score| {
            if score < min || score > max {
                Err(ModelError::ScoreRange { instrument, score, min, max })
            } else {
                Ok(u8::from(score >= instrument.threshold()))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAblation {
    pub group: String,
    pub features: Vec<String>,
    /// Mean fold AUC per dataset, in input order.
    pub auc: Vec<Option<f64>>,
    /// Mean over datasets with a defined AUC.
    pub mean_auc: Option<f64>,
}

/// Cross-validates each feature group on its own columns, on every dataset.
/// Groups with no columns present in a dataset get `None` for it.
pub fn ablation(
    datasets: &[&FeatureMatrix],
    groups: &[(String, Vec<String>)],
    cfg: &CvConfig,
) -> Result<Vec<GroupAblation>, ModelError> {
    let mut out = Vec::with_capacity(groups.len());
    for (group, features) in groups {
        let mut aucs = Vec::with_capacity(datasets.len());
        for x in datasets {
            let idx: Vec<usize> = features.iter().filter_map(|f| x.column_index(f)).collect();
            if idx.is_empty() {
                aucs.push(None);
                continue;
            }
            aucs.push(cross_validate(&x.select_columns(&idx), cfg)?.mean_auc);
        }
        let defined: Vec<f64> = aucs.iter().flatten().copied().collect();
        out.push(GroupAblation {
            group: group.clone(),
            features: features.clone(),
            mean_auc: (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64),
            auc: aucs,
        });
    }
    Ok(out)
}
