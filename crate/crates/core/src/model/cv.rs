//! Subject-disjoint, label-stratified k-fold cross-validation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gbt::{train_gbt, GbtConfig};
use super::metrics::{auc, metrics};
use super::{subject_labels, ModelError};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvConfig {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub gbt: GbtConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self { k: 4, repeats: 1, seed: 0, gbt: GbtConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub repeat: usize,
    pub fold: usize,
    pub train_subjects: Vec<String>,
    pub test_subjects: Vec<String>,
    pub accuracy: f64,
    pub f1: f64,
    /// None when the test fold holds a single class.
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub folds: Vec<FoldResult>,
    /// Per repeat: subject → fold.
    pub assignments: Vec<BTreeMap<String, usize>>,
    pub mean_accuracy: f64,
    pub mean_f1: f64,
    /// Mean over folds with a defined AUC.
    pub mean_auc: Option<f64>,
    /// AUC of out-of-fold predictions pooled within each repeat, averaged
    /// over repeats.
    pub pooled_auc: Option<f64>,
}

impl CvResult {
    /// True when no fold shares a subject between train and test.
    pub fn is_subject_disjoint(&self) -> bool {
        self.folds.iter().all(|f| {
            let train: BTreeSet<&String> = f.train_subjects.iter().collect();
            f.test_subjects.iter().all(|s| !train.contains(s))
        })
    }
}

/// Shuffles each class's subjects with `rng` and deals them round-robin
/// over `k` folds, continuing the deal from one class to the next.
pub fn assign_folds(
    labels: &BTreeMap<String, u8>,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    let mut slot = 0;
    for class in [0u8, 1] {
        let mut subjects: Vec<&String> = labels.iter().filter(|(_, &l)| l == class).map(|(s, _)| s).collect();
        subjects.shuffle(rng);
        for s in subjects {
            out.insert(s.clone(), slot % k);
            slot += 1;
        }
    }
    out
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Every class needs at least `k` subjects, except in leave-one-subject-out
/// mode (`k` equal to the number of subjects).
pub fn cross_validate(x: &FeatureMatrix, cfg: &CvConfig) -> Result<CvResult, ModelError> {
    let labels = subject_labels(x)?;
    let n_subjects = labels.len();
    let counts = [0u8, 1].map(|c| labels.values().filter(|&&l| l == c).count());
    if counts.contains(&0) {
        return Err(ModelError::SingleClass);
    }
    if cfg.k < 2 || cfg.k > n_subjects {
        return Err(ModelError::Config(format!("k = {} with {n_subjects} subjects", cfg.k)));
    }
    if cfg.k != n_subjects {
        for (class, &n) in counts.iter().enumerate() {
            if n < cfg.k {
                return Err(ModelError::TooFewSubjects { class: class as u8, found: n, k: cfg.k });
            }
        }
    }

    let mut folds = Vec::new();
    let mut assignments = Vec::new();
    let mut pooled = Vec::new();
    for repeat in 0..cfg.repeats.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(repeat as u64));
        let assign = assign_folds(&labels, cfg.k, &mut rng);
        let mut oof = vec![f64::NAN; x.n_rows()];
        for fold in 0..cfg.k {
            let (test_idx, train_idx): (Vec<usize>, Vec<usize>) =
                (0..x.n_rows()).partition(|&i| assign[&x.subject_ids[i]] == fold);
            let train = x.select_rows(&train_idx);
            let test = x.select_rows(&test_idx);
            let model = train_gbt(&train, &cfg.gbt)?;
            let scores = model.predict_matrix(&test)?;
            for (&i, &s) in test_idx.iter().zip(&scores) {
                oof[i] = s;
            }
            let m = metrics(&test.labels, &scores);
            let subjects = |idx: &[usize]| -> Vec<String> {
                idx.iter().map(|&i| x.subject_ids[i].clone()).collect::<BTreeSet<_>>().into_iter().collect()
            };
            folds.push(FoldResult {
                repeat,
                fold,
                train_subjects: subjects(&train_idx),
                test_subjects: subjects(&test_idx),
                accuracy: m.accuracy,
                f1: m.f1,
                auc: m.auc,
            });
        }
        if let Some(a) = auc(&x.labels, &oof) {
            pooled.push(a);
        }
        assignments.push(assign);
    }
    let acc: Vec<f64> = folds.iter().map(|f| f.accuracy).collect();
    let f1: Vec<f64> = folds.iter().map(|f| f.f1).collect();
    let aucs: Vec<f64> = folds.iter().filter_map(|f| f.auc).collect();
    Ok(CvResult {
        k: cfg.k,
        repeats: cfg.repeats.max(1),
        seed: cfg.seed,
        mean_accuracy: mean(&acc).unwrap_or(0.0),
        mean_f1: mean(&f1).unwrap_or(0.0),
        mean_auc: mean(&aucs),
        pooled_auc: mean(&pooled),
        folds,
        assignments,
    })
}
