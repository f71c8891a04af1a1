//! LIME-style local surrogates: perturb around an instance, weight by an
//! exponential kernel, fit a weighted ridge regression to the model's
//! probabilities.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gbt::GbtModel;
use super::ModelError;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimeConfig {
    pub n_samples: usize,
    /// Probability that a feature is redrawn from its training marginal.
    pub resample_prob: f64,
    /// Kernel width as a multiple of sqrt(number of features).
    pub kernel_width_factor: f64,
    pub ridge_lambda: f64,
    pub seed: u64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        Self { n_samples: 1000, resample_prob: 0.5, kernel_width_factor: 0.75, ridge_lambda: 1.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimeExplanation {
    /// Coefficients on standardized features; 0 for excluded features.
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Zero-variance training features left out of the surrogate.
    pub excluded: Vec<bool>,
}

/// Column means and standard deviations (population) of the imputed
/// training matrix.
fn scaler(rows: &[Vec<f64>], d: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; d];
    let mut sd = vec![0.0; d];
    for j in 0..d {
        mean[j] = rows.iter().map(|r| r[j]).sum::<f64>() / n;
        sd[j] = (rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt();
    }
    (mean, sd)
}

/// Solves (XᵀWX + λI)β = XᵀWy after centring X and y by their weighted
/// means; the intercept is not penalized.
pub fn weighted_ridge(x: &DMatrix<f64>, y: &DVector<f64>, w: &DVector<f64>, lambda: f64) -> (DVector<f64>, f64) {
    let (n, d) = x.shape();
    let wsum = w.sum();
    let xm: Vec<f64> = (0..d).map(|j| (0..n).map(|i| w[i] * x[(i, j)]).sum::<f64>() / wsum).collect();
    let ym = (0..n).map(|i| w[i] * y[i]).sum::<f64>() / wsum;
    let xc = DMatrix::from_fn(n, d, |i, j| (x[(i, j)] - xm[j]) * w[i].sqrt());
    let yc = DVector::from_fn(n, |i, _| (y[i] - ym) * w[i].sqrt());
    let a = xc.transpose() * &xc + DMatrix::identity(d, d) * lambda;
    let b = xc.transpose() * yc;
    let beta = match a.clone().cholesky() {
        Some(c) => c.solve(&b),
        None => a.svd(true, true).solve(&b, 1e-12).expect("svd solve"),
    };
    let intercept = ym - (0..d).map(|j| beta[j] * xm[j]).sum::<f64>();
    (beta, intercept)
}

pub fn lime_explain(
    model: &GbtModel,
    x: &[f64],
    train: &FeatureMatrix,
    cfg: &LimeConfig,
) -> Result<LimeExplanation, ModelError> {
    let d = model.n_features();
    if x.len() != d || train.n_cols() != d {
        return Err(ModelError::Dimension { expected: d, found: x.len().max(train.n_cols()) });
    }
    if train.n_rows() == 0 {
        return Err(ModelError::Empty);
    }
    let x = model.impute_row(x);
    let rows: Vec<Vec<f64>> = train.rows.iter().map(|r| model.impute_row(r)).collect();
    let (mean, sd) = scaler(&rows, d);
    let excluded: Vec<bool> = sd.iter().map(|&s| s.is_nan() || s <= 0.0).collect();
    let active: Vec<usize> = (0..d).filter(|&j| !excluded[j]).collect();
    if active.is_empty() {
        return Ok(LimeExplanation { weights: vec![0.0; d], intercept: model.predict_proba(&x)?, excluded });
    }
    let sigma = cfg.kernel_width_factor * (active.len() as f64).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_samples.max(1);
    let mut design = DMatrix::zeros(n, active.len());
    let mut target = DVector::zeros(n);
    let mut weight = DVector::zeros(n);
    let mut z = x.clone();
    for s in 0..n {
        for j in 0..d {
            z[j] = if rng.random::<f64>() < cfg.resample_prob {
                rows[rng.random_range(0..rows.len())][j]
            } else {
                x[j]
            };
        }
        let mut dist2 = 0.0;
        for (c, &j) in active.iter().enumerate() {
            design[(s, c)] = (z[j] - mean[j]) / sd[j];
            dist2 += ((z[j] - x[j]) / sd[j]).powi(2);
        }
        weight[s] = (-dist2 / (sigma * sigma)).exp();
        target[s] = model.predict_proba(&z)?;
    }
    let (beta, intercept) = weighted_ridge(&design, &target, &weight, cfg.ridge_lambda);
    let mut weights = vec![0.0; d];
    for (c, &j) in active.iter().enumerate() {
        weights[j] = beta[c];
    }
    Ok(LimeExplanation { weights, intercept, excluded })
}

/// Mean |weight| per feature over all explanations, sorted descending;
/// features whose mean is zero are dropped.
pub fn aggregate_lime(names: &[String], explanations: &[LimeExplanation]) -> Vec<(String, f64)> {
    if explanations.is_empty() {
        return Vec::new();
    }
    let mut out: Vec<(String, f64)> = names
        .iter()
        .enumerate()
        .map(|(j, n)| {
            let m = explanations.iter().map(|e| e.weights[j].abs()).sum::<f64>() / explanations.len() as f64;
            (n.clone(), m)
        })
        .filter(|(_, m)| *m > 0.0)
        .collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}
