//! Two-group inference: Welch t-tests, Benjamini-Hochberg adjustment and
//! Pearson correlation matrices.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use thiserror::Error;

use crate::matrix::FeatureMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("p-value {value} at position {index} is outside [0, 1]")]
    PValueRange { index: usize, value: f64 },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("significance level {0} is outside (0, 1)")]
    Alpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    /// Fewer than two values in a group, or zero variance in both.
    pub degenerate: bool,
}

impl WelchResult {
    fn degenerate() -> Self {
        Self { t: 0.0, df: 0.0, p: 1.0, degenerate: true }
    }
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, v)
}

/// Two-sided p-value of Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}

/// Welch's unequal-variance t-test with Welch-Satterthwaite df. The
/// statistic is mean(a) − mean(b) over its standard error.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> WelchResult {
    if a.len() < 2 || b.len() < 2 {
        return WelchResult::degenerate();
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 <= 0.0 || !se2.is_finite() {
        return WelchResult::degenerate();
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / (sa * sa / (a.len() - 1) as f64 + sb * sb / (b.len() - 1) as f64);
    WelchResult { t, df, p: student_t_two_sided(t, df), degenerate: false }
}

/// Benjamini-Hochberg step-up adjustment, returned in input order.
pub fn bh_fdr(p: &[f64]) -> Result<Vec<f64>, StatsError> {
    for (index, &value) in p.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(StatsError::PValueRange { index, value });
        }
    }
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p[i].total_cmp(&p[j]).then(i.cmp(&j)));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for rank in (0..m).rev() {
        let i = order[rank];
        running = running.min(p[i] * m as f64 / (rank + 1) as f64);
        // p·m/k can round below p when k = m
        adjusted[i] = running.min(1.0).max(p[i]);
    }
    Ok(adjusted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupComparison {
    pub feature: String,
    /// Mean of the label-0 group.
    pub mean_a: f64,
    /// Mean of the label-1 group.
    pub mean_b: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub t_stat: f64,
    pub df: f64,
    pub p_raw: f64,
    pub p_adj: f64,
    pub significant: bool,
    pub degenerate: bool,
}

fn zscore(col: &[f64]) -> Vec<f64> {
    let present: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
    if present.len() < 2 {
        return col.to_vec();
    }
    let (m, v) = mean_var(&present);
    let sd = v.sqrt();
    col.iter().map(|x| if sd > 0.0 { (x - m) / sd } else { x - m }).collect()
}

fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        f64::NAN
    } else {
        x.iter().sum::<f64>() / x.len() as f64
    }
}

/// One Welch test per column between label 0 (`a`) and label 1 (`b`),
/// BH-adjusted jointly, sorted by raw p then feature name. Missing values
/// are dropped per feature. With `standardize`, each column is z-scored
/// over all rows first.
pub fn compare_groups(x: &FeatureMatrix, alpha: f64, standardize: bool) -> Result<Vec<GroupComparison>, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::Alpha(alpha));
    }
    if !(x.labels.contains(&0) && x.labels.contains(&1)) {
        return Err(StatsError::SingleClass);
    }
    let mut rows = Vec::with_capacity(x.n_cols());
    for j in 0..x.n_cols() {
        let mut col = x.column(j);
        if standardize {
            col = zscore(&col);
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (v, &l) in col.iter().zip(&x.labels) {
            if v.is_nan() {
                continue;
            }
            if l == 0 {
                a.push(*v)
            } else {
                b.push(*v)
            }
        }
        let w = welch_t_test(&a, &b);
        rows.push(GroupComparison {
            feature: x.columns[j].clone(),
            mean_a: mean(&a),
            mean_b: mean(&b),
            n_a: a.len(),
            n_b: b.len(),
            t_stat: w.t,
            df: w.df,
            p_raw: w.p,
            p_adj: 0.0,
            significant: false,
            degenerate: w.degenerate,
        });
    }
    let p: Vec<f64> = rows.iter().map(|r| r.p_raw).collect();
    for (r, q) in rows.iter_mut().zip(bh_fdr(&p)?) {
        r.p_adj = q;
        r.significant = q < alpha;
    }
    rows.sort_by(|a, b| a.p_raw.total_cmp(&b.p_raw).then_with(|| a.feature.cmp(&b.feature)));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub features: Vec<String>,
    pub r: Vec<Vec<f64>>,
    /// Constant (or all-missing) columns; their off-diagonal r is 0.
    pub degenerate: Vec<bool>,
}

/// Pearson r over pairwise-complete rows.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = x.iter().zip(y).filter(|(a, b)| !a.is_nan() && !b.is_nan()).map(|(a, b)| (*a, *b)).collect();
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn correlation_matrix(x: &FeatureMatrix) -> CorrelationMatrix {
    let d = x.n_cols();
    let cols: Vec<Vec<f64>> = (0..d).map(|j| x.column(j)).collect();
    let degenerate: Vec<bool> = cols.iter().map(|c| pearson(c, c).is_none()).collect();
    let mut r = vec![vec![0.0; d]; d];
    for i in 0..d {
        r[i][i] = 1.0;
        for j in i + 1..d {
            let v = if degenerate[i] || degenerate[j] { 0.0 } else { pearson(&cols[i], &cols[j]).unwrap_or(0.0) };
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    CorrelationMatrix { features: x.columns.clone(), r, degenerate }
}
