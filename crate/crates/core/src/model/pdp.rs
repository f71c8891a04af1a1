//! One-feature partial dependence over a quantile grid.

use serde::{Deserialize, Serialize};

use super::gbt::GbtModel;
use super::ModelError;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpCurve {
    pub feature: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Linear-interpolation quantile of sorted data, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Evenly spaced quantiles of the observed (non-missing) values, with
/// repeated grid points collapsed.
pub fn quantile_grid(values: &[f64], size: usize) -> Vec<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() || size == 0 {
        return Vec::new();
    }
    v.sort_by(f64::total_cmp);
    let mut grid: Vec<f64> = if size == 1 {
        vec![quantile_sorted(&v, 0.5)]
    } else {
        (0..size).map(|k| quantile_sorted(&v, k as f64 / (size - 1) as f64)).collect()
    };
    grid.dedup();
    grid
}

pub fn pdp(model: &GbtModel, x: &FeatureMatrix, feature: usize, grid_size: usize) -> Result<PdpCurve, ModelError> {
    if feature >= model.n_features() || x.n_cols() != model.n_features() {
        return Err(ModelError::Dimension { expected: model.n_features(), found: x.n_cols().max(feature + 1) });
    }
    if x.n_rows() == 0 {
        return Err(ModelError::Empty);
    }
    let grid = quantile_grid(&x.column(feature), grid_size);
    let mut values = Vec::with_capacity(grid.len());
    for &g in &grid {
        let mut sum = 0.0;
        for r in &x.rows {
            let mut row = r.clone();
            row[feature] = g;
            sum += model.predict_proba(&row)?;
        }
        values.push(sum / x.n_rows() as f64);
    }
    Ok(PdpCurve { feature: model.feature_names[feature].clone(), grid, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::gbt::{Node, Tree};

    #[test]
    fn step_at_threshold_and_flat_elsewhere() {
        let mut m = GbtModel::constant(vec!["a".into(), "b".into()], 0.0);
        m.trees.push(Tree {
            nodes: vec![
                Node::Split { feature: 0, threshold: 9.5, left: 1, right: 2, gain: 1.0, cover: 2.0 },
                Node::Leaf { value: -5.0, cover: 1.0 },
                Node::Leaf { value: 5.0, cover: 1.0 },
            ],
        });
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i % 3) as f64]).collect();
        let x = FeatureMatrix::from_rows(vec!["a".into(), "b".into()], rows, vec![0; 20]).unwrap();
        let c = pdp(&m, &x, 0, 20).unwrap();
        assert_eq!(c.grid.len(), 20);
        for (g, v) in c.grid.iter().zip(&c.values) {
            let expected = if *g < 9.5 { c.values[0] } else { *c.values.last().unwrap() };
            assert_eq!(*v, expected);
        }
        let flat = pdp(&m, &x, 1, 20).unwrap();
        let (lo, hi) = flat.values.iter().fold((f64::MAX, f64::MIN), |(a, b), v| (a.min(*v), b.max(*v)));
        assert!(hi - lo <= 1e-9);
    }

    #[test]
    fn grid_quantiles() {
        assert_eq!(quantile_grid(&[3.0, 1.0, 2.0], 3), vec![1.0, 2.0, 3.0]);
        assert_eq!(quantile_grid(&[5.0, 5.0], 10), vec![5.0]);
    }
}
