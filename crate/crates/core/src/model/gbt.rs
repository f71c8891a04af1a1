//! Newton-boosted regression trees with logistic loss and exact greedy
//! splits, in the XGBoost formulation.

use serde::{Deserialize, Serialize};

use super::{median, ModelError};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    /// Initial margin in log-odds.
    pub base_score: f64,
    /// Recorded with the model; exact greedy training draws no random numbers.
    pub seed: u64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: 4,
            learning_rate: 0.1,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            base_score: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    Split {
        feature: usize,
        /// Rows with `x < threshold` go left.
        threshold: f64,
        left: usize,
        right: usize,
        gain: f64,
        cover: f64,
    },
    Leaf {
        value: f64,
        cover: f64,
    },
}

impl Node {
    pub fn cover(&self) -> f64 {
        match self {
            Node::Split { cover, .. } | Node::Leaf { cover, .. } => *cover,
        }
    }
}

/// Arena-allocated tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    /// Raw leaf value reached by `x` (not scaled by the learning rate).
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value, .. } => return *value,
                Node::Split { feature, threshold, left, right, .. } => {
                    i = if x[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }

    pub fn splits(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { feature, threshold, gain, .. } => Some((*feature, *threshold, *gain)),
            Node::Leaf { .. } => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
    pub base_score: f64,
    pub learning_rate: f64,
    pub config: GbtConfig,
    /// Training medians substituted for missing inputs.
    pub impute: Vec<f64>,
    /// Columns that had missing values at training time.
    pub imputed_columns: Vec<bool>,
    pub manifest_hash: Option<String>,
}

pub const PROBA_EPS: f64 = 1e-15;

pub fn sigmoid(m: f64) -> f64 {
    1.0 / (1.0 + (-m).exp())
}

impl GbtModel {
    /// A model with no trees: margin = base_score everywhere.
    pub fn constant(feature_names: Vec<String>, base_score: f64) -> Self {
        let d = feature_names.len();
        Self {
            feature_names,
            trees: Vec::new(),
            base_score,
            learning_rate: 0.1,
            config: GbtConfig { base_score, ..GbtConfig::default() },
            impute: vec![0.0; d],
            imputed_columns: vec![false; d],
            manifest_hash: None,
        }
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn check(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.n_features() {
            return Err(ModelError::Dimension { expected: self.n_features(), found: x.len() });
        }
        Ok(())
    }

    /// Replaces NaN with the training median.
    pub fn impute_row(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.impute).map(|(v, m)| if v.is_nan() { *m } else { *v }).collect()
    }

    pub fn margin(&self, x: &[f64]) -> Result<f64, ModelError> {
        self.check(x)?;
        let x = self.impute_row(x);
        Ok(self.margin_imputed(&x))
    }

    pub(crate) fn margin_imputed(&self, x: &[f64]) -> f64 {
        self.base_score + self.learning_rate * self.trees.iter().map(|t| t.predict(x)).sum::<f64>()
    }

    /// Sigmoid of the margin, clamped to [1e-15, 1 − 1e-15].
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64, ModelError> {
        Ok(sigmoid(self.margin(x)?).clamp(PROBA_EPS, 1.0 - PROBA_EPS))
    }

    pub fn predict_matrix(&self, x: &FeatureMatrix) -> Result<Vec<f64>, ModelError> {
        x.rows.iter().map(|r| self.predict_proba(r)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, ModelError> {
        serde_json::from_str(s).map_err(|e| ModelError::Format(e.to_string()))
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    /// Row indices sorted by each feature.
    sorted: &'a [Vec<usize>],
    /// Feature indices in name order; earlier names win tied gains.
    visit: &'a [usize],
    g: &'a [f64],
    h: &'a [f64],
    cfg: &'a GbtConfig,
    in_node: Vec<bool>,
    nodes: Vec<Node>,
}

/// Relative gain difference below which two splits count as tied, so that
/// summation-order noise cannot make the choice depend on column order.
const TIE_TOLERANCE: f64 = 1e-12;

struct Candidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Builder<'_> {
    fn score(&self, g: f64, h: f64) -> f64 {
        g * g / (h + self.cfg.lambda)
    }

    fn best_split(&self, g_sum: f64, h_sum: f64) -> Option<Candidate> {
        let parent = self.score(g_sum, h_sum);
        let mut best: Option<Candidate> = None;
        for &j in self.visit {
            let order = &self.sorted[j];
            let (mut gl, mut hl) = (0.0, 0.0);
            let mut prev: Option<usize> = None;
            for &i in order.iter().filter(|&&i| self.in_node[i]) {
                if let Some(p) = prev {
                    let (a, b) = (self.x[p][j], self.x[i][j]);
                    if a < b {
                        let (gr, hr) = (g_sum - gl, h_sum - hl);
                        if hl >= self.cfg.min_child_weight && hr >= self.cfg.min_child_weight {
                            let gain = 0.5 * (self.score(gl, hl) + self.score(gr, hr) - parent) - self.cfg.gamma;
                            if gain > 0.0 && best.as_ref().is_none_or(|c| gain > c.gain * (1.0 + TIE_TOLERANCE)) {
                                let mut threshold = a + (b - a) / 2.0;
                                if threshold <= a {
                                    threshold = b;
                                }
                                best = Some(Candidate { feature: j, threshold, gain });
                            }
                        }
                    }
                }
                gl += self.g[i];
                hl += self.h[i];
                prev = Some(i);
            }
        }
        best
    }

    fn build(&mut self, rows: Vec<usize>, depth: usize) -> usize {
        let g_sum: f64 = rows.iter().map(|&i| self.g[i]).sum();
        let h_sum: f64 = rows.iter().map(|&i| self.h[i]).sum();
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { value: -g_sum / (h_sum + self.cfg.lambda), cover: h_sum });
        if depth >= self.cfg.max_depth || rows.len() < 2 {
            return id;
        }
        for &i in &rows {
            self.in_node[i] = true;
        }
        let split = self.best_split(g_sum, h_sum);
        for &i in &rows {
            self.in_node[i] = false;
        }
        let Some(c) = split else { return id };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| self.x[i][c.feature] < c.threshold);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: c.feature,
            threshold: c.threshold,
            left,
            right,
            gain: c.gain,
            cover: h_sum,
        };
        id
    }
}

fn validate(cfg: &GbtConfig) -> Result<(), ModelError> {
    let ok = cfg.learning_rate > 0.0
        && cfg.learning_rate.is_finite()
        && cfg.lambda >= 0.0
        && cfg.gamma >= 0.0
        && cfg.min_child_weight >= 0.0
        && cfg.base_score.is_finite();
    if ok {
        Ok(())
    } else {
        Err(ModelError::Config(format!("{cfg:?}")))
    }
}

/// Trains on all rows of `x`. Missing values are replaced by column
/// medians, which are stored in the model. Single-class labels are accepted
/// here (no split has positive gain); callers that need both classes check
/// for themselves.
pub fn train_gbt(x: &FeatureMatrix, cfg: &GbtConfig) -> Result<GbtModel, ModelError> {
    validate(cfg)?;
    if x.n_rows() == 0 {
        return Err(ModelError::Empty);
    }
    let d = x.n_cols();
    let mut impute = Vec::with_capacity(d);
    let mut imputed_columns = Vec::with_capacity(d);
    for j in 0..d {
        let col = x.column(j);
        let present: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
        impute.push(median(&present).unwrap_or(0.0));
        imputed_columns.push(present.len() < col.len());
    }
    let rows: Vec<Vec<f64>> = x
        .rows
        .iter()
        .map(|r| r.iter().zip(&impute).map(|(v, m)| if v.is_nan() { *m } else { *v }).collect())
        .collect();
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFinite);
    }
    let sorted: Vec<Vec<usize>> = (0..d)
        .map(|j| {
            let mut idx: Vec<usize> = (0..rows.len()).collect();
            idx.sort_by(|&a, &b| rows[a][j].total_cmp(&rows[b][j]).then(a.cmp(&b)));
            idx
        })
        .collect();
    let mut visit: Vec<usize> = (0..d).collect();
    visit.sort_by(|&a, &b| x.columns[a].cmp(&x.columns[b]));
    let y: Vec<f64> = x.labels.iter().map(|&l| l as f64).collect();
    let mut margin = vec![cfg.base_score; rows.len()];
    let mut trees = Vec::with_capacity(cfg.n_trees);
    for _ in 0..cfg.n_trees {
        let p: Vec<f64> = margin.iter().map(|&m| sigmoid(m)).collect();
        let g: Vec<f64> = p.iter().zip(&y).map(|(p, y)| p - y).collect();
        let h: Vec<f64> = p.iter().map(|p| p * (1.0 - p)).collect();
        let mut b = Builder {
            x: &rows,
            sorted: &sorted,
            visit: &visit,
            g: &g,
            h: &h,
            cfg,
            in_node: vec![false; rows.len()],
            nodes: Vec::new(),
        };
        b.build((0..rows.len()).collect(), 0);
        let tree = Tree { nodes: b.nodes };
        for (m, r) in margin.iter_mut().zip(&rows) {
            *m += cfg.learning_rate * tree.predict(r);
        }
        trees.push(tree);
    }
    Ok(GbtModel {
        feature_names: x.columns.clone(),
        trees,
        base_score: cfg.base_score,
        learning_rate: cfg.learning_rate,
        config: cfg.clone(),
        impute,
        imputed_columns,
        manifest_hash: None,
    })
}

/// Total split gain per feature, sorted descending (ties keep column order).
pub fn gain_importance(model: &GbtModel) -> Vec<(String, f64)> {
    let mut total = vec![0.0; model.n_features()];
    for t in &model.trees {
        for (f, _, gain) in t.splits() {
            total[f] += gain;
        }
    }
    let mut out: Vec<(String, f64)> = model.feature_names.iter().cloned().zip(total).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(n: usize) -> FeatureMatrix {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 - n as f64 / 2.0 + 0.5]).collect();
        let labels = rows.iter().map(|r| u8::from(r[0] > 0.0)).collect();
        FeatureMatrix::from_rows(vec!["x".into()], rows, labels).unwrap()
    }

    #[test]
    fn separable_data_is_learned() {
        let m = one_d(100);
        let model = train_gbt(&m, &GbtConfig { n_trees: 50, ..GbtConfig::default() }).unwrap();
        let p = model.predict_matrix(&m).unwrap();
        let acc = p.iter().zip(&m.labels).filter(|(p, &l)| u8::from(**p >= 0.5) == l).count();
        assert_eq!(acc, 100);
        let (f, thr, _) = model.trees[0].splits().next().unwrap();
        assert_eq!((f, thr), (0, 0.0));
    }

    #[test]
    fn single_class_never_splits() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * 7 % 5) as f64]).collect();
        let m = FeatureMatrix::from_rows(vec!["a".into(), "b".into()], rows, vec![1; 20]).unwrap();
        let model = train_gbt(&m, &GbtConfig::default()).unwrap();
        assert!(model.trees.iter().all(|t| t.nodes.len() == 1));
        let p = model.predict_matrix(&m).unwrap();
        assert!(p.iter().all(|&v| v == p[0] && v > 0.99 && v < 1.0));
    }

    #[test]
    fn proba_bounds() {
        let mut model = GbtModel::constant(vec!["x".into()], 0.0);
        assert_eq!(model.predict_proba(&[1.0]).unwrap(), 0.5);
        model.base_score = 1e6;
        assert_eq!(model.predict_proba(&[1.0]).unwrap(), 1.0 - PROBA_EPS);
        model.base_score = -1e6;
        assert_eq!(model.predict_proba(&[1.0]).unwrap(), PROBA_EPS);
        assert!(matches!(model.predict_proba(&[1.0, 2.0]), Err(ModelError::Dimension { .. })));
    }

    #[test]
    fn deterministic_serialization() {
        let m = one_d(40);
        let a = train_gbt(&m, &GbtConfig::default()).unwrap();
        let b = train_gbt(&m, &GbtConfig::default()).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = GbtModel::from_json(&a.to_json()).unwrap();
        for r in &m.rows {
            assert_eq!(back.predict_proba(r).unwrap(), a.predict_proba(r).unwrap());
        }
    }

    #[test]
    fn missing_values_use_training_median() {
        let rows = vec![vec![1.0], vec![f64::NAN], vec![3.0], vec![10.0]];
        let m = FeatureMatrix::from_rows(vec!["x".into()], rows, vec![0, 0, 1, 1]).unwrap();
        let model = train_gbt(&m, &GbtConfig::default()).unwrap();
        assert_eq!(model.impute, vec![3.0]);
        assert_eq!(model.imputed_columns, vec![true]);
        assert_eq!(model.margin(&[f64::NAN]).unwrap(), model.margin(&[3.0]).unwrap());
    }

    #[test]
    fn gain_importance_single_feature() {
        let mut m = one_d(30);
        m.columns.push("noise".into());
        for r in m.rows.iter_mut() {
            r.push(0.0);
        }
        let model = train_gbt(&m, &GbtConfig { n_trees: 5, max_depth: 1, ..GbtConfig::default() }).unwrap();
        let imp = gain_importance(&model);
        assert_eq!(imp[0].0, "x");
        assert!(imp[0].1 > 0.0);
        assert_eq!(imp[1], ("noise".to_string(), 0.0));
        let manual: f64 = model.trees.iter().flat_map(|t| t.splits()).map(|s| s.2).sum();
        assert_eq!(imp[0].1, manual);
    }
}
