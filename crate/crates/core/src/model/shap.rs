//! Exact path-dependent TreeSHAP (Lundberg et al., Algorithm 2).

use serde::{Deserialize, Serialize};

use super::gbt::{GbtModel, Node, Tree};
use super::ModelError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub phi: Vec<f64>,
    /// Expected margin under the training cover distribution.
    pub base_value: f64,
    /// The margin being explained.
    pub target: f64,
}

impl Explanation {
    /// |base + Σφ − target|.
    pub fn additivity_error(&self) -> f64 {
        (self.base_value + self.phi.iter().sum::<f64>() - self.target).abs()
    }
}

#[derive(Debug, Clone, Copy)]
struct PathElement {
    feature: Option<usize>,
    zero: f64,
    one: f64,
    weight: f64,
}

fn extend(path: &mut Vec<PathElement>, zero: f64, one: f64, feature: Option<usize>) {
    let depth = path.len();
    path.push(PathElement { feature, zero, one, weight: if depth == 0 { 1.0 } else { 0.0 } });
    let denom = (depth + 1) as f64;
    for i in (0..depth).rev() {
        path[i + 1].weight += one * path[i].weight * (i + 1) as f64 / denom;
        path[i].weight = zero * path[i].weight * (depth - i) as f64 / denom;
    }
}

fn unwind(path: &mut Vec<PathElement>, index: usize) {
    let depth = path.len() - 1;
    let PathElement { one, zero, .. } = path[index];
    let denom = (depth + 1) as f64;
    let mut next = path[depth].weight;
    for i in (0..depth).rev() {
        if one != 0.0 {
            let tmp = path[i].weight;
            path[i].weight = next * denom / ((i + 1) as f64 * one);
            next = tmp - path[i].weight * zero * (depth - i) as f64 / denom;
        } else {
            path[i].weight = path[i].weight * denom / (zero * (depth - i) as f64);
        }
    }
    for i in index..depth {
        path[i].feature = path[i + 1].feature;
        path[i].zero = path[i + 1].zero;
        path[i].one = path[i + 1].one;
    }
    path.pop();
}

fn unwound_sum(path: &[PathElement], index: usize) -> f64 {
    let depth = path.len() - 1;
    let PathElement { one, zero, .. } = path[index];
    let denom = (depth + 1) as f64;
    let mut next = path[depth].weight;
    let mut total = 0.0;
    for i in (0..depth).rev() {
        if one != 0.0 {
            let tmp = next * denom / ((i + 1) as f64 * one);
            total += tmp;
            next = path[i].weight - tmp * zero * (depth - i) as f64 / denom;
        } else if zero != 0.0 {
            total += path[i].weight / zero / ((depth - i) as f64 / denom);
        }
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    tree: &Tree,
    x: &[f64],
    node: usize,
    mut path: Vec<PathElement>,
    zero: f64,
    one: f64,
    feature: Option<usize>,
    phi: &mut [f64],
) {
    extend(&mut path, zero, one, feature);
    match &tree.nodes[node] {
        Node::Leaf { value, .. } => {
            for i in 1..path.len() {
                let w = unwound_sum(&path, i);
                let el = path[i];
                phi[el.feature.expect("non-root element")] += w * (el.one - el.zero) * value;
            }
        }
        Node::Split { feature: f, threshold, left, right, cover, .. } => {
            let (hot, cold) = if x[*f] < *threshold { (*left, *right) } else { (*right, *left) };
            let hot_zero = tree.nodes[hot].cover() / cover;
            let cold_zero = tree.nodes[cold].cover() / cover;
            let (mut in_zero, mut in_one) = (1.0, 1.0);
            if let Some(k) = path.iter().position(|e| e.feature == Some(*f)) {
                in_zero = path[k].zero;
                in_one = path[k].one;
                unwind(&mut path, k);
            }
            recurse(tree, x, hot, path.clone(), hot_zero * in_zero, in_one, Some(*f), phi);
            recurse(tree, x, cold, path, cold_zero * in_zero, 0.0, Some(*f), phi);
        }
    }
}

/// Cover-weighted mean leaf value: the tree's expectation with no feature known.
pub fn expected_value(tree: &Tree) -> f64 {
    fn go(t: &Tree, i: usize) -> f64 {
        match &t.nodes[i] {
            Node::Leaf { value, .. } => *value,
            Node::Split { left, right, cover, .. } => {
                let (l, r) = (&t.nodes[*left], &t.nodes[*right]);
                (l.cover() * go(t, *left) + r.cover() * go(t, *right)) / cover
            }
        }
    }
    go(tree, 0)
}

/// Adds one tree's (unscaled) attributions for `x` into `phi`.
pub fn tree_contributions(tree: &Tree, x: &[f64], phi: &mut [f64]) {
    recurse(tree, x, 0, Vec::with_capacity(8), 1.0, 1.0, None, phi);
}

/// Margin-space Shapley values of the ensemble at `x` (missing values are
/// imputed as in prediction).
pub fn tree_shap(model: &GbtModel, x: &[f64]) -> Result<Explanation, ModelError> {
    let target = model.margin(x)?;
    let x = model.impute_row(x);
    let mut raw = vec![0.0; model.n_features()];
    let mut expected = 0.0;
    for t in &model.trees {
        tree_contributions(t, &x, &mut raw);
        expected += expected_value(t);
    }
    Ok(Explanation {
        phi: raw.iter().map(|v| v * model.learning_rate).collect(),
        base_value: model.base_score + model.learning_rate * expected,
        target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump(feature: usize) -> Tree {
        Tree {
            nodes: vec![
                Node::Split { feature, threshold: 0.0, left: 1, right: 2, gain: 1.0, cover: 2.0 },
                Node::Leaf { value: -1.0, cover: 1.0 },
                Node::Leaf { value: 1.0, cover: 1.0 },
            ],
        }
    }

    #[test]
    fn stump_attribution() {
        let mut phi = vec![0.0; 3];
        tree_contributions(&stump(1), &[0.0, 5.0, 0.0], &mut phi);
        assert_eq!(phi, vec![0.0, 1.0, 0.0]);
        assert_eq!(expected_value(&stump(1)), 0.0);
    }

    #[test]
    fn empty_model() {
        let m = GbtModel::constant(vec!["a".into(), "b".into()], 0.3);
        let e = tree_shap(&m, &[1.0, 2.0]).unwrap();
        assert_eq!(e.phi, vec![0.0, 0.0]);
        assert_eq!(e.base_value, 0.3);
        assert_eq!(e.target, 0.3);
    }

    #[test]
    fn repeated_feature_on_path() {
        // x0 split twice along the same path
        let t = Tree {
            nodes: vec![
                Node::Split { feature: 0, threshold: 0.0, left: 1, right: 2, gain: 1.0, cover: 4.0 },
                Node::Leaf { value: -2.0, cover: 1.0 },
                Node::Split { feature: 0, threshold: 1.0, left: 3, right: 4, gain: 1.0, cover: 3.0 },
                Node::Leaf { value: 0.5, cover: 2.0 },
                Node::Leaf { value: 3.0, cover: 1.0 },
            ],
        };
        let x = [2.0];
        let mut phi = vec![0.0];
        tree_contributions(&t, &x, &mut phi);
        assert!((phi[0] - (t.predict(&x) - expected_value(&t))).abs() < 1e-12);
    }
}
