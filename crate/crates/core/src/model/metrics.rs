//! Classification metrics at a fixed 0.5 threshold, plus rank-based AUC.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    /// Positive-class F1; 0 when there are no true or predicted positives.
    pub f1: f64,
    /// Undefined when only one class is present.
    pub auc: Option<f64>,
}

/// Midranks (1-based) with ties sharing the mean rank.
pub fn midranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Mann-Whitney AUC: P(score of a positive > score of a negative), ties ½.
pub fn auc(y: &[u8], scores: &[f64]) -> Option<f64> {
    let n_pos = y.iter().filter(|&&l| l == 1).count();
    let n_neg = y.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let ranks = midranks(scores);
    let rank_sum: f64 = ranks.iter().zip(y).filter(|(_, &l)| l == 1).map(|(r, _)| r).sum();
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos * n_neg) as f64)
}

pub fn metrics(y: &[u8], scores: &[f64]) -> Metrics {
    let pred: Vec<u8> = scores.iter().map(|&s| u8::from(s >= 0.5)).collect();
    let correct = pred.iter().zip(y).filter(|(p, t)| p == t).count();
    let tp = pred.iter().zip(y).filter(|(&p, &t)| p == 1 && t == 1).count();
    let fp = pred.iter().zip(y).filter(|(&p, &t)| p == 1 && t == 0).count();
    let fn_ = pred.iter().zip(y).filter(|(&p, &t)| p == 0 && t == 1).count();
    let denom = 2 * tp + fp + fn_;
    Metrics {
        accuracy: if y.is_empty() { 0.0 } else { correct as f64 / y.len() as f64 },
        f1: if denom == 0 { 0.0 } else { 2.0 * tp as f64 / denom as f64 },
        auc: auc(y, scores),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&[0, 0, 1, 1], &[0.1, 0.2, 0.3, 0.4]), Some(1.0));
        assert_eq!(auc(&[0, 1, 0, 1], &[0.5; 4]), Some(0.5));
        assert_eq!(auc(&[0, 0, 1, 1], &[0.1, 0.4, 0.35, 0.8]), Some(0.75));
        assert_eq!(auc(&[1, 1], &[0.1, 0.2]), None);
    }

    #[test]
    fn accuracy_and_f1() {
        let m = metrics(&[0, 1, 1, 0], &[0.2, 0.7, 0.4, 0.6]);
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(m.f1, 0.5);
    }

    #[test]
    fn midrank_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }
}
