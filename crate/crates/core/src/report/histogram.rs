//! Per-feature, per-group normalized histograms as plotting data.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::matrix::{format_value, FeatureMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub feature: String,
    pub label: u8,
    /// `bins + 1` edges shared by both groups of a feature.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Non-missing values in this group.
    pub n: usize,
}

impl Histogram {
    /// Counts divided by `n`; all zero for an empty group.
    pub fn normalized(&self) -> Vec<f64> {
        self.counts.iter().map(|&c| if self.n == 0 { 0.0 } else { c as f64 / self.n as f64 }).collect()
    }
}

/// One histogram per feature and label present in `x`, binned over the
/// feature's range across all rows. A constant feature puts everything in
/// the first bin. Missing values are skipped.
pub fn emit_histograms(x: &FeatureMatrix, bins: usize) -> Vec<Histogram> {
    assert!(bins > 0, "bins must be positive");
    let mut labels: Vec<u8> = x.labels.clone();
    labels.sort_unstable();
    labels.dedup();
    let mut out = Vec::with_capacity(x.n_cols() * labels.len());
    for (j, name) in x.columns.iter().enumerate() {
        let col = x.column(j);
        let present = col.iter().copied().filter(|v| !v.is_nan());
        let (lo, hi) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|b| if b == bins { hi } else { lo + width * b as f64 }).collect();
        for &label in &labels {
            let mut counts = vec![0usize; bins];
            let mut n = 0;
            for (v, _) in col.iter().zip(&x.labels).filter(|(v, l)| **l == label && !v.is_nan()) {
                let b = if width > 0.0 { (((v - lo) / width) as usize).min(bins - 1) } else { 0 };
                counts[b] += 1;
                n += 1;
            }
            out.push(Histogram { feature: name.clone(), label, edges: edges.clone(), counts, n });
        }
    }
    out
}

/// Long format: `feature,label,bin,lower,upper,count,normalized`.
pub fn write_histograms_csv<W: Write>(hists: &[Histogram], w: W) -> Result<(), csv::Error> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["feature", "label", "bin", "lower", "upper", "count", "normalized"])?;
    for h in hists {
        for (b, (c, p)) in h.counts.iter().zip(h.normalized()).enumerate() {
            out.write_record([
                h.feature.clone(),
                h.label.to_string(),
                b.to_string(),
                format_value(h.edges[b]),
                format_value(h.edges[b + 1]),
                c.to_string(),
                format_value(p),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}
