//! The recordings-by-features table shared by statistics, modelling and
//! reporting. Missing values are NaN.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("row {row} has {found} values, expected {expected}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("{what} has {found} entries for {rows} rows")]
    Length { what: &'static str, found: usize, rows: usize },
    #[error("label {0} is not 0 or 1")]
    Label(String),
    #[error("duplicate column {0}")]
    DuplicateColumn(String),
    #[error("unknown column {0}")]
    UnknownColumn(String),
    #[error("csv line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub columns: Vec<String>,
    /// Row-major values; NaN marks a missing value.
    pub rows: Vec<Vec<f64>>,
    /// Recording id, or subject id after aggregation.
    pub row_ids: Vec<String>,
    pub subject_ids: Vec<String>,
    pub labels: Vec<u8>,
}

impl FeatureMatrix {
    pub fn new(
        columns: Vec<String>,
        rows: Vec<Vec<f64>>,
        row_ids: Vec<String>,
        subject_ids: Vec<String>,
        labels: Vec<u8>,
    ) -> Result<Self, MatrixError> {
        let n = rows.len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != columns.len() {
                return Err(MatrixError::RowLength { row: i, expected: columns.len(), found: r.len() });
            }
        }
        for (what, len) in [("row ids", row_ids.len()), ("subject ids", subject_ids.len()), ("labels", labels.len())] {
            if len != n {
                return Err(MatrixError::Length { what, found: len, rows: n });
            }
        }
        if let Some(l) = labels.iter().find(|&&l| l > 1) {
            return Err(MatrixError::Label(l.to_string()));
        }
        let mut seen = HashMap::new();
        for c in &columns {
            if seen.insert(c.as_str(), ()).is_some() {
                return Err(MatrixError::DuplicateColumn(c.clone()));
            }
        }
        Ok(Self { columns, rows, row_ids, subject_ids, labels })
    }

    /// Unlabelled-subject convenience: each row is its own subject.
    pub fn from_rows(columns: Vec<String>, rows: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self, MatrixError> {
        let ids: Vec<String> = (0..rows.len()).map(|i| format!("r{i}")).collect();
        Self::new(columns, rows, ids.clone(), ids, labels)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn missing_count(&self) -> usize {
        self.rows.iter().flatten().filter(|v| v.is_nan()).count()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self {
            columns: self.columns.clone(),
            rows: idx.iter().map(|&i| self.rows[i].clone()).collect(),
            row_ids: idx.iter().map(|&i| self.row_ids[i].clone()).collect(),
            subject_ids: idx.iter().map(|&i| self.subject_ids[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self {
            columns: idx.iter().map(|&j| self.columns[j].clone()).collect(),
            rows: self.rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect(),
            row_ids: self.row_ids.clone(),
            subject_ids: self.subject_ids.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn select_named(&self, names: &[String]) -> Result<Self, MatrixError> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n).ok_or_else(|| MatrixError::UnknownColumn(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.select_columns(&idx))
    }

    /// CSV with header `row_id,subject_id,label,<features...>`; missing
    /// values are written as empty fields.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), MatrixError> {
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["row_id".to_string(), "subject_id".to_string(), "label".to_string()];
        header.extend(self.columns.iter().cloned());
        out.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut rec = vec![self.row_ids[i].clone(), self.subject_ids[i].clone(), self.labels[i].to_string()];
            rec.extend(self.rows[i].iter().map(|v| if v.is_nan() { String::new() } else { format_value(*v) }));
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, MatrixError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
        if header.len() < 3 || header[..3] != ["row_id", "subject_id", "label"] {
            return Err(MatrixError::Parse { line: 1, message: "header must start with row_id,subject_id,label".into() });
        }
        let columns = header[3..].to_vec();
        let (mut rows, mut row_ids, mut subjects, mut labels) = (vec![], vec![], vec![], vec![]);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            row_ids.push(rec[0].to_string());
            subjects.push(rec[1].to_string());
            labels.push(match &rec[2] {
                "0" => 0,
                "1" => 1,
                other => return Err(MatrixError::Label(other.to_string())),
            });
            let values = rec
                .iter()
                .skip(3)
                .map(|s| parse_value(s).ok_or_else(|| MatrixError::Parse { line, message: format!("bad number {s:?}") }))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(values);
        }
        Self::new(columns, rows, row_ids, subjects, labels)
    }
}

/// Shortest representation that parses back to the same f64.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

pub fn parse_value(s: &str) -> Option<f64> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("nan") || s == "NA" {
        return Some(f64::NAN);
    }
    s.parse().ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_missing() {
        let m = FeatureMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.5, f64::NAN], vec![-0.1, 3e-12]],
            vec!["x".into(), "y".into()],
            vec!["s1".into(), "s1".into()],
            vec![0, 1],
        )
        .unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = FeatureMatrix::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.columns, m.columns);
        assert!(back.rows[0][1].is_nan());
        assert_eq!(back.rows[1], m.rows[1]);
        assert_eq!(back.missing_count(), 1);
    }

    #[test]
    fn shape_errors() {
        let err = FeatureMatrix::from_rows(vec!["a".into()], vec![vec![1.0, 2.0]], vec![0]).unwrap_err();
        assert!(matches!(err, MatrixError::RowLength { .. }));
        let err = FeatureMatrix::from_rows(vec!["a".into(), "a".into()], vec![], vec![]).unwrap_err();
        assert!(matches!(err, MatrixError::DuplicateColumn(_)));
    }
}
