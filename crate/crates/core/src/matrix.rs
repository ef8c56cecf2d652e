//! Texts × conditions score grids and their long-form CSV encoding.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{LexdivError, Result};
use crate::indices::IndexSpec;

/// Provenance carried alongside a matrix; serialized into the JSON sidecar.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatrixMeta {
    pub method: String,
    pub index: Option<IndexSpec>,
    pub seed: Option<u64>,
    pub iterations: Option<usize>,
    pub truncate_to: Option<usize>,
    /// Length actually analyzed after rounding down for alternating sampling.
    pub effective_length: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    row_ids: Vec<String>,
    col_labels: Vec<String>,
    /// Row-major cells.
    values: Vec<f64>,
    pub meta: MatrixMeta,
}

impl ScoreMatrix {
    pub fn new(row_ids: Vec<String>, col_labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != row_ids.len() * col_labels.len() {
            return Err(LexdivError::invalid(format!(
                "matrix has {} cells, expected {} x {}",
                values.len(),
                row_ids.len(),
                col_labels.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(LexdivError::invalid(format!("non-finite matrix cell {v}")));
        }
        Ok(ScoreMatrix {
            row_ids,
            col_labels,
            values,
            meta: MatrixMeta::default(),
        })
    }

    /// Builds a matrix from rows of equal length; ids and labels are generated.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LexdivError::invalid("ragged rows"));
        }
        ScoreMatrix::new(
            (0..rows.len()).map(|i| format!("r{i}")).collect(),
            (0..cols).map(|j| format!("c{j}")).collect(),
            rows.concat(),
        )
    }

    pub fn with_meta(mut self, meta: MatrixMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.n_cols() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let k = self.n_cols();
        &self.values[row * k..(row + 1) * k]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.get(i, col)).collect()
    }

    /// Matrix restricted to the given rows, in the given order.
    pub fn select_rows(&self, ids: &[String]) -> Result<ScoreMatrix> {
        let mut values = Vec::with_capacity(ids.len() * self.n_cols());
        for id in ids {
            let i = self
                .row_ids
                .iter()
                .position(|r| r == id)
                .ok_or_else(|| LexdivError::invalid(format!("unknown row `{id}`")))?;
            values.extend_from_slice(self.row(i));
        }
        Ok(ScoreMatrix {
            row_ids: ids.to_vec(),
            col_labels: self.col_labels.clone(),
            values,
            meta: self.meta.clone(),
        })
    }

    pub(crate) fn map_values(&self, f: impl Fn(usize, usize, f64) -> f64) -> ScoreMatrix {
        let k = self.n_cols();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, &v)| f(idx / k, idx % k, v))
            .collect();
        ScoreMatrix {
            values,
            ..self.clone()
        }
    }

    /// Writes `text_id,condition,score` rows in row-major order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| LexdivError::invalid(format!("csv write failed: {e}"));
        w.write_record(["text_id", "condition", "score"]).map_err(io)?;
        for (i, id) in self.row_ids.iter().enumerate() {
            for (j, label) in self.col_labels.iter().enumerate() {
                w.write_record([id.as_str(), label.as_str(), &self.get(i, j).to_string()])
                    .map_err(io)?;
            }
        }
        w.flush()
            .map_err(|e| LexdivError::invalid(format!("csv write failed: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Parses the long form written by [`write_csv`](Self::write_csv). Row and
    /// column order follow first appearance; every cell must be present once.
    pub fn read_csv<R: Read>(reader: R) -> Result<ScoreMatrix> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let bad = |line: u64, m: String| LexdivError::invalid(format!("scores csv line {line}: {m}"));
        let headers = r.headers().map_err(|e| bad(1, e.to_string()))?.clone();
        if headers.len() < 3 || &headers[0] != "text_id" || &headers[1] != "condition" || &headers[2] != "score" {
            return Err(bad(1, "expected header `text_id,condition,score`".into()));
        }
        let mut rows: Vec<String> = Vec::new();
        let mut cols: Vec<String> = Vec::new();
        let mut row_index: HashMap<String, usize> = HashMap::new();
        let mut col_index: HashMap<String, usize> = HashMap::new();
        let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            let i = *row_index.entry(rec[0].to_string()).or_insert_with(|| {
                rows.push(rec[0].to_string());
                rows.len() - 1
            });
            let j = *col_index.entry(rec[1].to_string()).or_insert_with(|| {
                cols.push(rec[1].to_string());
                cols.len() - 1
            });
            let v: f64 = rec[2]
                .parse()
                .map_err(|_| bad(line, format!("non-numeric score `{}`", &rec[2])))?;
            if cells.insert((i, j), v).is_some() {
                return Err(bad(line, format!("duplicate cell ({}, {})", &rec[0], &rec[1])));
            }
        }
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for (i, id) in rows.iter().enumerate() {
            for (j, label) in cols.iter().enumerate() {
                let v = cells.get(&(i, j)).ok_or_else(|| {
                    LexdivError::invalid(format!("scores csv: missing cell ({id}, {label})"))
                })?;
                values.push(*v);
            }
        }
        ScoreMatrix::new(rows, cols, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_ragged_and_incomplete() {
        assert!(ScoreMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        let csv = "text_id,condition,score\na,1,0.5\na,2,0.6\nb,1,0.4\n";
        assert!(ScoreMatrix::read_csv(csv.as_bytes()).is_err());
        let dup = "text_id,condition,score\na,1,0.5\na,1,0.6\n";
        assert!(ScoreMatrix::read_csv(dup.as_bytes()).is_err());
    }

    #[test]
    fn select_rows_keeps_order() {
        let m = ScoreMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let s = m.select_rows(&["r2".into(), "r0".into()]).unwrap();
        assert_eq!(s.values(), &[5.0, 6.0, 1.0, 2.0]);
        assert!(m.select_rows(&["zz".into()]).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(rows in 1usize..6, cols in 1usize..5, seed in any::<u64>()) {
            let mut x = seed;
            let values: Vec<f64> = (0..rows * cols)
                .map(|_| {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (x >> 11) as f64 / (1u64 << 53) as f64 * 200.0 - 100.0
                })
                .collect();
            let m = ScoreMatrix::new(
                (0..rows).map(|i| format!("text{i}")).collect(),
                (0..cols).map(|j| format!("{}", 60 * (j + 1))).collect(),
                values,
            ).unwrap();
            let back = ScoreMatrix::read_csv(m.to_csv_string().as_bytes()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
