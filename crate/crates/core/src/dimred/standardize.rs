use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::FeatureMatrix;

/// Training-set column statistics; constant columns are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizerState {
    pub input_width: usize,
    /// Retained input columns, ascending.
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    /// Mean and sample standard deviation of each retained column.
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl StandardizerState {
    pub fn output_width(&self) -> usize {
        self.kept.len()
    }

    pub fn apply_row(&self, row: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.kept
                .iter()
                .zip(self.mean.iter().zip(&self.std))
                .map(|(&c, (m, s))| (row[c] - m) / s),
        );
    }
}

pub fn standardize_fit(train: &FeatureMatrix) -> Result<StandardizerState> {
    let n = train.rows();
    if n == 0 {
        return Err(invalid("cannot standardize an empty matrix"));
    }
    let width = train.width();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut mean = Vec::new();
    let mut std = Vec::new();
    for j in 0..width {
        let col = train.column(j);
        let first = col[0];
        if col.iter().all(|&v| v == first) {
            dropped.push(j);
            continue;
        }
        let m = col.iter().sum::<f64>() / n as f64;
        let ss: f64 = col.iter().map(|v| (v - m) * (v - m)).sum();
        let s = (ss / (n - 1) as f64).sqrt();
        if !(s > 0.0 && s.is_finite()) {
            dropped.push(j);
            continue;
        }
        kept.push(j);
        mean.push(m);
        std.push(s);
    }
    Ok(StandardizerState {
        input_width: width,
        kept,
        dropped,
        mean,
        std,
    })
}

pub fn standardize_apply(state: &StandardizerState, data: &FeatureMatrix) -> Result<FeatureMatrix> {
    if data.width() != state.input_width {
        return Err(invalid(format!(
            "matrix width {} does not match standardizer width {}",
            data.width(),
            state.input_width
        )));
    }
    let mut out = FeatureMatrix::with_width(state.output_width());
    let mut buf = Vec::with_capacity(state.output_width());
    for r in data.iter_rows() {
        state.apply_row(r, &mut buf);
        out.push_row(&buf);
    }
    Ok(out)
}
