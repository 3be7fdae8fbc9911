//! Row-major dense matrix of feature rows.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    width: usize,
}

impl FeatureMatrix {
    pub fn new(data: Vec<f64>, width: usize) -> Result<Self> {
        if width == 0 && !data.is_empty() {
            return Err(invalid("zero-width matrix with data"));
        }
        if width > 0 && data.len() % width != 0 {
            return Err(invalid("data length is not a multiple of the width"));
        }
        Ok(Self { data, width })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(width * rows.len());
        for r in rows {
            if r.as_ref().len() != width {
                return Err(invalid("rows have different lengths"));
            }
            data.extend_from_slice(r.as_ref());
        }
        Ok(Self { data, width })
    }

    pub fn with_width(width: usize) -> Self {
        Self {
            data: Vec::new(),
            width,
        }
    }

    pub fn push_row(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.width);
        self.data.extend_from_slice(row);
    }

    pub fn rows(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.data.len() / self.width
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        // chunks_exact(0) panics; an empty width has no rows
        self.data.chunks_exact(self.width.max(1)).take(self.rows())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[j]).collect()
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(cols.len() * self.rows());
        for r in self.iter_rows() {
            data.extend(cols.iter().map(|&c| r[c]));
        }
        FeatureMatrix {
            data,
            width: cols.len(),
        }
    }

    /// First `k` columns.
    pub fn prefix(&self, k: usize) -> FeatureMatrix {
        let cols: Vec<usize> = (0..k.min(self.width)).collect();
        self.select_columns(&cols)
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.width);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            data,
            width: self.width,
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows(), self.width, &self.data)
    }

    pub fn from_dmatrix(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            data.extend(m.row(i).iter());
        }
        Self {
            data,
            width: m.ncols(),
        }
    }

    /// Column means.
    pub fn mean(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.width];
        for r in self.iter_rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = self.rows() as f64;
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    /// Unbiased sample covariance (divisor `N - 1`).
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.rows();
        let mean = self.mean();
        let mut centered = self.to_dmatrix();
        for mut row in centered.row_iter_mut() {
            for (v, m) in row.iter_mut().zip(&mean) {
                *v -= m;
            }
        }
        let mut cov = centered.tr_mul(&centered);
        cov /= (n.max(2) - 1) as f64;
        cov
    }
}
