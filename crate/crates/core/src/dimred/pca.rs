use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::FeatureMatrix;

/// Principal axes of a training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Retained unit eigenvectors, one per entry, by descending eigenvalue.
    pub components: Vec<Vec<f64>>,
    /// Every eigenvalue of the sample covariance, descending.
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn retained(&self) -> usize {
        self.components.len()
    }

    pub fn input_width(&self) -> usize {
        self.mean.len()
    }

    /// Same model keeping only the first `m` components.
    pub fn truncate(&self, m: usize) -> PcaModel {
        PcaModel {
            mean: self.mean.clone(),
            components: self.components[..m.min(self.retained())].to_vec(),
            eigenvalues: self.eigenvalues.clone(),
        }
    }

    pub fn project_row(&self, row: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.components.iter().map(|e| {
            e.iter()
                .zip(row.iter().zip(&self.mean))
                .map(|(e, (x, m))| e * (x - m))
                .sum::<f64>()
        }));
    }

    /// Maps projected coordinates back into the input space.
    pub fn reconstruct_row(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (c, e) in coords.iter().zip(&self.components) {
            for (o, v) in out.iter_mut().zip(e) {
                *o += c * v;
            }
        }
        out
    }
}

/// Eigendecomposition of the sample covariance of `data`, keeping the top `m`
/// axes. Each eigenvector is signed so its largest-magnitude entry is positive.
pub fn pca_fit(data: &FeatureMatrix, m: usize) -> Result<PcaModel> {
    let d = data.width();
    if data.rows() < 2 {
        return Err(invalid("PCA needs at least two rows"));
    }
    if m == 0 || m > d {
        return Err(invalid(format!(
            "retained component count {m} outside 1..={d}"
        )));
    }
    let cov = data.covariance();
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let components = order[..m]
        .iter()
        .map(|&i| signed_axis(&eig.eigenvectors, i))
        .collect();
    Ok(PcaModel {
        mean: data.mean(),
        components,
        eigenvalues,
    })
}

fn signed_axis(vectors: &DMatrix<f64>, col: usize) -> Vec<f64> {
    let v: Vec<f64> = vectors.column(col).iter().copied().collect();
    let pivot = v.iter().enumerate().fold(
        0,
        |best, (i, x)| if x.abs() > v[best].abs() { i } else { best },
    );
    if v[pivot] < 0.0 {
        v.iter().map(|x| -x).collect()
    } else {
        v
    }
}

pub fn pca_transform(model: &PcaModel, rows: &FeatureMatrix) -> Result<FeatureMatrix> {
    if rows.width() != model.input_width() {
        return Err(invalid(format!(
            "row width {} does not match PCA width {}",
            rows.width(),
            model.input_width()
        )));
    }
    let mut out = FeatureMatrix::with_width(model.retained());
    let mut buf = Vec::with_capacity(model.retained());
    for r in rows.iter_rows() {
        model.project_row(r, &mut buf);
        out.push_row(&buf);
    }
    Ok(out)
}
