use serde::{Deserialize, Serialize};

use super::{check_training, class_list};
use crate::error::Result;
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidModel {
    pub classes: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
}

/// Per-class means, optionally rounded to integers for fixed-point targets.
pub fn centroid_fit(x: &FeatureMatrix, labels: &[usize], round: bool) -> Result<CentroidModel> {
    check_training(x, labels)?;
    let classes = class_list(labels);
    let mut sums = vec![vec![0.0; x.width()]; classes.len()];
    let mut counts = vec![0usize; classes.len()];
    for (r, l) in x.iter_rows().zip(labels) {
        let c = classes.binary_search(l).expect("label in class list");
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(r) {
            *s += v;
        }
    }
    for (s, n) in sums.iter_mut().zip(&counts) {
        for v in s.iter_mut() {
            *v /= *n as f64;
            if round {
                *v = v.round();
            }
        }
    }
    Ok(CentroidModel {
        classes,
        centroids: sums,
    })
}

impl CentroidModel {
    pub fn predict(&self, x: &[f64]) -> usize {
        let d = self
            .centroids
            .iter()
            .map(|c| -c.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
        self.classes[super::argmax(d)]
    }
}
