use serde::{Deserialize, Serialize};

use super::{check_training, class_list};
use crate::error::{invalid, Result};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub train: FeatureMatrix,
    pub labels: Vec<usize>,
    pub classes: Vec<usize>,
    pub k: usize,
}

pub fn knn_train(x: &FeatureMatrix, labels: &[usize], k: usize) -> Result<KnnModel> {
    check_training(x, labels)?;
    if k == 0 || k > x.rows() {
        return Err(invalid(format!("k = {k} outside 1..={}", x.rows())));
    }
    Ok(KnnModel {
        train: x.clone(),
        labels: labels.to_vec(),
        classes: class_list(labels),
        k,
    })
}

impl KnnModel {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut dist: Vec<(f64, usize)> = self
            .train
            .iter_rows()
            .enumerate()
            .map(|(i, r)| (r.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < dist.len() {
            dist.select_nth_unstable_by(self.k - 1, order);
        }
        let mut votes = vec![0usize; self.classes.len()];
        for &(_, i) in &dist[..self.k] {
            let c = self
                .classes
                .binary_search(&self.labels[i])
                .expect("label in class list");
            votes[c] += 1;
        }
        self.classes[super::argmax(votes.iter().map(|&v| v as f64))]
    }
}
