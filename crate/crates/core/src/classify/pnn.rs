use serde::{Deserialize, Serialize};

use super::{check_training, class_list};
use crate::error::{invalid, Result};
use crate::matrix::FeatureMatrix;

pub const DEFAULT_PNN_SIGMA: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnnModel {
    pub classes: Vec<usize>,
    /// Unit-norm patterns, one group per entry of `classes`.
    pub patterns: Vec<Vec<Vec<f64>>>,
    pub sigma: f64,
}

fn unit(x: &[f64]) -> Result<Vec<f64>> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(invalid("zero vector cannot be unit-normalized"));
    }
    Ok(x.iter().map(|v| v / norm).collect())
}

pub fn pnn_train(x: &FeatureMatrix, labels: &[usize], sigma: f64) -> Result<PnnModel> {
    check_training(x, labels)?;
    if !(sigma > 0.0) {
        return Err(invalid("PNN sigma must be positive"));
    }
    let classes = class_list(labels);
    let mut patterns = vec![Vec::new(); classes.len()];
    for (r, l) in x.iter_rows().zip(labels) {
        let c = classes.binary_search(l).expect("label in class list");
        patterns[c].push(unit(r)?);
    }
    Ok(PnnModel {
        classes,
        patterns,
        sigma,
    })
}

impl PnnModel {
    /// Natural log of each class score `Σ exp((w·x̂ − 1)/σ²)`. Small σ pushes
    /// the scores themselves below the smallest double, so they are kept in
    /// log form.
    pub fn log_scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        let q = unit(x)?;
        let s2 = self.sigma * self.sigma;
        Ok(self
            .patterns
            .iter()
            .map(|group| {
                let exps: Vec<f64> = group
                    .iter()
                    .map(|w| (w.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() - 1.0) / s2)
                    .collect();
                let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                top + exps.iter().map(|e| (e - top).exp()).sum::<f64>().ln()
            })
            .collect())
    }

    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.log_scores(x)?.into_iter().map(f64::exp).collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        let s = self.log_scores(x)?;
        Ok(self.classes[super::argmax(s.into_iter())])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stores_unit_patterns() {
        let x = FeatureMatrix::from_rows(&[[3.0, 4.0], [0.0, 1.0], [0.0, 1.0]]).unwrap();
        let m = pnn_train(&x, &[0, 1, 1], 0.1).unwrap();
        assert_eq!(m.patterns[0][0], vec![0.6, 0.8]);
        assert_eq!(m.patterns[1].len(), 2);
        assert_eq!(m.patterns[1][0], vec![0.0, 1.0]);
    }

    #[test]
    fn query_on_pattern_and_scale_invariance() {
        let x = FeatureMatrix::from_rows(&[[1.0, 0.2], [0.1, 1.0]]).unwrap();
        let m = pnn_train(&x, &[0, 1], 0.5).unwrap();
        assert_eq!(m.predict(&[1.0, 0.2]).unwrap(), 0);
        assert_eq!(m.predict(&[0.1, 1.0]).unwrap(), 1);
        let a = m.scores(&[0.4, 0.7]).unwrap();
        let b = m.scores(&[4.0, 7.0]).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-15 * u.abs().max(1.0));
            assert!(*u > 0.0);
        }
    }

    #[test]
    fn zero_vectors_rejected() {
        let x = FeatureMatrix::from_rows(&[[0.0, 0.0]]).unwrap();
        assert!(pnn_train(&x, &[0], 0.1).is_err());
        let ok = pnn_train(&FeatureMatrix::from_rows(&[[1.0, 0.0]]).unwrap(), &[0], 0.1).unwrap();
        assert!(ok.predict(&[0.0, 0.0]).is_err());
    }
}
