use nalgebra::{Cholesky, DMatrix};
use serde::{Deserialize, Serialize};

use super::{check_training, class_list};
use crate::error::{invalid, Error, Result};
use crate::matrix::FeatureMatrix;

pub const DEFAULT_LDC_RIDGE: f64 = 1e-6;

/// Class statistics before inversion. Fitting on the first `m` columns of the
/// data is the same as truncating these moments, which the model-selection
/// loop uses to sweep nested feature counts cheaply.
#[derive(Debug, Clone, PartialEq)]
pub struct LdcMoments {
    pub classes: Vec<usize>,
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    /// Class-size-weighted pooled covariance, row-major `d × d`.
    pub pooled: Vec<f64>,
    pub width: usize,
}

impl LdcMoments {
    pub fn fit(x: &FeatureMatrix, labels: &[usize]) -> Result<Self> {
        check_training(x, labels)?;
        let classes = class_list(labels);
        if classes.len() < 2 {
            return Err(invalid("LDC needs at least two classes"));
        }
        let d = x.width();
        let n = x.rows() as f64;
        let mut priors = Vec::new();
        let mut means = Vec::new();
        let mut pooled = vec![0.0; d * d];
        for &c in &classes {
            let members: Vec<&[f64]> = x
                .iter_rows()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(r, _)| r)
                .collect();
            let nc = members.len();
            if nc < 2 {
                return Err(invalid(format!("class {c} has fewer than two samples")));
            }
            let mut mu = vec![0.0; d];
            for r in &members {
                for (m, v) in mu.iter_mut().zip(*r) {
                    *m += v;
                }
            }
            for m in &mut mu {
                *m /= nc as f64;
            }
            let mut cov = vec![0.0; d * d];
            let mut centred = vec![0.0; d];
            for r in &members {
                for k in 0..d {
                    centred[k] = r[k] - mu[k];
                }
                for a in 0..d {
                    let ca = centred[a];
                    let row = &mut cov[a * d..(a + 1) * d];
                    for b in 0..d {
                        row[b] += ca * centred[b];
                    }
                }
            }
            let scale = (nc as f64 / n) / (nc - 1) as f64;
            for (p, c) in pooled.iter_mut().zip(&cov) {
                *p += scale * c;
            }
            priors.push(nc as f64 / n);
            means.push(mu);
        }
        Ok(Self {
            classes,
            priors,
            means,
            pooled,
            width: d,
        })
    }

    /// Moments of the leading `m` features.
    pub fn truncate(&self, m: usize) -> LdcMoments {
        let m = m.min(self.width);
        let d = self.width;
        let mut pooled = Vec::with_capacity(m * m);
        for a in 0..m {
            pooled.extend_from_slice(&self.pooled[a * d..a * d + m]);
        }
        LdcMoments {
            classes: self.classes.clone(),
            priors: self.priors.clone(),
            means: self.means.iter().map(|mu| mu[..m].to_vec()).collect(),
            pooled,
            width: m,
        }
    }

    pub fn into_model(self, ridge: f64) -> Result<LdcModel> {
        LdcModel::from_parts(self.classes, self.priors, self.means, self.pooled, ridge)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdcModel {
    pub classes: Vec<usize>,
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    /// Inverse of the regularized pooled covariance, row-major.
    pub cov_inv: Vec<f64>,
    pub width: usize,
    // Per class: C⁻¹μ and 2 ln P − μᵀC⁻¹μ. The discriminant differs from
    // 2·wᵀx + bias by the class-independent term xᵀC⁻¹x.
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl LdcModel {
    /// Builds a model from explicit statistics; `cov` is row-major `d × d`.
    pub fn from_parts(
        classes: Vec<usize>,
        priors: Vec<f64>,
        means: Vec<Vec<f64>>,
        cov: Vec<f64>,
        ridge: f64,
    ) -> Result<Self> {
        let d = means.first().map_or(0, Vec::len);
        if classes.len() != priors.len()
            || classes.len() != means.len()
            || cov.len() != d * d
            || d == 0
        {
            return Err(invalid("inconsistent LDC parameters"));
        }
        if !(ridge >= 0.0) {
            return Err(invalid("ridge must be nonnegative"));
        }
        let mut c = DMatrix::from_row_slice(d, d, &cov);
        let mean_diag = c.diagonal().sum() / d as f64;
        for k in 0..d {
            c[(k, k)] += ridge * mean_diag;
        }
        let chol = Cholesky::new(c).ok_or_else(|| {
            Error::NumericFailure(format!(
                "pooled covariance ({d}×{d}) is not positive definite after ridge {ridge}"
            ))
        })?;
        let inv = chol.inverse();
        let cov_inv: Vec<f64> = (0..d)
            .flat_map(|a| (0..d).map(move |b| (a, b)))
            .map(|(a, b)| inv[(a, b)])
            .collect();
        let mut weights = Vec::new();
        let mut bias = Vec::new();
        for (mu, p) in means.iter().zip(&priors) {
            let w: Vec<f64> = (0..d)
                .map(|a| (0..d).map(|b| cov_inv[a * d + b] * mu[b]).sum())
                .collect();
            let quad: f64 = w.iter().zip(mu).map(|(a, b)| a * b).sum();
            bias.push(2.0 * p.ln() - quad);
            weights.push(w);
        }
        Ok(Self {
            classes,
            priors,
            means,
            cov_inv,
            width: d,
            weights,
            bias,
        })
    }

    /// `2 ln P(ω_i) − (x−μ_i)ᵀC⁻¹(x−μ_i)` for every class.
    pub fn discriminants(&self, x: &[f64]) -> Vec<f64> {
        let d = self.width;
        self.means
            .iter()
            .zip(&self.priors)
            .map(|(mu, p)| {
                let diff: Vec<f64> = x.iter().zip(mu).map(|(a, b)| a - b).collect();
                let mut q = 0.0;
                for a in 0..d {
                    let row = &self.cov_inv[a * d..(a + 1) * d];
                    q += diff[a] * row.iter().zip(&diff).map(|(c, v)| c * v).sum::<f64>();
                }
                2.0 * p.ln() - q
            })
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let scores = self
            .weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| b + 2.0 * w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>());
        self.classes[super::argmax(scores)]
    }
}

pub fn ldc_train(x: &FeatureMatrix, labels: &[usize], ridge: f64) -> Result<LdcModel> {
    LdcMoments::fit(x, labels)?.into_model(ridge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_point_is_own_class() {
        let x =
            FeatureMatrix::from_rows(&[[0.0, 0.0], [1.0, 0.5], [5.0, 5.0], [6.0, 4.0]]).unwrap();
        let m = ldc_train(&x, &[0, 0, 1, 1], 1e-6).unwrap();
        assert_eq!(m.predict(&m.means[0].clone()), 0);
        assert_eq!(m.predict(&m.means[1].clone()), 1);
    }

    #[test]
    fn linear_scores_agree_with_discriminant() {
        let rows: Vec<[f64; 3]> = (0..30)
            .map(|i| {
                let t = i as f64;
                [
                    (t * 0.7).sin() + (i % 3) as f64,
                    (t * 1.3).cos(),
                    t.sqrt() * 0.1 * (i % 3) as f64,
                ]
            })
            .collect();
        let labels: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let m = ldc_train(&FeatureMatrix::from_rows(&rows).unwrap(), &labels, 1e-6).unwrap();
        for r in &rows {
            let g = m.discriminants(r);
            assert_eq!(
                m.classes[crate::classify::argmax(g.iter().copied())],
                m.predict(r)
            );
        }
    }

    #[test]
    fn truncation_matches_direct_fit() {
        let rows: Vec<[f64; 3]> = (0..12)
            .map(|i| [i as f64, (i * i % 5) as f64, (i % 4) as f64])
            .collect();
        let labels: Vec<usize> = (0..12).map(|i| i / 6).collect();
        let x = FeatureMatrix::from_rows(&rows).unwrap();
        let full = LdcMoments::fit(&x, &labels).unwrap();
        let direct = LdcMoments::fit(&x.prefix(2), &labels).unwrap();
        assert_eq!(full.truncate(2), direct);
    }

    #[test]
    fn singular_covariance_fails() {
        let x =
            FeatureMatrix::from_rows(&[[0.0, 1.0], [1.0, 1.0], [2.0, 1.0], [3.0, 1.0]]).unwrap();
        assert!(matches!(
            ldc_train(&x, &[0, 0, 1, 1], 0.0),
            Err(Error::NumericFailure(_))
        ));
        assert!(ldc_train(&x, &[0, 0, 1, 1], 1e-6).is_ok());
    }

    #[test]
    fn needs_two_per_class() {
        let x = FeatureMatrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        assert!(ldc_train(&x, &[0, 0, 1], 1e-6).is_err());
        assert!(ldc_train(&x, &[0, 0, 0], 1e-6).is_err());
    }
}
