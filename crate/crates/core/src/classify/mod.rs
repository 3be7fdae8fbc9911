//! Classifiers over feature rows with integer class ids.
//!
//! Every model lists its classes in ascending id order and breaks ties toward
//! the earliest class in that list.

mod centroid;
mod knn;
mod ldc;
mod pnn;
mod svm;

use serde::{Deserialize, Serialize};

pub use centroid::{centroid_fit, CentroidModel};
pub use knn::{knn_train, KnnModel};
pub use ldc::{ldc_train, LdcModel, LdcMoments, DEFAULT_LDC_RIDGE};
pub use pnn::{pnn_train, PnnModel, DEFAULT_PNN_SIGMA};
pub use svm::{
    multiclass_train, svm_train_smo, Kernel, MulticlassScheme, MulticlassSvm, SmoConfig, SvmModel,
};

use crate::error::{invalid, Result};
use crate::matrix::FeatureMatrix;

/// Sorted distinct labels.
pub fn class_list(labels: &[usize]) -> Vec<usize> {
    let mut c = labels.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// Index of the first maximum.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}

pub(crate) fn check_training(x: &FeatureMatrix, labels: &[usize]) -> Result<()> {
    if x.rows() == 0 {
        return Err(invalid("empty training set"));
    }
    if labels.len() != x.rows() {
        return Err(invalid(format!(
            "{} labels for {} rows",
            labels.len(),
            x.rows()
        )));
    }
    Ok(())
}

/// Kernel as written in a config; a missing RBF γ becomes 1/width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelSpec {
    Linear,
    Polynomial {
        #[serde(default = "default_degree")]
        degree: u32,
        #[serde(default)]
        homogeneous: bool,
    },
    Rbf {
        #[serde(default)]
        gamma: Option<f64>,
    },
    Tanh {
        kappa: f64,
        c: f64,
    },
}

fn default_degree() -> u32 {
    3
}

impl KernelSpec {
    pub fn resolve(&self, width: usize) -> Kernel {
        match *self {
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Polynomial {
                degree,
                homogeneous,
            } => Kernel::Polynomial {
                degree,
                homogeneous,
            },
            KernelSpec::Rbf { gamma } => Kernel::Rbf {
                gamma: gamma.unwrap_or(1.0 / width.max(1) as f64),
            },
            KernelSpec::Tanh { kappa, c } => Kernel::Tanh { kappa, c },
        }
    }
}

fn default_ridge() -> f64 {
    DEFAULT_LDC_RIDGE
}
fn default_k() -> usize {
    1
}
fn default_sigma() -> f64 {
    DEFAULT_PNN_SIGMA
}
fn default_kernel() -> KernelSpec {
    KernelSpec::Linear
}
fn default_scheme() -> MulticlassScheme {
    MulticlassScheme::OneVsAll
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClassifierSpec {
    Ldc {
        #[serde(default = "default_ridge")]
        ridge: f64,
    },
    Knn {
        #[serde(default = "default_k")]
        k: usize,
    },
    Pnn {
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    Svm {
        #[serde(default = "default_kernel")]
        kernel: KernelSpec,
        #[serde(default = "default_scheme")]
        scheme: MulticlassScheme,
        /// Solver settings; the seed is supplied by the caller.
        #[serde(default)]
        smo: SmoConfig,
    },
    Centroid {
        #[serde(default)]
        round: bool,
    },
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Ldc {
            ridge: DEFAULT_LDC_RIDGE,
        }
    }
}

impl ClassifierSpec {
    pub fn train(&self, x: &FeatureMatrix, labels: &[usize]) -> Result<TrainedModel> {
        Ok(match self {
            ClassifierSpec::Ldc { ridge } => TrainedModel::Ldc(ldc_train(x, labels, *ridge)?),
            ClassifierSpec::Knn { k } => {
                TrainedModel::Knn(knn_train(x, labels, (*k).min(x.rows()))?)
            }
            ClassifierSpec::Pnn { sigma } => TrainedModel::Pnn(pnn_train(x, labels, *sigma)?),
            ClassifierSpec::Svm {
                kernel,
                scheme,
                smo,
            } => TrainedModel::Svm(multiclass_train(
                x,
                labels,
                kernel.resolve(x.width()),
                smo,
                *scheme,
            )?),
            ClassifierSpec::Centroid { round } => {
                TrainedModel::Centroid(centroid_fit(x, labels, *round)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    Ldc(LdcModel),
    Knn(KnnModel),
    Pnn(PnnModel),
    Svm(MulticlassSvm),
    Centroid(CentroidModel),
}

impl TrainedModel {
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(match self {
            TrainedModel::Ldc(m) => m.predict(x),
            TrainedModel::Knn(m) => m.predict(x),
            TrainedModel::Pnn(m) => m.predict(x)?,
            TrainedModel::Svm(m) => m.predict(x),
            TrainedModel::Centroid(m) => m.predict(x),
        })
    }

    pub fn classes(&self) -> &[usize] {
        match self {
            TrainedModel::Ldc(m) => &m.classes,
            TrainedModel::Knn(m) => &m.classes,
            TrainedModel::Pnn(m) => &m.classes,
            TrainedModel::Svm(m) => &m.classes,
            TrainedModel::Centroid(m) => &m.classes,
        }
    }
}
