use crate::classify::{ClassifierSpec, LdcMoments, TrainedModel};
use crate::error::Result;
use crate::matrix::FeatureMatrix;
use crate::signal::{MovementClass, TrialKey};

/// Where a row being classified came from.
#[derive(Debug, Clone, Copy)]
pub struct SampleMeta<'a> {
    pub trial: &'a TrialKey,
    pub window: usize,
}

pub trait Predictor {
    /// Returns a class index into the class list the learner was trained on.
    fn predict(&self, row: &[f64], meta: &SampleMeta<'_>) -> Result<usize>;
}

pub trait Learner {
    fn fit(&self, x: &FeatureMatrix, labels: &[usize], seed: u64) -> Result<Box<dyn Predictor>>;

    /// One model per entry of `dims`, each trained on that many leading columns.
    fn fit_prefixes(
        &self,
        x: &FeatureMatrix,
        labels: &[usize],
        dims: &[usize],
        seed: u64,
    ) -> Result<Vec<Box<dyn Predictor>>> {
        dims.iter()
            .map(|&d| self.fit(&x.prefix(d), labels, seed))
            .collect()
    }
}

impl Predictor for TrainedModel {
    fn predict(&self, row: &[f64], _meta: &SampleMeta<'_>) -> Result<usize> {
        TrainedModel::predict(self, row)
    }
}

/// Adapts a [`ClassifierSpec`] to the evaluation loop.
#[derive(Debug, Clone)]
pub struct SpecLearner(pub ClassifierSpec);

impl SpecLearner {
    fn seeded(&self, seed: u64) -> ClassifierSpec {
        let mut spec = self.0.clone();
        if let ClassifierSpec::Svm { smo, .. } = &mut spec {
            smo.seed = seed;
        }
        spec
    }
}

impl Learner for SpecLearner {
    fn fit(&self, x: &FeatureMatrix, labels: &[usize], seed: u64) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(self.seeded(seed).train(x, labels)?))
    }

    fn fit_prefixes(
        &self,
        x: &FeatureMatrix,
        labels: &[usize],
        dims: &[usize],
        seed: u64,
    ) -> Result<Vec<Box<dyn Predictor>>> {
        match &self.0 {
            ClassifierSpec::Ldc { ridge } => {
                let full = LdcMoments::fit(x, labels)?;
                dims.iter()
                    .map(|&d| {
                        let m = full.truncate(d).into_model(*ridge)?;
                        Ok(Box::new(TrainedModel::Ldc(m)) as Box<dyn Predictor>)
                    })
                    .collect()
            }
            _ => dims
                .iter()
                .map(|&d| self.fit(&x.prefix(d), labels, seed))
                .collect(),
        }
    }
}

/// Answers with the true class of every sample; a protocol check, not a
/// classifier.
#[derive(Debug, Clone)]
pub struct OracleLearner {
    pub classes: Vec<MovementClass>,
}

struct Oracle(Vec<MovementClass>);

impl Predictor for Oracle {
    fn predict(&self, _row: &[f64], meta: &SampleMeta<'_>) -> Result<usize> {
        Ok(self
            .0
            .iter()
            .position(|c| *c == meta.trial.class)
            .unwrap_or(0))
    }
}

impl Learner for OracleLearner {
    fn fit(&self, _x: &FeatureMatrix, _labels: &[usize], _seed: u64) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(Oracle(self.classes.clone())))
    }
}
