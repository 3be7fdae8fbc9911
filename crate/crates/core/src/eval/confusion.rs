use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::signal::MovementClass;

/// Counts indexed `[true][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<MovementClass>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<MovementClass>) -> Self {
        let k = classes.len();
        Self {
            classes,
            counts: vec![vec![0; k]; k],
        }
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.counts[truth][predicted] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.classes.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Percentage of correct predictions; 0 for an empty matrix.
    pub fn accuracy(&self) -> f64 {
        let t = self.total();
        if t == 0 {
            0.0
        } else {
            100.0 * self.correct() as f64 / t as f64
        }
    }

    /// Per-class recall in percent, `None` for classes never tested.
    pub fn recall(&self) -> Vec<Option<f64>> {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let n: u64 = row.iter().sum();
                (n > 0).then(|| 100.0 * row[i] as f64 / n as f64)
            })
            .collect()
    }

    pub fn add(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.classes != self.classes {
            return Err(invalid("confusion matrices have different class lists"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }
}

/// Elementwise sum of matrices sharing a class list.
pub fn confusion_accumulate(matrices: &[ConfusionMatrix]) -> Result<ConfusionMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| invalid("nothing to accumulate"))?;
    let mut acc = ConfusionMatrix::new(first.classes.clone());
    for m in matrices {
        acc.add(m)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use MovementClass::*;

    #[test]
    fn accuracy_and_recall() {
        let mut m = ConfusionMatrix::new(vec![Spherical, Tip, Hook]);
        for i in 0..3 {
            m.record(i, i);
        }
        assert_eq!(m.accuracy(), 100.0);
        m.record(0, 1);
        assert_eq!(m.accuracy(), 75.0);
        assert_eq!(m.recall(), vec![Some(50.0), Some(100.0), Some(100.0)]);
        let zero = ConfusionMatrix::new(m.classes.clone());
        assert_eq!(confusion_accumulate(&[m.clone(), zero]).unwrap(), m);
        let other = ConfusionMatrix::new(vec![Spherical]);
        assert!(m.add(&other).is_err());
        assert_eq!(ConfusionMatrix::new(vec![Tip]).recall(), vec![None]);
    }
}
