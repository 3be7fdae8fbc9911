use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::class_list;
use crate::error::{invalid, Error, Result};
use crate::matrix::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    Linear,
    /// `(x·y)^d` when homogeneous, otherwise `(x·y + 1)^d`.
    Polynomial {
        degree: u32,
        homogeneous: bool,
    },
    Rbf {
        gamma: f64,
    },
    /// `tanh(kappa·x·y + c)`. Not positive semidefinite in general, so SMO
    /// can stall on it.
    Tanh {
        kappa: f64,
        c: f64,
    },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        let dot = || a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        match *self {
            Kernel::Linear => dot(),
            Kernel::Polynomial {
                degree,
                homogeneous,
            } => {
                let base = if homogeneous { dot() } else { dot() + 1.0 };
                base.powi(degree as i32)
            }
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
            Kernel::Tanh { kappa, c } => (kappa * dot() + c).tanh(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Polynomial { degree: 0, .. } => {
                Err(invalid("polynomial degree must be at least 1"))
            }
            Kernel::Rbf { gamma } if !(gamma > 0.0) => Err(invalid("rbf gamma must be positive")),
            Kernel::Tanh { kappa, c } if !kappa.is_finite() || !c.is_finite() => {
                Err(invalid("tanh parameters must be finite"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoConfig {
    /// Box constraint.
    pub c: f64,
    pub tol: f64,
    /// Consecutive passes without an update that end training.
    pub max_passes: usize,
    /// Total pass cap before giving up.
    pub max_iter: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SmoConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            tol: 1e-3,
            max_passes: 10,
            max_iter: 10_000,
            seed: 0,
        }
    }
}

/// A two-class SVM; positive margin means label +1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: Kernel,
    pub c: f64,
    pub support: Vec<Vec<f64>>,
    /// `α_i y_i` for each support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
    /// α for every training point, zeros included.
    pub alpha: Vec<f64>,
}

impl SvmModel {
    pub fn margin(&self, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, a)| a * self.kernel.eval(s, x))
            .sum::<f64>()
            + self.bias
    }
}

const MIN_STEP: f64 = 1e-5;
/// Smallest move accepted from the fallback sweep, relative to C.
const FINE_STEP: f64 = 1e-10;

struct Smo<'a> {
    x: &'a FeatureMatrix,
    y: &'a [f64],
    kernel: Kernel,
    c: f64,
    gram: Option<Vec<f64>>,
    alpha: Vec<f64>,
    err: Vec<f64>,
    b: f64,
}

impl Smo<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        match &self.gram {
            Some(g) => g[i * self.y.len() + j],
            None => self.kernel.eval(self.x.row(i), self.x.row(j)),
        }
    }

    fn violates(&self, i: usize, tol: f64) -> bool {
        let r = self.y[i] * self.err[i];
        (r < -tol && self.alpha[i] < self.c) || (r > tol && self.alpha[i] > 0.0)
    }

    fn step(&mut self, i: usize, j: usize, min_step: f64) -> bool {
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (ei, ej) = (self.err[i], self.err[j]);
        let (lo, hi) = if yi != yj {
            ((aj - ai).max(0.0), (self.c + aj - ai).min(self.c))
        } else {
            ((ai + aj - self.c).max(0.0), (ai + aj).min(self.c))
        };
        if hi - lo < 1e-12 {
            return false;
        }
        let (kii, kjj, kij) = (self.k(i, i), self.k(j, j), self.k(i, j));
        let eta = 2.0 * kij - kii - kjj;
        if eta >= 0.0 {
            return false;
        }
        let aj_new = (aj - yj * (ei - ej) / eta).clamp(lo, hi);
        if (aj_new - aj).abs() < min_step {
            return false;
        }
        let snap = |a: f64| {
            if a < 1e-12 * self.c {
                0.0
            } else if a > self.c * (1.0 - 1e-12) {
                self.c
            } else {
                a
            }
        };
        let aj_new = snap(aj_new);
        let ai_new = snap(ai + yi * yj * (aj - aj_new));
        let (di, dj) = (ai_new - ai, aj_new - aj);
        let b1 = self.b - ei - yi * di * kii - yj * dj * kij;
        let b2 = self.b - ej - yi * di * kij - yj * dj * kjj;
        let b_new = if ai_new > 0.0 && ai_new < self.c {
            b1
        } else if aj_new > 0.0 && aj_new < self.c {
            b2
        } else {
            (b1 + b2) / 2.0
        };
        let db = b_new - self.b;
        for k in 0..self.y.len() {
            self.err[k] += yi * di * self.k(i, k) + yj * dj * self.k(j, k) + db;
        }
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;
        self.b = b_new;
        true
    }

    /// Re-centre the bias inside the interval the bound constraints allow,
    /// preferring the mean over free multipliers. The pair updates only
    /// estimate it, which can leave violators that no pair step can fix.
    fn refit_bias(&mut self) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let (mut free_sum, mut free_n) = (0.0, 0usize);
        for i in 0..self.y.len() {
            // bias that puts point i exactly on its margin
            let u = self.b - self.err[i];
            let a = self.alpha[i];
            if a > 0.0 && a < self.c {
                free_sum += u;
                free_n += 1;
                lo = lo.max(u);
                hi = hi.min(u);
            } else if (a == 0.0) == (self.y[i] > 0.0) {
                lo = lo.max(u);
            } else {
                hi = hi.min(u);
            }
        }
        let b = if free_n > 0 {
            let m = free_sum / free_n as f64;
            if lo <= hi {
                m.clamp(lo, hi)
            } else {
                m
            }
        } else if lo.is_finite() && hi.is_finite() {
            0.5 * (lo + hi)
        } else if lo.is_finite() {
            lo
        } else {
            hi
        };
        let db = b - self.b;
        for e in &mut self.err {
            *e += db;
        }
        self.b = b;
    }
}

const GRAM_LIMIT: usize = 2000;

/// Simplified SMO: each KKT violator is paired with a random partner, falling
/// back to a sweep over all partners when the random one makes no progress.
pub fn svm_train_smo(
    x: &FeatureMatrix,
    labels: &[f64],
    kernel: Kernel,
    cfg: &SmoConfig,
) -> Result<SvmModel> {
    let n = x.rows();
    if labels.len() != n {
        return Err(invalid(format!("{} labels for {n} rows", labels.len())));
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(invalid("SVM labels must be -1 or +1"));
    }
    if !labels.contains(&1.0) || !labels.contains(&-1.0) {
        return Err(invalid("SVM training needs both labels present"));
    }
    if !(cfg.c > 0.0) || !(cfg.tol > 0.0) || cfg.max_passes == 0 {
        return Err(invalid("SMO needs C > 0, tol > 0 and max_passes >= 1"));
    }
    kernel.validate()?;
    let gram = (n <= GRAM_LIMIT).then(|| {
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval(x.row(i), x.row(j));
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    });
    let mut s = Smo {
        x,
        y: labels,
        kernel,
        c: cfg.c,
        gram,
        alpha: vec![0.0; n],
        err: labels.iter().map(|y| -y).collect(),
        b: 0.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut passes = 0;
    let mut iter = 0;
    while passes < cfg.max_passes {
        if iter >= cfg.max_iter {
            return Err(Error::NumericFailure(format!(
                "SMO did not converge within {} passes ({} KKT violators left)",
                cfg.max_iter,
                (0..n).filter(|&i| s.violates(i, cfg.tol)).count()
            )));
        }
        iter += 1;
        let mut changed = 0;
        for i in 0..n {
            if !s.violates(i, cfg.tol) {
                continue;
            }
            let j0 = (i + 1 + rng.random_range(0..n - 1)) % n;
            let fine = FINE_STEP * cfg.c;
            if s.step(i, j0, MIN_STEP)
                || (1..n)
                    .map(|o| (j0 + o) % n)
                    .any(|j| j != i && s.step(i, j, fine))
            {
                changed += 1;
            }
        }
        if changed == 0 {
            s.refit_bias();
            passes += 1;
        } else {
            passes = 0;
        }
    }
    let stuck: Vec<usize> = (0..n).filter(|&i| s.violates(i, cfg.tol)).collect();
    if !stuck.is_empty() {
        return Err(Error::NumericFailure(format!(
            "SMO stalled with {} KKT violators (first at index {}, y·E = {:.3e})",
            stuck.len(),
            stuck[0],
            labels[stuck[0]] * s.err[stuck[0]]
        )));
    }
    let sv: Vec<usize> = (0..n).filter(|&i| s.alpha[i] > 0.0).collect();
    Ok(SvmModel {
        kernel,
        c: cfg.c,
        support: sv.iter().map(|&i| x.row(i).to_vec()).collect(),
        coef: sv.iter().map(|&i| s.alpha[i] * labels[i]).collect(),
        bias: s.b,
        alpha: s.alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MulticlassScheme {
    OneVsAll,
    OneVsOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassSvm {
    pub scheme: MulticlassScheme,
    pub classes: Vec<usize>,
    /// One-vs-all: one model per class. One-vs-one: `(a, b, model)` with
    /// positive margins voting for class index `a`.
    pub models: Vec<(usize, usize, SvmModel)>,
}

pub fn multiclass_train(
    x: &FeatureMatrix,
    labels: &[usize],
    kernel: Kernel,
    cfg: &SmoConfig,
    scheme: MulticlassScheme,
) -> Result<MulticlassSvm> {
    super::check_training(x, labels)?;
    let classes = class_list(labels);
    if classes.len() < 2 {
        return Err(invalid("SVM needs at least two classes"));
    }
    let mut models = Vec::new();
    let sub = |k: u64| SmoConfig {
        seed: cfg.seed.wrapping_add(k.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ..*cfg
    };
    match scheme {
        MulticlassScheme::OneVsAll => {
            for (a, &c) in classes.iter().enumerate() {
                let y: Vec<f64> = labels
                    .iter()
                    .map(|&l| if l == c { 1.0 } else { -1.0 })
                    .collect();
                models.push((a, a, svm_train_smo(x, &y, kernel, &sub(a as u64))?));
            }
        }
        MulticlassScheme::OneVsOne => {
            let mut k = 0;
            for a in 0..classes.len() {
                for b in a + 1..classes.len() {
                    let rows: Vec<usize> = (0..labels.len())
                        .filter(|&i| labels[i] == classes[a] || labels[i] == classes[b])
                        .collect();
                    let y: Vec<f64> = rows
                        .iter()
                        .map(|&i| if labels[i] == classes[a] { 1.0 } else { -1.0 })
                        .collect();
                    models.push((
                        a,
                        b,
                        svm_train_smo(&x.select_rows(&rows), &y, kernel, &sub(k))?,
                    ));
                    k += 1;
                }
            }
        }
    }
    Ok(MulticlassSvm {
        scheme,
        classes,
        models,
    })
}

impl MulticlassSvm {
    pub fn predict(&self, x: &[f64]) -> usize {
        let k = self.classes.len();
        match self.scheme {
            MulticlassScheme::OneVsAll => {
                let m = self.models.iter().map(|(_, _, m)| m.margin(x));
                self.classes[super::argmax(m)]
            }
            MulticlassScheme::OneVsOne => {
                let mut votes = vec![0usize; k];
                let mut sums = vec![0.0; k];
                for (a, b, m) in &self.models {
                    let g = m.margin(x);
                    sums[*a] += g;
                    sums[*b] -= g;
                    votes[if g > 0.0 { *a } else { *b }] += 1;
                }
                self.classes[vote_winner(&votes, &sums)]
            }
        }
    }
}

/// Most votes; ties go to the larger margin sum, then to the lower index.
pub(crate) fn vote_winner(votes: &[usize], sums: &[f64]) -> usize {
    let mut best = 0;
    for c in 1..votes.len() {
        if votes[c] > votes[best] || (votes[c] == votes[best] && sums[c] > sums[best]) {
            best = c;
        }
    }
    best
}
