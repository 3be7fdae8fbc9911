use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::matrix::FeatureMatrix;

pub const DEFAULT_RELIEF_SAMPLES: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReliefVariant {
    Binary,
    MultiClassE,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliefWeights {
    /// Relevance per feature, the accumulated weight divided by `samples`.
    pub weights: Vec<f64>,
    pub samples: usize,
    pub variant: ReliefVariant,
}

/// Two-class RELIEF. `labels[i]` is true for the positive class.
pub fn relief(data: &FeatureMatrix, labels: &[bool], m: usize, seed: u64) -> Result<ReliefWeights> {
    let classes: Vec<usize> = labels.iter().map(|&b| usize::from(b)).collect();
    if !labels.iter().any(|&b| b) || labels.iter().all(|&b| b) {
        return Err(invalid("RELIEF needs both classes present"));
    }
    run(data, &classes, m, seed, ReliefVariant::Binary)
}

/// Multiclass RELIEF-E: the near miss is the nearest instance of any other class.
pub fn relief_e(
    data: &FeatureMatrix,
    labels: &[usize],
    m: usize,
    seed: u64,
) -> Result<ReliefWeights> {
    if labels.iter().all(|&l| Some(&l) == labels.first()) {
        return Err(invalid("RELIEF-E needs at least two classes"));
    }
    run(data, labels, m, seed, ReliefVariant::MultiClassE)
}

fn run(
    data: &FeatureMatrix,
    labels: &[usize],
    m: usize,
    seed: u64,
    variant: ReliefVariant,
) -> Result<ReliefWeights> {
    let n = data.rows();
    let d = data.width();
    if labels.len() != n {
        return Err(invalid(format!("{} labels for {n} rows", labels.len())));
    }
    if m == 0 {
        return Err(invalid("RELIEF sample count must be at least 1"));
    }
    let mut range = vec![0.0; d];
    for (j, r) in range.iter_mut().enumerate() {
        let col = data.column(j);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        *r = hi - lo;
    }

    let has_partner: Vec<bool> = (0..n)
        .map(|i| (0..n).any(|k| k != i && labels[k] == labels[i]))
        .collect();
    if !has_partner.iter().any(|&p| p) {
        return Err(invalid("no class has two or more instances"));
    }

    let mut neighbours: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut w = vec![0.0; d];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < m {
        let x = rng.random_range(0..n);
        if !has_partner[x] {
            continue;
        }
        let (hit, miss) = *neighbours[x].get_or_insert_with(|| nearest_hit_miss(data, labels, x));
        let (rx, rh, rm) = (data.row(x), data.row(hit), data.row(miss));
        for k in 0..d {
            if range[k] > 0.0 {
                let dh = (rx[k] - rh[k]) / range[k];
                let dm = (rx[k] - rm[k]) / range[k];
                w[k] += dm * dm - dh * dh;
            }
        }
        done += 1;
    }
    for v in &mut w {
        *v /= m as f64;
    }
    Ok(ReliefWeights {
        weights: w,
        samples: m,
        variant,
    })
}

fn nearest_hit_miss(data: &FeatureMatrix, labels: &[usize], x: usize) -> (usize, usize) {
    let rx = data.row(x);
    let mut hit = (f64::INFINITY, usize::MAX);
    let mut miss = (f64::INFINITY, usize::MAX);
    for (i, r) in data.iter_rows().enumerate() {
        if i == x {
            continue;
        }
        let dist: f64 = rx.iter().zip(r).map(|(a, b)| (a - b) * (a - b)).sum();
        let slot = if labels[i] == labels[x] {
            &mut hit
        } else {
            &mut miss
        };
        if dist < slot.0 {
            *slot = (dist, i);
        }
    }
    (hit.1, miss.1)
}

/// Indices of the `k` largest weights, descending, lowest index first on ties.
pub fn select_top(weights: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > weights.len() {
        return Err(invalid(format!("k = {k} outside 1..={}", weights.len())));
    }
    Ok(ranking(weights).into_iter().take(k).collect())
}

/// Every feature index ordered by descending weight.
pub fn ranking(weights: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    idx
}

/// Threshold mode: features whose relevance is at least `tau`, in index order.
pub fn select_by_threshold(weights: &[f64], tau: f64) -> Vec<usize> {
    (0..weights.len()).filter(|&i| weights[i] >= tau).collect()
}
