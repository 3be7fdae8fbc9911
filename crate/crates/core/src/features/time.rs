//! Time-domain features of a single window.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// The eight per-signal statistics of the per-window feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeFeatures {
    /// `(1/N) Σ |x_k|`
    pub mean_abs: f64,
    /// `(1/(N-1)) Σ x_k²`: power about zero, the mean is not removed.
    pub variance: f64,
    pub zero_crossings: f64,
    pub slope_sign_changes: f64,
    pub waveform_length: f64,
    pub wamp: f64,
    pub kurtosis: f64,
    pub skewness: f64,
}

impl TimeFeatures {
    pub const NAMES: [&'static str; 8] = [
        "mean_abs",
        "variance",
        "zero_crossings",
        "slope_sign_changes",
        "waveform_length",
        "wamp",
        "kurtosis",
        "skewness",
    ];

    pub const ZERO: TimeFeatures = TimeFeatures {
        mean_abs: 0.0,
        variance: 0.0,
        zero_crossings: 0.0,
        slope_sign_changes: 0.0,
        waveform_length: 0.0,
        wamp: 0.0,
        kurtosis: 0.0,
        skewness: 0.0,
    };

    /// Values in [`Self::NAMES`] order.
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.mean_abs,
            self.variance,
            self.zero_crossings,
            self.slope_sign_changes,
            self.waveform_length,
            self.wamp,
            self.kurtosis,
            self.skewness,
        ]
    }
}

/// Third and fourth standardized central moments with population variance.
/// A constant input yields `(0, 0)`.
pub(crate) fn skew_kurt(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return (0.0, 0.0);
    }
    (m3 / m2.powf(1.5), m4 / (m2 * m2))
}

pub fn time_features(x: &[f64], wamp_threshold: f64, zc_threshold: f64) -> Result<TimeFeatures> {
    if x.len() < 3 {
        return Err(invalid("time features need at least 3 samples"));
    }
    let n = x.len() as f64;
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    for &v in x {
        abs_sum += v.abs();
        sq_sum += v * v;
    }
    let mut zc = 0usize;
    let mut wl = 0.0;
    let mut wamp = 0usize;
    for w in x.windows(2) {
        let step = (w[1] - w[0]).abs();
        if w[0] * w[1] < 0.0 && step > zc_threshold {
            zc += 1;
        }
        wl += step;
        if step > wamp_threshold {
            wamp += 1;
        }
    }
    let ssc = x
        .windows(3)
        .filter(|w| (w[1] > w[0] && w[1] > w[2]) || (w[1] < w[0] && w[1] < w[2]))
        .count();
    let (skewness, kurtosis) = skew_kurt(x);
    Ok(TimeFeatures {
        mean_abs: abs_sum / n,
        variance: sq_sum / (n - 1.0),
        zero_crossings: zc as f64,
        slope_sign_changes: ssc as f64,
        waveform_length: wl,
        wamp: wamp as f64,
        kurtosis,
        skewness,
    })
}

/// Root mean square, `sqrt((1/N) Σ x²)`. Zero for an empty slice.
pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// Biased autocorrelation `r_k = (1/N) Σ x_n x_{n+k}` for lags `0..=max_lag`.
pub(crate) fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    (0..=max_lag)
        .map(|k| {
            x[..n - k]
                .iter()
                .zip(&x[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Autoregressive coefficients `a_1..a_p` of `x_n = -Σ a_i x_{n-i} + w_n`,
/// fitted by the Yule-Walker equations solved with Levinson-Durbin.
pub fn ar_coeffs(x: &[f64], order: usize) -> Result<Vec<f64>> {
    if order == 0 || x.len() <= order {
        return Err(invalid(format!(
            "AR order {order} needs 1 <= order < signal length {}",
            x.len()
        )));
    }
    let r = autocorrelation(x, order);
    if r[0] <= 0.0 {
        return Err(invalid("AR fit of a zero-variance signal"));
    }
    let mut a: Vec<f64> = Vec::with_capacity(order);
    let mut err = r[0];
    for m in 1..=order {
        let acc = r[m]
            + a.iter()
                .enumerate()
                .map(|(i, ai)| ai * r[m - 1 - i])
                .sum::<f64>();
        let k = -acc / err;
        let prev = a.clone();
        for i in 0..a.len() {
            a[i] += k * prev[m - 2 - i];
        }
        a.push(k);
        err *= 1.0 - k * k;
        if err <= 0.0 {
            // perfectly predictable; higher-order terms are zero
            a.resize(order, 0.0);
            break;
        }
    }
    Ok(a)
}
