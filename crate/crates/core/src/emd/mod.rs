//! Empirical mode decomposition by envelope-mean sifting.
//!
//! Each intrinsic mode function (IMF) is obtained from the running residual by
//! repeatedly subtracting the mean of the upper and lower cubic-spline
//! envelopes. Sifting uses a fixed number of passes per mode, and extraction
//! stops at a user-set mode count or once the residual no longer oscillates.
//! Because every emitted mode is subtracted from the residual, the modes plus
//! the final residual always add back up to the input.

mod hilbert;
mod spline;

pub(crate) use hilbert::fft_in_place;
pub use hilbert::{analytic_signal, hilbert_track, HilbertTrack};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use spline::natural_spline_on_grid;

/// How envelopes are continued past the signal ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryPolicy {
    /// Reflect the two extrema nearest each end across that end sample.
    #[default]
    MirrorExtrema,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SiftConfig {
    pub max_modes: usize,
    pub fixed_sift_iters: usize,
    pub boundary_policy: BoundaryPolicy,
}

impl Default for SiftConfig {
    fn default() -> Self {
        Self {
            max_modes: 3,
            fixed_sift_iters: 10,
            boundary_policy: BoundaryPolicy::MirrorExtrema,
        }
    }
}

impl SiftConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_modes == 0 {
            return Err(invalid("max_modes must be at least 1"));
        }
        if self.fixed_sift_iters == 0 {
            return Err(invalid("fixed_sift_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Ordered modes plus the final residual of one signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub imfs: Vec<Vec<f64>>,
    pub residual: Vec<f64>,
    pub source_len: usize,
}

impl Decomposition {
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residual.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf) {
                *o += v;
            }
        }
        out
    }

    /// Max-norm of `x - (Σ imfs + residual)`.
    pub fn reconstruction_error(&self, x: &[f64]) -> f64 {
        self.reconstruct()
            .iter()
            .zip(x)
            .map(|(r, v)| (r - v).abs())
            .fold(0.0, f64::max)
    }
}

/// Indices of strict local maxima and minima.
///
/// A flat run bounded by lower (higher) neighbours on both sides is a single
/// maximum (minimum) reported at the run's midpoint. Endpoints are never
/// extrema.
pub fn find_extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let n = x.len();
    if n < 3 {
        return (maxima, minima);
    }
    let mut i = 1;
    while i < n - 1 {
        let left = x[i - 1];
        let v = x[i];
        if v == left {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < n && x[j + 1] == v {
            j += 1;
        }
        if j + 1 >= n {
            break;
        }
        let right = x[j + 1];
        let mid = (i + j) / 2;
        if v > left && v > right {
            maxima.push(mid);
        } else if v < left && v < right {
            minima.push(mid);
        }
        i = j + 1;
    }
    (maxima, minima)
}

fn mirrored_knots(idx: &[usize], x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let last = (n - 1) as f64;
    let mut ts = Vec::with_capacity(idx.len() + 4);
    let mut vs = Vec::with_capacity(idx.len() + 4);
    for &i in idx.iter().take(2).rev() {
        ts.push(-(i as f64));
        vs.push(x[i]);
    }
    for &i in idx {
        ts.push(i as f64);
        vs.push(x[i]);
    }
    for &i in idx.iter().rev().take(2) {
        ts.push(2.0 * last - i as f64);
        vs.push(x[i]);
    }
    (ts, vs)
}

/// Mean of the upper and lower envelopes, `m(t) = (e_min(t) + e_max(t)) / 2`.
///
/// Envelopes are natural cubic splines through the maxima (minima), extended
/// by mirroring the two extrema nearest each boundary. Fails with
/// [`Error::Monotonic`] when the signal has no maximum or no minimum.
pub fn envelope_mean(x: &[f64]) -> Result<Vec<f64>> {
    let (maxima, minima) = find_extrema(x);
    envelope_mean_from(x, &maxima, &minima)
}

fn envelope_mean_from(x: &[f64], maxima: &[usize], minima: &[usize]) -> Result<Vec<f64>> {
    if maxima.is_empty() || minima.is_empty() {
        return Err(Error::Monotonic(format!(
            "{} maxima and {} minima",
            maxima.len(),
            minima.len()
        )));
    }
    let n = x.len();
    let (tu, vu) = mirrored_knots(maxima, x);
    let (tl, vl) = mirrored_knots(minima, x);
    let upper = natural_spline_on_grid(&tu, &vu, n);
    let lower = natural_spline_on_grid(&tl, &vl, n);
    Ok(upper
        .iter()
        .zip(&lower)
        .map(|(u, l)| 0.5 * (u + l))
        .collect())
}

/// Extracts one mode by applying `d ← d − envelope_mean(d)` exactly
/// `fixed_sift_iters` times.
///
/// Sifting stops early, keeping the current `d`, if a later pass loses all
/// maxima or minima. A first pass on a non-oscillating input is an error.
pub fn sift_one_imf(x: &[f64], cfg: &SiftConfig) -> Result<Vec<f64>> {
    let mut d = x.to_vec();
    for pass in 0..cfg.fixed_sift_iters {
        match envelope_mean(&d) {
            Ok(m) => d.iter_mut().zip(&m).for_each(|(v, m)| *v -= m),
            Err(e @ Error::Monotonic(_)) if pass == 0 => return Err(e),
            Err(Error::Monotonic(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(d)
}

/// Decomposes `x` into at most `max_modes` IMFs and a residual.
///
/// Extraction stops early once the residual has fewer than two maxima or two
/// minima, which includes every monotone residual.
pub fn emd(x: &[f64], cfg: &SiftConfig) -> Result<Decomposition> {
    if x.len() < 4 {
        return Err(invalid("emd needs at least 4 samples"));
    }
    cfg.validate()?;
    let mut residual = x.to_vec();
    let mut imfs = Vec::new();
    while imfs.len() < cfg.max_modes {
        let (maxima, minima) = find_extrema(&residual);
        if maxima.len() < 2 || minima.len() < 2 {
            break;
        }
        let imf = sift_one_imf(&residual, cfg)?;
        residual.iter_mut().zip(&imf).for_each(|(r, v)| *r -= v);
        imfs.push(imf);
    }
    Ok(Decomposition {
        imfs,
        residual,
        source_len: x.len(),
    })
}

/// Outcome of the two IMF conditions with the quantities behind them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImfCheck {
    pub is_imf: bool,
    pub extrema: usize,
    pub zero_crossings: usize,
    /// Largest interior |envelope mean| relative to the signal's range.
    pub envelope_mean_ratio: f64,
}

/// Relative envelope-mean tolerance used by [`is_imf`].
pub const IMF_ENVELOPE_TOLERANCE: f64 = 0.05;

pub(crate) fn sign_changes(x: &[f64]) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for &v in x {
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Checks the IMF conditions: extrema and zero-crossing counts differ by at
/// most one, and the envelope mean stays within 5% of the signal range away
/// from the edges (10% trimmed per side).
pub fn is_imf(x: &[f64]) -> ImfCheck {
    let (maxima, minima) = find_extrema(x);
    let extrema = maxima.len() + minima.len();
    let zero_crossings = sign_changes(x);
    let range = x.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - x.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = match envelope_mean_from(x, &maxima, &minima) {
        Ok(m) if range > 0.0 => {
            let cut = m.len() / 10;
            m[cut..m.len() - cut]
                .iter()
                .map(|v| v.abs())
                .fold(0.0, f64::max)
                / range
        }
        _ => f64::INFINITY,
    };
    let counts_ok = extrema.abs_diff(zero_crossings) <= 1;
    ImfCheck {
        is_imf: counts_ok && ratio <= IMF_ENVELOPE_TOLERANCE,
        extrema,
        zero_crossings,
        envelope_mean_ratio: ratio,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tone(freq: f64, amp: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| amp * (2.0 * PI * freq * i as f64 / 500.0).sin())
            .collect()
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma) * (x - ma);
            sbb += (y - mb) * (y - mb);
        }
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn extrema_of_single_oscillation() {
        assert_eq!(
            find_extrema(&[0.0, 1.0, 0.0, -1.0, 0.0]),
            (vec![1], vec![3])
        );
    }

    #[test]
    fn ramp_has_no_extrema() {
        let x: Vec<f64> = (0..20).map(f64::from).collect();
        assert_eq!(find_extrema(&x), (vec![], vec![]));
    }

    #[test]
    fn plateau_reports_midpoint_once() {
        let x = [0.0, 2.0, 2.0, 2.0, 2.0, 0.0, -1.0, -1.0, 0.0];
        assert_eq!(find_extrema(&x), (vec![2], vec![6]));
        // a shelf inside a rise is not an extremum
        assert_eq!(find_extrema(&[0.0, 1.0, 1.0, 2.0]), (vec![], vec![]));
    }

    #[test]
    fn sine_extrema_match_first_difference_sign_changes() {
        let x = tone(5.0, 1.0, 500);
        let (maxima, minima) = find_extrema(&x);
        let mut up_to_down = 0;
        let mut down_to_up = 0;
        for i in 1..x.len() - 1 {
            let a = x[i] - x[i - 1];
            let b = x[i + 1] - x[i];
            if a > 0.0 && b < 0.0 {
                up_to_down += 1;
            }
            if a < 0.0 && b > 0.0 {
                down_to_up += 1;
            }
        }
        assert_eq!(maxima.len(), up_to_down);
        assert_eq!(minima.len(), down_to_up);
        assert_eq!((maxima.len(), minima.len()), (5, 5));
    }

    #[test]
    fn envelope_mean_of_sine_is_small() {
        let x = tone(10.0, 1.0, 500);
        let m = envelope_mean(&x).unwrap();
        for v in &m[50..450] {
            assert!(v.abs() < 0.02, "{v}");
        }
    }

    #[test]
    fn envelope_mean_shifts_with_constant() {
        let x: Vec<f64> = tone(7.0, 1.0, 300)
            .iter()
            .zip(tone(31.0, 0.3, 300))
            .map(|(a, b)| a + b)
            .collect();
        let y: Vec<f64> = x.iter().map(|v| v + 4.25).collect();
        let mx = envelope_mean(&x).unwrap();
        let my = envelope_mean(&y).unwrap();
        for (a, b) in mx.iter().zip(&my) {
            assert!((b - a - 4.25).abs() < 1e-12);
        }
    }

    #[test]
    fn envelope_mean_tracks_slow_tone() {
        let slow = tone(5.0, 0.5, 500);
        let x: Vec<f64> = tone(50.0, 1.0, 500)
            .iter()
            .zip(&slow)
            .map(|(a, b)| a + b)
            .collect();
        let m = envelope_mean(&x).unwrap();
        assert!(corr(&m[50..450], &slow[50..450]) > 0.95);
    }

    #[test]
    fn envelope_mean_requires_oscillation() {
        let x: Vec<f64> = (0..30).map(|i| (i as f64).powi(2)).collect();
        assert!(matches!(envelope_mean(&x), Err(Error::Monotonic(_))));
        assert!(matches!(
            sift_one_imf(&x, &SiftConfig::default()),
            Err(Error::Monotonic(_))
        ));
    }

    #[test]
    fn sine_is_a_sifting_fixed_point() {
        let x = tone(10.0, 1.0, 500);
        let d = sift_one_imf(&x, &SiftConfig::default()).unwrap();
        let num: f64 = d.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = x.iter().map(|v| v * v).sum();
        assert!((num / den).sqrt() < 0.01);
    }

    #[test]
    fn single_pass_is_signal_minus_mean() {
        let x: Vec<f64> = tone(9.0, 1.0, 200)
            .iter()
            .zip(tone(41.0, 0.4, 200))
            .map(|(a, b)| a + b)
            .collect();
        let cfg = SiftConfig {
            fixed_sift_iters: 1,
            ..Default::default()
        };
        let d = sift_one_imf(&x, &cfg).unwrap();
        let m = envelope_mean(&x).unwrap();
        for i in 0..x.len() {
            assert_eq!(d[i], x[i] - m[i]);
        }
    }

    #[test]
    fn first_imf_is_fast_tone() {
        let fast = tone(50.0, 1.0, 500);
        let x: Vec<f64> = fast
            .iter()
            .zip(tone(5.0, 0.5, 500))
            .map(|(a, b)| a + b)
            .collect();
        let imf = sift_one_imf(&x, &SiftConfig::default()).unwrap();
        assert!(corr(&imf, &fast) > 0.95);
    }

    #[test]
    fn ramp_has_no_modes() {
        let x: Vec<f64> = (0..100).map(|i| 0.3 * i as f64 - 2.0).collect();
        let d = emd(&x, &SiftConfig::default()).unwrap();
        assert!(d.imfs.is_empty());
        assert_eq!(d.residual, x);
    }

    #[test]
    fn two_tones_are_separated() {
        let fast = tone(50.0, 1.0, 500);
        let slow = tone(5.0, 0.5, 500);
        let x: Vec<f64> = fast.iter().zip(&slow).map(|(a, b)| a + b).collect();
        let cfg = SiftConfig {
            max_modes: 2,
            ..Default::default()
        };
        let d = emd(&x, &cfg).unwrap();
        assert_eq!(d.imfs.len(), 2);
        let rel = |a: &[f64], b: &[f64]| {
            let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
            let den: f64 = b.iter().map(|y| y * y).sum();
            (num / den).sqrt()
        };
        assert!(rel(&d.imfs[0], &fast) < 0.15, "{}", rel(&d.imfs[0], &fast));
        assert!(rel(&d.imfs[1], &slow) < 0.15, "{}", rel(&d.imfs[1], &slow));
    }

    #[test]
    fn is_imf_cases() {
        assert!(is_imf(&tone(10.0, 1.0, 500)).is_imf);
        let shifted: Vec<f64> = tone(10.0, 1.0, 500).iter().map(|v| v + 5.0).collect();
        assert!(!is_imf(&shifted).is_imf);
        let ramp: Vec<f64> = (0..100).map(f64::from).collect();
        assert!(!is_imf(&ramp).is_imf);
    }

    #[test]
    fn emd_rejects_tiny_input() {
        assert!(emd(&[1.0, 2.0, 1.0], &SiftConfig::default()).is_err());
    }
}
