//! Analytic signal and instantaneous amplitude/frequency of a single mode.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward or inverse DFT (unnormalized) using a per-thread plan cache.
pub(crate) fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        let plan = if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        };
        plan.process(buf);
    });
}

/// Instantaneous amplitude and frequency of one mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertTrack {
    /// Modulus of the analytic signal.
    pub amplitude: Vec<f64>,
    /// Phase derivative in Hz.
    pub inst_freq: Vec<f64>,
    pub fs: f64,
}

/// Analytic signal by the frequency-domain construction: negative frequencies
/// zeroed, positive ones doubled, DC and Nyquist kept.
pub fn analytic_signal(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let half = n / 2;
    for (k, c) in buf.iter_mut().enumerate() {
        let gain = if k == 0 || (n % 2 == 0 && k == half) {
            1.0
        } else if k <= (n - 1) / 2 {
            2.0
        } else {
            0.0
        };
        *c *= gain;
    }
    fft_in_place(&mut buf, true);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Amplitude and instantaneous frequency of `imf` sampled at `fs` Hz.
///
/// Frequency is the central difference of the unwrapped phase scaled by
/// `fs / 2π`, with one-sided differences at the two endpoints.
pub fn hilbert_track(imf: &[f64], fs: f64) -> Result<HilbertTrack> {
    if imf.len() < 8 {
        return Err(invalid("hilbert_track needs at least 8 samples"));
    }
    if !(fs > 0.0) {
        return Err(invalid("sampling rate must be positive"));
    }
    let z = analytic_signal(imf);
    let amplitude: Vec<f64> = z.iter().map(|c| c.norm()).collect();
    let phase = unwrap(z.iter().map(|c| c.im.atan2(c.re)));
    let n = phase.len();
    let k = fs / (2.0 * PI);
    let mut inst_freq = Vec::with_capacity(n);
    inst_freq.push((phase[1] - phase[0]) * k);
    for i in 1..n - 1 {
        inst_freq.push((phase[i + 1] - phase[i - 1]) * 0.5 * k);
    }
    inst_freq.push((phase[n - 1] - phase[n - 2]) * k);
    Ok(HilbertTrack {
        amplitude,
        inst_freq,
        fs,
    })
}

fn unwrap(wrapped: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for p in wrapped {
        if let Some(q) = prev {
            let mut d = p - q;
            while d > PI {
                offset -= 2.0 * PI;
                d -= 2.0 * PI;
            }
            while d < -PI {
                offset += 2.0 * PI;
                d += 2.0 * PI;
            }
        }
        out.push(p + offset);
        prev = Some(p);
    }
    out
}
