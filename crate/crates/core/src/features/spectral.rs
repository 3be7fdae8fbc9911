//! Periodogram and frequency-domain features.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::emd::fft_in_place;
use crate::error::{invalid, Result};

/// One-sided power spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Bin centre frequencies in Hz.
    pub freqs: Vec<f64>,
    pub powers: Vec<f64>,
}

/// `powers[j] = |DFT(x)_j|² / N` and `freqs[j] = j·fs/N` for `j = 0..=N/2`.
/// No window and no detrending.
pub fn power_spectrum(x: &[f64], fs: f64) -> Result<Spectrum> {
    if x.len() < 8 {
        return Err(invalid("power spectrum needs at least 8 samples"));
    }
    let n = x.len();
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_in_place(&mut buf, false);
    let bins = n / 2 + 1;
    Ok(Spectrum {
        freqs: (0..bins).map(|j| j as f64 * fs / n as f64).collect(),
        powers: buf[..bins]
            .iter()
            .map(|c| c.norm_sqr() / n as f64)
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreqFeatures {
    /// Median frequency: first bin where cumulative power reaches half the total.
    pub fmd: f64,
    /// Power-weighted mean frequency.
    pub fmn: f64,
    pub total_power: f64,
    /// Mean power per bin.
    pub mnp: f64,
    /// Share of power within `±n` bins of the peak.
    pub psr: f64,
}

/// Default half-width, in bins, of the peak neighbourhood used for the power
/// spectrum ratio.
pub const DEFAULT_PSR_HALFWIDTH: usize = 10;

pub fn freq_features(spectrum: &Spectrum, peak_halfwidth: usize) -> Result<FreqFeatures> {
    let p = &spectrum.powers;
    let f = &spectrum.freqs;
    if p.is_empty() || p.len() != f.len() {
        return Err(invalid(
            "spectrum must have matching, nonempty frequency and power vectors",
        ));
    }
    let total: f64 = p.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("spectrum has zero total power"));
    }
    let half = 0.5 * total;
    let mut cum = 0.0;
    let mut fmd = f[f.len() - 1];
    for (fj, pj) in f.iter().zip(p) {
        cum += pj;
        if cum >= half {
            fmd = *fj;
            break;
        }
    }
    let fmn = f.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() / total;
    // first maximal bin wins ties
    let peak = p
        .iter()
        .enumerate()
        .fold(0, |best, (j, v)| if *v > p[best] { j } else { best });
    let lo = peak.saturating_sub(peak_halfwidth);
    let hi = (peak + peak_halfwidth).min(p.len() - 1);
    let psr = p[lo..=hi].iter().sum::<f64>() / total;
    Ok(FreqFeatures {
        fmd,
        fmn,
        total_power: total,
        mnp: total / p.len() as f64,
        psr,
    })
}
