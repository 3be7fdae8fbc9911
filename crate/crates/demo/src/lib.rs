//! Browser bindings for the interactive demo page: generate a synthetic
//! recording, decompose a span into IMFs, and locate the contraction onset
//! and analysis windows.

use emgkit::emd::{emd, hilbert_track, SiftConfig};
use emgkit::features::{if_stats, time_features, TimeFeatures};
use emgkit::io::{generate_synthetic, SynthConfig};
use emgkit::signal::{
    detect_onset, segment_windows, MovementClass, SampledSignal, Trial, WindowingConfig,
};
use wasm_bindgen::prelude::*;

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// Movement names accepted by [`synth_recording`], in index order.
#[wasm_bindgen]
pub fn movement_names() -> Vec<String> {
    MovementClass::GRASPS
        .iter()
        .map(|c| c.name().to_string())
        .collect()
}

pub fn synth_channel(class_index: usize, seed: u64, channel: usize) -> Result<Vec<f64>, String> {
    let class = *MovementClass::GRASPS
        .get(class_index)
        .ok_or_else(|| format!("movement index {class_index} out of range"))?;
    let cfg = SynthConfig {
        classes: vec![class],
        trials_per_class: 1,
        seed,
        ..SynthConfig::default()
    };
    let trials = generate_synthetic(&cfg).map_err(|e| e.to_string())?;
    let ch = trials[0]
        .channels()
        .get(channel)
        .ok_or_else(|| format!("channel {channel} out of range"))?;
    Ok(ch.samples().to_vec())
}

/// One channel of a synthetic recording at 500 Hz.
#[wasm_bindgen]
pub fn synth_recording(class_index: usize, seed: u32, channel: usize) -> Result<Vec<f64>, JsError> {
    synth_channel(class_index, u64::from(seed), channel).map_err(js)
}

/// Modes of one span with their instantaneous frequency tracks.
#[wasm_bindgen]
pub struct Modes {
    imfs: Vec<Vec<f64>>,
    residual: Vec<f64>,
    inst_freq: Vec<Vec<f64>>,
    if_median: Vec<f64>,
}

#[wasm_bindgen]
impl Modes {
    pub fn count(&self) -> usize {
        self.imfs.len()
    }

    pub fn imf(&self, k: usize) -> Vec<f64> {
        self.imfs.get(k).cloned().unwrap_or_default()
    }

    pub fn residual(&self) -> Vec<f64> {
        self.residual.clone()
    }

    /// Instantaneous frequency of mode `k` in Hz.
    pub fn inst_freq(&self, k: usize) -> Vec<f64> {
        self.inst_freq.get(k).cloned().unwrap_or_default()
    }

    /// Median instantaneous frequency of mode `k` after edge trimming.
    pub fn if_median(&self, k: usize) -> f64 {
        self.if_median.get(k).copied().unwrap_or(f64::NAN)
    }
}

pub fn decompose_span(samples: &[f64], fs: f64, max_modes: usize) -> Result<Modes, String> {
    let cfg = SiftConfig {
        max_modes,
        ..SiftConfig::default()
    };
    let dec = emd(samples, &cfg).map_err(|e| e.to_string())?;
    let mut inst_freq = Vec::new();
    let mut if_median = Vec::new();
    for m in &dec.imfs {
        let t = hilbert_track(m, fs).map_err(|e| e.to_string())?;
        if_median.push(if_stats(&t, 0.1).map_err(|e| e.to_string())?.median);
        inst_freq.push(t.inst_freq);
    }
    Ok(Modes {
        imfs: dec.imfs,
        residual: dec.residual,
        inst_freq,
        if_median,
    })
}

#[wasm_bindgen]
pub fn decompose(samples: &[f64], fs: f64, max_modes: usize) -> Result<Modes, JsError> {
    decompose_span(samples, fs, max_modes).map_err(js)
}

pub fn window_layout(samples: &[f64], fs: f64, threshold: f64) -> Result<Vec<u32>, String> {
    let cfg = WindowingConfig {
        onset_threshold: threshold,
        ..WindowingConfig::default()
    };
    let signal = SampledSignal::new(samples.to_vec(), fs).map_err(|e| e.to_string())?;
    let trial =
        Trial::new(vec![signal], MovementClass::Spherical, "demo", 1).map_err(|e| e.to_string())?;
    let onset = detect_onset(&trial, &cfg).map_err(|e| e.to_string())?;
    let mut out = vec![onset as u32, cfg.window_len as u32];
    out.extend(
        segment_windows(samples.len(), onset, &cfg)
            .iter()
            .map(|w| w.start as u32),
    );
    Ok(out)
}

/// `[onset, window_len, start_1, start_2, …]` for the default windowing with
/// the given onset threshold.
#[wasm_bindgen]
pub fn windows(samples: &[f64], fs: f64, threshold: f64) -> Result<Vec<u32>, JsError> {
    window_layout(samples, fs, threshold).map_err(js)
}

#[wasm_bindgen]
pub fn feature_names() -> Vec<String> {
    TimeFeatures::NAMES.iter().map(|s| s.to_string()).collect()
}

pub fn window_features(samples: &[f64], wamp_threshold: f64) -> Result<Vec<f64>, String> {
    Ok(time_features(samples, wamp_threshold, 0.0)
        .map_err(|e| e.to_string())?
        .to_array()
        .to_vec())
}

/// The eight time-domain features of one window, in [`feature_names`] order.
#[wasm_bindgen]
pub fn features(samples: &[f64], wamp_threshold: f64) -> Result<Vec<f64>, JsError> {
    window_features(samples, wamp_threshold).map_err(js)
}
