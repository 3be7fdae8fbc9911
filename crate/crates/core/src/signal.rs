//! Trial representation, muscle-onset detection and overlapping windowing.
//!
//! A [`Trial`] is one labelled multi-channel recording. Onset detection runs a
//! sliding sum of absolute values (IEMG) over each channel and takes the
//! earliest threshold crossing across channels; segmentation then lays
//! fixed-length windows from the onset up to a trimmed signal end.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// One channel of uniformly sampled data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    samples: Vec<f64>,
    fs: f64,
}

impl SampledSignal {
    pub fn new(samples: Vec<f64>, fs: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("signal has no samples"));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(invalid(format!("sampling rate must be positive, got {fs}")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!("sample {i} is not finite")));
        }
        Ok(Self { samples, fs })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// The hand postures recorded in the experiments.
///
/// Declaration order is the canonical class order used for tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MovementClass {
    Spherical,
    Tip,
    Palmar,
    Lateral,
    Cylindrical,
    Hook,
    Open,
    Close,
}

impl MovementClass {
    pub const ALL: [MovementClass; 8] = [
        MovementClass::Spherical,
        MovementClass::Tip,
        MovementClass::Palmar,
        MovementClass::Lateral,
        MovementClass::Cylindrical,
        MovementClass::Hook,
        MovementClass::Open,
        MovementClass::Close,
    ];

    /// The six grasps; excludes the open/close postures.
    pub const GRASPS: [MovementClass; 6] = [
        MovementClass::Spherical,
        MovementClass::Tip,
        MovementClass::Palmar,
        MovementClass::Lateral,
        MovementClass::Cylindrical,
        MovementClass::Hook,
    ];

    /// Column order of the per-movement result tables.
    pub const TABLE_ORDER: [MovementClass; 8] = [
        MovementClass::Spherical,
        MovementClass::Hook,
        MovementClass::Tip,
        MovementClass::Lateral,
        MovementClass::Palmar,
        MovementClass::Cylindrical,
        MovementClass::Open,
        MovementClass::Close,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MovementClass::Spherical => "spherical",
            MovementClass::Tip => "tip",
            MovementClass::Palmar => "palmar",
            MovementClass::Lateral => "lateral",
            MovementClass::Cylindrical => "cylindrical",
            MovementClass::Hook => "hook",
            MovementClass::Open => "open",
            MovementClass::Close => "close",
        }
    }

    /// One-letter code used in result tables.
    pub fn code(self) -> &'static str {
        match self {
            MovementClass::Spherical => "S",
            MovementClass::Tip => "T",
            MovementClass::Palmar => "P",
            MovementClass::Lateral => "L",
            MovementClass::Cylindrical => "C",
            MovementClass::Hook => "H",
            MovementClass::Open => "O",
            MovementClass::Close => "X",
        }
    }
}

impl fmt::Display for MovementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MovementClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        MovementClass::ALL
            .iter()
            .copied()
            .find(|c| c.name() == lower || c.code().eq_ignore_ascii_case(&lower))
            .ok_or_else(|| invalid(format!("unknown movement class `{s}`")))
    }
}

/// Identity of a trial; the unit of cross-validation splitting.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TrialKey {
    pub subject: String,
    pub class: MovementClass,
    pub index: usize,
}

impl fmt::Display for TrialKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.subject, self.class, self.index)
    }
}

/// One labelled multi-channel recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    channels: Vec<SampledSignal>,
    pub label: MovementClass,
    pub subject_id: String,
    pub trial_index: usize,
}

impl Trial {
    pub fn new(
        channels: Vec<SampledSignal>,
        label: MovementClass,
        subject_id: impl Into<String>,
        trial_index: usize,
    ) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| invalid("trial needs at least one channel"))?;
        let (len, fs) = (first.len(), first.fs());
        if channels.iter().any(|c| c.len() != len || c.fs() != fs) {
            return Err(invalid(
                "all channels of a trial must share length and sampling rate",
            ));
        }
        Ok(Self {
            channels,
            label,
            subject_id: subject_id.into(),
            trial_index,
        })
    }

    pub fn channels(&self) -> &[SampledSignal] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn fs(&self) -> f64 {
        self.channels[0].fs()
    }

    pub fn key(&self) -> TrialKey {
        TrialKey {
            subject: self.subject_id.clone(),
            class: self.label,
            index: self.trial_index,
        }
    }
}

/// Onset and segmentation constants, all in samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowingConfig {
    pub window_len: usize,
    pub step: usize,
    pub tail_trim: usize,
    pub onset_window: usize,
    pub onset_threshold: f64,
}

impl Default for WindowingConfig {
    /// 300 ms windows with a 30 ms step at 500 Hz; 40 ms onset window.
    fn default() -> Self {
        Self {
            window_len: 150,
            step: 15,
            tail_trim: 500,
            onset_window: 20,
            onset_threshold: 10.0,
        }
    }
}

impl WindowingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len == 0 {
            return Err(invalid("window_len must be positive"));
        }
        if self.step == 0 || self.step > self.window_len {
            return Err(invalid("step must lie in 1..=window_len"));
        }
        if self.onset_window == 0 {
            return Err(invalid("onset_window must be positive"));
        }
        if !(self.onset_threshold.is_finite() && self.onset_threshold >= 0.0) {
            return Err(invalid("onset_threshold must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Sliding sum of absolute values: element `i` covers `samples[i..i + onset_window]`.
pub fn iemg_profile(samples: &[f64], onset_window: usize) -> Result<Vec<f64>> {
    if onset_window == 0 || onset_window > samples.len() {
        return Err(invalid(format!(
            "onset window {onset_window} does not fit a signal of {} samples",
            samples.len()
        )));
    }
    // Direct sums per position keep the result exact for integer-valued data
    // and free of running-sum drift.
    Ok(samples
        .windows(onset_window)
        .map(|w| w.iter().map(|x| x.abs()).sum())
        .collect())
}

/// Earliest sample, over all channels, at which the IEMG profile exceeds the
/// threshold. Returns the trial length when no channel crosses.
pub fn detect_onset(trial: &Trial, cfg: &WindowingConfig) -> Result<usize> {
    let mut onset = trial.len();
    for channel in trial.channels() {
        let profile = iemg_profile(channel.samples(), cfg.onset_window)?;
        if let Some(i) = profile.iter().position(|&v| v > cfg.onset_threshold) {
            onset = onset.min(i);
        }
    }
    Ok(onset)
}

/// A window expressed as coordinates into its source signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpan {
    pub start: usize,
    pub len: usize,
}

impl WindowSpan {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn slice<'a>(&self, samples: &'a [f64]) -> &'a [f64] {
        &samples[self.start..self.end()]
    }
}

/// Windows of `window_len` starting at `onset` and advancing by `step` while the
/// whole window fits before `len - tail_trim`. An empty list means nothing fits.
pub fn segment_windows(signal_len: usize, onset: usize, cfg: &WindowingConfig) -> Vec<WindowSpan> {
    let limit = signal_len.saturating_sub(cfg.tail_trim);
    if cfg.window_len == 0 || cfg.step == 0 {
        return Vec::new();
    }
    (onset..)
        .step_by(cfg.step)
        .take_while(|start| start + cfg.window_len <= limit)
        .map(|start| WindowSpan {
            start,
            len: cfg.window_len,
        })
        .collect()
}
