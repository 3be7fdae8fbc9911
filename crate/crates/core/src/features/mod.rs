//! Feature computation and assembly of per-window feature vectors.
//!
//! Three vector layouts are supported, identified by [`SchemaKind`]:
//!
//! - `PartA`: 49 values per channel. Eight time-domain statistics of the raw
//!   window, the median/std/kurtosis of the instantaneous frequency of the
//!   first three IMFs, then eight statistics of each IMF and of the residual.
//! - `RawOnly`: the first eight values of each `PartA` channel block.
//! - `Embedded`: six cheap statistics per channel over the whole recording.

mod spectral;
mod time;

pub use spectral::{freq_features, power_spectrum, FreqFeatures, Spectrum, DEFAULT_PSR_HALFWIDTH};
pub use time::{ar_coeffs, rms, time_features, TimeFeatures};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::emd::{emd, hilbert_track, HilbertTrack, SiftConfig};
use crate::error::{invalid, Error, Result};
use crate::signal::{
    detect_onset, segment_windows, MovementClass, Trial, TrialKey, WindowingConfig,
};

/// Median (lower middle), sample standard deviation and kurtosis of an
/// instantaneous-frequency sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfStats {
    pub median: f64,
    pub std: f64,
    pub kurtosis: f64,
}

/// Statistics of `track.inst_freq` after dropping `edge_trim_fraction` of the
/// samples at each end.
pub fn if_stats(track: &HilbertTrack, edge_trim_fraction: f64) -> Result<IfStats> {
    if !(0.0..0.5).contains(&edge_trim_fraction) {
        return Err(invalid("edge trim fraction must lie in [0, 0.5)"));
    }
    let f = &track.inst_freq;
    let cut = (f.len() as f64 * edge_trim_fraction).floor() as usize;
    let kept = &f[cut..f.len() - cut];
    if kept.is_empty() {
        return Err(invalid("no samples left after edge trimming"));
    }
    let mut sorted = kept.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[(sorted.len() - 1) / 2];
    let n = kept.len() as f64;
    let mean = kept.iter().sum::<f64>() / n;
    let ss: f64 = kept.iter().map(|v| (v - mean) * (v - mean)).sum();
    let std = if kept.len() > 1 {
        (ss / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let (_, kurtosis) = time::skew_kurt(kept);
    Ok(IfStats {
        median,
        std,
        kurtosis,
    })
}

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaKind {
    #[default]
    PartA,
    RawOnly,
    Embedded,
}

impl SchemaKind {
    pub fn per_channel(self) -> usize {
        match self {
            SchemaKind::PartA => 49,
            SchemaKind::RawOnly => 8,
            SchemaKind::Embedded => 6,
        }
    }
}

/// Where a slot's value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlotSource {
    Raw,
    Imf(usize),
    Residual,
    IfOfImf(usize),
}

impl fmt::Display for SlotSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotSource::Raw => f.write_str("raw"),
            SlotSource::Imf(k) => write!(f, "imf{k}"),
            SlotSource::Residual => f.write_str("residual"),
            SlotSource::IfOfImf(k) => write!(f, "if_imf{k}"),
        }
    }
}

const IF_STAT_NAMES: [&str; 3] = ["median", "std", "kurtosis"];
const EMBEDDED_NAMES: [&str; 6] = [
    "max",
    "mean_abs",
    "variance_div100",
    "waveform_length_div10",
    "wamp",
    "std",
];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSlot {
    /// Zero-based channel.
    pub channel: usize,
    pub source: SlotSource,
    pub statistic: String,
}

impl FeatureSlot {
    fn new(channel: usize, source: SlotSource, statistic: &str) -> Self {
        Self {
            channel,
            source,
            statistic: statistic.to_string(),
        }
    }

    /// `ch{1-based channel}.{source}.{statistic}`
    pub fn name(&self) -> String {
        format!("ch{}.{}.{}", self.channel + 1, self.source, self.statistic)
    }

    /// Inverse of [`FeatureSlot::name`]; unknown names are a schema mismatch.
    pub fn parse(name: &str) -> Result<Self> {
        let bad = || Error::SchemaMismatch(format!("unknown feature column `{name}`"));
        let mut parts = name.split('.');
        let (ch, src, stat) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c), None) => (a, b, c),
            _ => return Err(bad()),
        };
        let channel: usize = ch
            .strip_prefix("ch")
            .and_then(|c| c.parse().ok())
            .filter(|c| *c >= 1)
            .ok_or_else(bad)?;
        let index = |s: &str| s.parse::<usize>().ok().filter(|k| *k >= 1);
        let source = if src == "raw" {
            SlotSource::Raw
        } else if src == "residual" {
            SlotSource::Residual
        } else if let Some(k) = src.strip_prefix("if_imf").and_then(index) {
            SlotSource::IfOfImf(k)
        } else if let Some(k) = src.strip_prefix("imf").and_then(index) {
            SlotSource::Imf(k)
        } else {
            return Err(bad());
        };
        let known = match source {
            SlotSource::IfOfImf(_) => IF_STAT_NAMES.contains(&stat),
            SlotSource::Raw => {
                TimeFeatures::NAMES.contains(&stat) || EMBEDDED_NAMES.contains(&stat)
            }
            _ => TimeFeatures::NAMES.contains(&stat),
        };
        if !known {
            return Err(bad());
        }
        Ok(Self::new(channel - 1, source, stat))
    }
}

/// Ordered, named feature slots for a given channel count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub kind: Option<SchemaKind>,
    pub channels: usize,
    pub slots: Vec<FeatureSlot>,
}

impl FeatureSchema {
    pub fn new(kind: SchemaKind, channels: usize) -> Self {
        let mut slots = Vec::with_capacity(kind.per_channel() * channels);
        for ch in 0..channels {
            match kind {
                SchemaKind::PartA | SchemaKind::RawOnly => {
                    for s in TimeFeatures::NAMES {
                        slots.push(FeatureSlot::new(ch, SlotSource::Raw, s));
                    }
                    if kind == SchemaKind::RawOnly {
                        continue;
                    }
                    for s in IF_STAT_NAMES {
                        for k in 1..=3 {
                            slots.push(FeatureSlot::new(ch, SlotSource::IfOfImf(k), s));
                        }
                    }
                    for src in [
                        SlotSource::Imf(1),
                        SlotSource::Imf(2),
                        SlotSource::Imf(3),
                        SlotSource::Residual,
                    ] {
                        for s in TimeFeatures::NAMES {
                            slots.push(FeatureSlot::new(ch, src, s));
                        }
                    }
                }
                SchemaKind::Embedded => {
                    for s in EMBEDDED_NAMES {
                        slots.push(FeatureSlot::new(ch, SlotSource::Raw, s));
                    }
                }
            }
        }
        Self {
            kind: Some(kind),
            channels,
            slots,
        }
    }

    /// Builds a schema from column names, recognising the standard layouts.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let slots = names
            .iter()
            .map(|n| FeatureSlot::parse(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let mut seen = std::collections::HashSet::new();
        for s in &slots {
            if !seen.insert(s.name()) {
                return Err(Error::SchemaMismatch(format!(
                    "duplicate column `{}`",
                    s.name()
                )));
            }
        }
        let channels = slots.iter().map(|s| s.channel + 1).max().unwrap_or(0);
        let kind = [SchemaKind::PartA, SchemaKind::RawOnly, SchemaKind::Embedded]
            .into_iter()
            .find(|k| FeatureSchema::new(*k, channels).slots == slots);
        Ok(Self {
            kind,
            channels,
            slots,
        })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.slots.iter().map(FeatureSlot::name).collect()
    }
}

/// One row of a feature dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: MovementClass,
    pub trial: TrialKey,
    pub window_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDataset {
    pub schema: FeatureSchema,
    pub vectors: Vec<FeatureVector>,
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

/// Parameters of feature extraction that are not part of EMD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    pub schema: SchemaKind,
    pub wamp_threshold: f64,
    pub zc_threshold: f64,
    /// Fraction of instantaneous-frequency samples dropped at each end.
    pub if_edge_trim: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            schema: SchemaKind::PartA,
            wamp_threshold: 10.0,
            zc_threshold: 0.0,
            if_edge_trim: 0.1,
        }
    }
}

fn check_channels(channels: &[&[f64]]) -> Result<usize> {
    let first = channels
        .first()
        .ok_or_else(|| invalid("no channels supplied"))?;
    let len = first.len();
    if channels.iter().any(|c| c.len() != len) {
        return Err(invalid("channels of one window must share a length"));
    }
    Ok(len)
}

fn part_a_channel(
    x: &[f64],
    fs: f64,
    cfg: &FeatureConfig,
    sift: &SiftConfig,
    out: &mut Vec<f64>,
) -> Result<()> {
    let tf = |s: &[f64]| time_features(s, cfg.wamp_threshold, cfg.zc_threshold);
    out.extend(tf(x)?.to_array());
    let dec = emd(x, sift)?;
    let mut if_block = [0.0; 9];
    for (k, imf) in dec.imfs.iter().take(3).enumerate() {
        let st = if_stats(&hilbert_track(imf, fs)?, cfg.if_edge_trim)?;
        if_block[k] = st.median;
        if_block[3 + k] = st.std;
        if_block[6 + k] = st.kurtosis;
    }
    out.extend(if_block);
    for k in 0..3 {
        match dec.imfs.get(k) {
            Some(imf) => out.extend(tf(imf)?.to_array()),
            None => out.extend([0.0; 8]),
        }
    }
    out.extend(tf(&dec.residual)?.to_array());
    Ok(())
}

/// The 49-per-channel window vector; modes missing because EMD stopped early
/// are zero-filled.
pub fn assemble_part_a(
    channels: &[&[f64]],
    fs: f64,
    cfg: &FeatureConfig,
    sift: &SiftConfig,
) -> Result<Vec<f64>> {
    let len = check_channels(channels)?;
    if len < 8 {
        return Err(invalid("windows must hold at least 8 samples"));
    }
    let mut out = Vec::with_capacity(49 * channels.len());
    for x in channels {
        part_a_channel(x, fs, cfg, sift, &mut out)?;
    }
    Ok(out)
}

/// Eight raw time-domain statistics per channel.
pub fn assemble_raw_only(channels: &[&[f64]], cfg: &FeatureConfig) -> Result<Vec<f64>> {
    check_channels(channels)?;
    let mut out = Vec::with_capacity(8 * channels.len());
    for x in channels {
        out.extend(time_features(x, cfg.wamp_threshold, cfg.zc_threshold)?.to_array());
    }
    Ok(out)
}

/// Per channel: `[max, mean |x|, var/100, WL/10, WAMP, std]`, where `var` is
/// the mean-removed sample variance and `std = sqrt(var)`.
pub fn assemble_embedded(channels: &[&[f64]], wamp_threshold: f64) -> Result<Vec<f64>> {
    check_channels(channels)?;
    let mut out = Vec::with_capacity(6 * channels.len());
    for x in channels {
        if x.len() < 2 {
            return Err(invalid("embedded features need at least 2 samples"));
        }
        let n = x.len() as f64;
        let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean_abs = x.iter().map(|v| v.abs()).sum::<f64>() / n;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        let mut wl = 0.0;
        let mut wamp = 0usize;
        for w in x.windows(2) {
            let d = (w[1] - w[0]).abs();
            wl += d;
            if d > wamp_threshold {
                wamp += 1;
            }
        }
        out.extend([
            max,
            mean_abs,
            var / 100.0,
            wl / 10.0,
            wamp as f64,
            var.sqrt(),
        ]);
    }
    Ok(out)
}

/// Runs onset detection, windowing and the configured assembly over a trial.
///
/// Embedded vectors cover the whole recording and yield one vector per trial.
pub fn extract_trial(
    trial: &Trial,
    windowing: &WindowingConfig,
    cfg: &FeatureConfig,
    sift: &SiftConfig,
) -> Result<Vec<FeatureVector>> {
    let key = trial.key();
    let samples: Vec<&[f64]> = trial.channels().iter().map(|c| c.samples()).collect();
    if cfg.schema == SchemaKind::Embedded {
        return Ok(vec![FeatureVector {
            values: assemble_embedded(&samples, cfg.wamp_threshold)?,
            label: trial.label,
            trial: key,
            window_index: 0,
        }]);
    }
    windowing.validate()?;
    let onset = detect_onset(trial, windowing)?;
    let mut out = Vec::new();
    for (i, span) in segment_windows(trial.len(), onset, windowing)
        .iter()
        .enumerate()
    {
        let window: Vec<&[f64]> = samples.iter().map(|s| span.slice(s)).collect();
        let values = match cfg.schema {
            SchemaKind::PartA => assemble_part_a(&window, trial.fs(), cfg, sift)?,
            SchemaKind::RawOnly => assemble_raw_only(&window, cfg)?,
            SchemaKind::Embedded => unreachable!(),
        };
        out.push(FeatureVector {
            values,
            label: trial.label,
            trial: key.clone(),
            window_index: i,
        });
    }
    Ok(out)
}
