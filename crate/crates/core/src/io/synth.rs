use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::eval::derive_seed;
use crate::signal::{MovementClass, SampledSignal, Trial};

/// Resonance of an AR(2) texture: pole angle as a frequency and pole radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resonance {
    pub freq: f64,
    pub radius: f64,
}

/// Per-channel muscle activity of one movement class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassProfile {
    /// Standard deviation of the active signal, per channel.
    pub amplitude: Vec<f64>,
    /// Slow and fast texture resonances, per channel.
    pub low: Vec<Resonance>,
    pub high: Vec<Resonance>,
    /// Fraction of variance carried by the fast texture, per channel.
    pub high_share: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub classes: Vec<MovementClass>,
    pub trials_per_class: usize,
    pub channels: usize,
    pub fs: f64,
    pub samples: usize,
    pub subject: String,
    /// Contraction onset drawn uniformly from this sample range.
    pub onset_min: usize,
    pub onset_max: usize,
    /// Length of the raised-cosine rise, in samples.
    pub ramp: usize,
    /// Relative standard deviation of the per-trial gain of each channel.
    pub gain_jitter: f64,
    /// Relative standard deviation of the per-trial resonance frequencies.
    pub freq_jitter: f64,
    /// Standard deviation of additive sensor noise.
    pub noise_level: f64,
    /// Explicit class profiles; when absent a built-in family is used.
    pub profiles: Option<Vec<ClassProfile>>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            classes: MovementClass::GRASPS.to_vec(),
            trials_per_class: 30,
            channels: 2,
            fs: 500.0,
            samples: 3000,
            subject: "synth".into(),
            onset_min: 250,
            onset_max: 750,
            ramp: 60,
            gain_jitter: 0.25,
            freq_jitter: 0.05,
            noise_level: 0.1,
            profiles: None,
            seed: 0,
        }
    }
}

/// Built-in class family: amplitude patterns across channels overlap between
/// classes, while the spectral make-up of each channel differs.
pub fn default_profile(class_index: usize, channels: usize) -> ClassProfile {
    const AMP: [f64; 6] = [60.0, 60.0, 90.0, 90.0, 120.0, 75.0];
    const SHARE: [f64; 6] = [0.25, 0.7, 0.35, 0.75, 0.5, 0.3];
    const LOW_F: [f64; 6] = [30.0, 45.0, 55.0, 35.0, 40.0, 60.0];
    const HIGH_F: [f64; 6] = [120.0, 150.0, 110.0, 160.0, 135.0, 145.0];
    let k = class_index % 6;
    let per_channel = |ch: usize, table: &[f64; 6]| table[(k + 2 * ch) % 6];
    let channel = 0..channels;
    ClassProfile {
        amplitude: channel.clone().map(|c| per_channel(c, &AMP)).collect(),
        low: channel
            .clone()
            .map(|c| Resonance {
                freq: per_channel(c, &LOW_F),
                radius: 0.9,
            })
            .collect(),
        high: channel
            .clone()
            .map(|c| Resonance {
                freq: per_channel(c, &HIGH_F),
                radius: 0.85,
            })
            .collect(),
        high_share: channel.map(|c| per_channel(c, &SHARE)).collect(),
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() || self.trials_per_class == 0 || self.channels == 0 {
            return Err(invalid(
                "classes, trials_per_class and channels must be positive",
            ));
        }
        if !(self.fs > 0.0) || self.samples == 0 {
            return Err(invalid("fs and samples must be positive"));
        }
        if self.onset_min > self.onset_max || self.onset_max >= self.samples {
            return Err(invalid(
                "onset range must satisfy onset_min <= onset_max < samples",
            ));
        }
        if self.gain_jitter < 0.0 || self.freq_jitter < 0.0 || self.noise_level < 0.0 {
            return Err(invalid("jitter and noise levels must be nonnegative"));
        }
        if let Some(p) = &self.profiles {
            if p.len() != self.classes.len() {
                return Err(invalid("one profile per class is required"));
            }
            for prof in p {
                let n = self.channels;
                if prof.amplitude.len() != n
                    || prof.low.len() != n
                    || prof.high.len() != n
                    || prof.high_share.len() != n
                {
                    return Err(invalid("profile vectors must have one entry per channel"));
                }
                for r in prof.low.iter().chain(&prof.high) {
                    if !(r.radius > 0.0 && r.radius < 1.0)
                        || !(r.freq > 0.0 && r.freq < self.fs / 2.0)
                    {
                        return Err(invalid(
                            "resonances need radius in (0,1) and 0 < freq < fs/2",
                        ));
                    }
                }
                if prof.high_share.iter().any(|s| !(0.0..=1.0).contains(s)) {
                    return Err(invalid("high_share must lie in [0, 1]"));
                }
            }
        }
        Ok(())
    }

    fn profile(&self, class_index: usize) -> ClassProfile {
        match &self.profiles {
            Some(p) => p[class_index].clone(),
            None => default_profile(class_index, self.channels),
        }
    }
}

/// Unit-variance AR(2) noise with poles at `radius·e^{±iω}`.
fn ar2_texture(r: Resonance, fs: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let a1 = 2.0 * r.radius * (2.0 * PI * r.freq / fs).cos();
    let a2 = -r.radius * r.radius;
    let var = (1.0 - a2) / ((1.0 + a2) * ((1.0 - a2).powi(2) - a1 * a1));
    let scale = 1.0 / var.sqrt();
    let burn = 200;
    let (mut x1, mut x2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for i in 0..n + burn {
        let e: f64 = rng.sample(StandardNormal);
        let x = a1 * x1 + a2 * x2 + e;
        x2 = x1;
        x1 = x;
        if i >= burn {
            out.push(x * scale);
        }
    }
    out
}

fn jittered(r: Resonance, jitter: f64, fs: f64, rng: &mut ChaCha8Rng) -> Resonance {
    let z: f64 = rng.sample(StandardNormal);
    Resonance {
        freq: (r.freq * (1.0 + jitter * z)).clamp(1.0, fs / 2.0 - 1.0),
        radius: r.radius,
    }
}

/// Generates every trial; trial `i` of class `c` depends only on the seed,
/// `c` and `i`.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Vec<Trial>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.classes.len() * cfg.trials_per_class);
    for (ci, &class) in cfg.classes.iter().enumerate() {
        let prof = cfg.profile(ci);
        for t in 0..cfg.trials_per_class {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[class as u64, t as u64]));
            let onset = rng.random_range(cfg.onset_min..=cfg.onset_max);
            let phase = rng.random_range(0.0..2.0 * PI);
            let envelope: Vec<f64> = (0..cfg.samples)
                .map(|i| {
                    if i < onset {
                        return 0.0;
                    }
                    let k = i - onset;
                    let rise = if k < cfg.ramp {
                        0.5 - 0.5 * (PI * k as f64 / cfg.ramp as f64).cos()
                    } else {
                        1.0
                    };
                    rise * (1.0 + 0.1 * (2.0 * PI * 0.5 * i as f64 / cfg.fs + phase).sin())
                })
                .collect();
            let mut channels = Vec::with_capacity(cfg.channels);
            for ch in 0..cfg.channels {
                let g: f64 = rng.sample(StandardNormal);
                let gain = (prof.amplitude[ch] * (1.0 + cfg.gain_jitter * g)).max(0.0);
                let low = ar2_texture(
                    jittered(prof.low[ch], cfg.freq_jitter, cfg.fs, &mut rng),
                    cfg.fs,
                    cfg.samples,
                    &mut rng,
                );
                let high = ar2_texture(
                    jittered(prof.high[ch], cfg.freq_jitter, cfg.fs, &mut rng),
                    cfg.fs,
                    cfg.samples,
                    &mut rng,
                );
                let (wl, wh) = (
                    (1.0 - prof.high_share[ch]).sqrt(),
                    prof.high_share[ch].sqrt(),
                );
                let samples: Vec<f64> = (0..cfg.samples)
                    .map(|i| {
                        let noise: f64 = rng.sample(StandardNormal);
                        envelope[i] * gain * (wl * low[i] + wh * high[i]) + cfg.noise_level * noise
                    })
                    .collect();
                channels.push(SampledSignal::new(samples, cfg.fs)?);
            }
            out.push(Trial::new(channels, class, cfg.subject.clone(), t + 1)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig {
            trials_per_class: 2,
            samples: 1200,
            onset_min: 200,
            onset_max: 400,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic() {
        let a = generate_synthetic(&small()).unwrap();
        let b = generate_synthetic(&small()).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&SynthConfig { seed: 9, ..small() }).unwrap();
        assert_ne!(a, c);
        assert_eq!(a.len(), 12);
        assert_eq!(a[0].channels().len(), 2);
        assert_eq!(a[0].len(), 1200);
    }

    #[test]
    fn quiet_before_onset() {
        let cfg = small();
        for t in generate_synthetic(&cfg).unwrap() {
            let s = t.channels()[0].samples();
            let rest: f64 =
                s[..cfg.onset_min].iter().map(|v| v.abs()).sum::<f64>() / cfg.onset_min as f64;
            let active: f64 = s[cfg.onset_max + cfg.ramp..]
                .iter()
                .map(|v| v.abs())
                .sum::<f64>()
                / (s.len() - cfg.onset_max - cfg.ramp) as f64;
            assert!(rest < 0.2, "{rest}");
            assert!(active > 10.0, "{active}");
        }
    }

    #[test]
    fn unit_variance_texture() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = ar2_texture(
            Resonance {
                freq: 50.0,
                radius: 0.9,
            },
            500.0,
            200_000,
            &mut rng,
        );
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
    }

    #[test]
    fn rejects_bad_config() {
        assert!(generate_synthetic(&SynthConfig {
            channels: 0,
            ..small()
        })
        .is_err());
        assert!(generate_synthetic(&SynthConfig {
            onset_max: 5000,
            ..small()
        })
        .is_err());
        assert!(generate_synthetic(&SynthConfig {
            profiles: Some(vec![]),
            ..small()
        })
        .is_err());
    }
}
