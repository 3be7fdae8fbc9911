use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::signal::{MovementClass, SampledSignal, Trial, TrialKey};

/// How channels are laid out in a trial text file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelLayout {
    /// One line per channel.
    RowPerChannel,
    /// One line per time step, one column per channel.
    #[default]
    ColumnPerChannel,
}

fn parse_line(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let v: f64 = t.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("`{t}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("non-finite value `{t}`"),
                });
            }
            Ok(v)
        })
        .collect()
}

/// Parses numeric text into channels. Blank lines are ignored; separators may
/// be commas or whitespace, trailing separators included.
pub fn parse_channels(content: &str, layout: ChannelLayout) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let v = parse_line(line, i + 1)?;
        if !v.is_empty() {
            rows.push((i + 1, v));
        }
    }
    let Some((_, first)) = rows.first() else {
        return Err(Error::Parse {
            line: 0,
            message: "no samples found".into(),
        });
    };
    let width = first.len();
    if let Some((line, r)) = rows.iter().find(|(_, r)| r.len() != width) {
        return Err(Error::Parse {
            line: *line,
            message: format!("expected {width} values, found {}", r.len()),
        });
    }
    Ok(match layout {
        ChannelLayout::RowPerChannel => rows.into_iter().map(|(_, r)| r).collect(),
        ChannelLayout::ColumnPerChannel => (0..width)
            .map(|c| rows.iter().map(|(_, r)| r[c]).collect())
            .collect(),
    })
}

pub fn parse_trial_text(
    content: &str,
    fs: f64,
    layout: ChannelLayout,
    key: &TrialKey,
) -> Result<Trial> {
    let channels = parse_channels(content, layout)?
        .into_iter()
        .map(|c| SampledSignal::new(c, fs))
        .collect::<Result<Vec<_>>>()?;
    Trial::new(channels, key.class, key.subject.clone(), key.index)
}

/// Renders samples so that [`parse_channels`] reads them back exactly.
pub fn format_channels(channels: &[&[f64]], layout: ChannelLayout) -> String {
    let mut out = String::new();
    let join =
        |it: &mut dyn Iterator<Item = f64>| it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
    match layout {
        ChannelLayout::RowPerChannel => {
            for c in channels {
                out.push_str(&join(&mut c.iter().copied()));
                out.push('\n');
            }
        }
        ChannelLayout::ColumnPerChannel => {
            let n = channels.first().map_or(0, |c| c.len());
            for i in 0..n {
                out.push_str(&join(&mut channels.iter().map(|c| c[i])));
                out.push('\n');
            }
        }
    }
    out
}

pub fn format_trial(trial: &Trial, layout: ChannelLayout) -> String {
    let ch: Vec<&[f64]> = trial.channels().iter().map(|c| c.samples()).collect();
    format_channels(&ch, layout)
}

/// Trial files laid out as `root/<subject>/<class>/<index>.txt`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFileManifest {
    pub root: PathBuf,
    pub entries: Vec<(TrialKey, PathBuf)>,
    pub fs: f64,
    pub layout: ChannelLayout,
    /// Expected channel count; `None` accepts whatever the first file holds.
    pub channels: Option<usize>,
}

pub fn trial_path(root: &Path, key: &TrialKey) -> PathBuf {
    root.join(&key.subject)
        .join(key.class.name())
        .join(format!("{:02}.txt", key.index))
}

fn sorted_dirs(p: &Path) -> Result<Vec<PathBuf>> {
    let mut v: Vec<PathBuf> = fs::read_dir(p)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    v.sort();
    Ok(v)
}

impl TrialFileManifest {
    /// Walks the directory tree. Class directories must carry a movement
    /// class name; file stems must be trial indices.
    pub fn scan(root: &Path, fs: f64, layout: ChannelLayout) -> Result<Self> {
        let mut entries = Vec::new();
        for subject_dir in sorted_dirs(root)?.into_iter().filter(|p| p.is_dir()) {
            let subject = subject_dir
                .file_name()
                .unwrap()
                .to_string_lossy()
                .into_owned();
            for class_dir in sorted_dirs(&subject_dir)?
                .into_iter()
                .filter(|p| p.is_dir())
            {
                let name = class_dir
                    .file_name()
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                let class: MovementClass = name.parse().map_err(|_| {
                    invalid(format!(
                        "`{}` is not a movement class directory",
                        class_dir.display()
                    ))
                })?;
                for file in sorted_dirs(&class_dir)? {
                    if file.extension().and_then(|e| e.to_str()) != Some("txt") {
                        continue;
                    }
                    let stem = file.file_stem().unwrap().to_string_lossy();
                    let index: usize = stem.parse().map_err(|_| {
                        invalid(format!(
                            "`{}` is not named by a trial index",
                            file.display()
                        ))
                    })?;
                    entries.push((
                        TrialKey {
                            subject: subject.clone(),
                            class,
                            index,
                        },
                        file,
                    ));
                }
            }
        }
        if entries.is_empty() {
            return Err(invalid(format!("no trial files under {}", root.display())));
        }
        entries.sort();
        Ok(Self {
            root: root.to_path_buf(),
            entries,
            fs,
            layout,
            channels: None,
        })
    }

    pub fn load(&self) -> Result<Vec<Trial>> {
        let mut expected = self.channels;
        let mut out = Vec::with_capacity(self.entries.len());
        for (key, path) in &self.entries {
            let text = fs::read_to_string(path)
                .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
            let trial =
                parse_trial_text(&text, self.fs, self.layout, key).map_err(|e| match e {
                    Error::Parse { line, message } => Error::Parse {
                        line,
                        message: format!("{}: {message}", path.display()),
                    },
                    other => other,
                })?;
            let n = trial.channels().len();
            match expected {
                Some(c) if c != n => {
                    return Err(invalid(format!(
                        "{} has {n} channels, expected {c}",
                        path.display()
                    )))
                }
                None => expected = Some(n),
                _ => {}
            }
            out.push(trial);
        }
        Ok(out)
    }
}

/// Writes trials in the manifest layout and returns the written paths.
pub fn write_trials(root: &Path, trials: &[Trial], layout: ChannelLayout) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::with_capacity(trials.len());
    for t in trials {
        let p = trial_path(root, &t.key());
        fs::create_dir_all(p.parent().unwrap())?;
        fs::write(&p, format_trial(t, layout))?;
        paths.push(p);
    }
    Ok(paths)
}
