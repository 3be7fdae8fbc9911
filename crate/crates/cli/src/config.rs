//! TOML configuration files.
//!
//! Typed deserialization stops at the first unknown key, so loading repeats
//! it, dropping each offending key from the document until the rest parses.
//! That way a single error names every unknown key with its full path.

use std::fmt;
use std::ops::Range;
use std::path::Path;

use emgkit::classify::ClassifierSpec;
use emgkit::emd::SiftConfig;
use emgkit::eval::{PipelineConfig, ProtocolConfig, Reduction};
use emgkit::features::FeatureConfig;
use emgkit::io::ChannelLayout;
use emgkit::signal::WindowingConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml_edit::{Document, DocumentMut, Item};

/// Where trial recordings come from and how they are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub fs: f64,
    pub layout: ChannelLayout,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            fs: 500.0,
            layout: ChannelLayout::ColumnPerChannel,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: u64,
    pub data: DataConfig,
    pub features: FeatureConfig,
    pub windowing: WindowingConfig,
    pub sift: SiftConfig,
    pub reduction: Reduction,
    pub classifier: ClassifierSpec,
    pub protocol: ProtocolConfig,
}

impl ConfigFile {
    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            features: self.features,
            windowing: self.windowing,
            sift: self.sift,
            reduction: self.reduction.clone(),
            classifier: self.classifier.clone(),
            protocol: self.protocol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    UnknownKey(String),
    MissingKey(String),
    Other {
        location: Option<(usize, usize)>,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub source: String,
    pub problems: Vec<Problem>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unknown: Vec<&str> = self
            .problems
            .iter()
            .filter_map(|p| match p {
                Problem::UnknownKey(k) => Some(k.as_str()),
                _ => None,
            })
            .collect();
        write!(f, "invalid configuration {}", self.source)?;
        if !unknown.is_empty() {
            write!(f, "\n  unknown keys: {}", unknown.join(", "))?;
        }
        for p in &self.problems {
            match p {
                Problem::UnknownKey(_) => {}
                Problem::MissingKey(k) => write!(f, "\n  missing key `{k}`")?,
                Problem::Other {
                    location: Some((line, col)),
                    message,
                } => write!(f, "\n  line {line}, column {col}: {message}")?,
                Problem::Other {
                    location: None,
                    message,
                } => write!(f, "\n  {message}")?,
            }
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, col)
}

/// Backticked name at the start of a serde message such as "unknown field `x`".
fn quoted_after<'a>(message: &'a str, prefix: &str) -> Option<&'a str> {
    let rest = message.strip_prefix(prefix)?.strip_prefix('`')?;
    rest.split('`').next()
}

/// Path of the key whose name or value sits at `span`. For a table the path
/// is the table itself.
fn path_at(item: &Item, span: &Range<usize>, prefix: &mut Vec<String>) -> Option<Vec<String>> {
    let table = item.as_table_like()?;
    for (name, _) in table.iter() {
        let (key, child) = table.get_key_value(name)?;
        prefix.push(name.to_string());
        if key.span().as_ref() == Some(span) || child.span().as_ref() == Some(span) {
            return Some(prefix.clone());
        }
        if let Some(found) = path_at(child, span, prefix) {
            return Some(found);
        }
        prefix.pop();
    }
    None
}

fn item_at<'a>(root: &'a Item, path: &[String]) -> Option<&'a Item> {
    path.iter()
        .try_fold(root, |item, k| item.as_table_like()?.get(k))
}

/// Shallowest key named `field` below `item`.
fn find_below(item: &Item, field: &str) -> Option<Vec<String>> {
    let table = item.as_table_like()?;
    if table.contains_key(field) {
        return Some(vec![field.to_string()]);
    }
    table.iter().find_map(|(name, child)| {
        let mut p = find_below(child, field)?;
        p.insert(0, name.to_string());
        Some(p)
    })
}

/// Full path of `field` given the key or table the parser pointed at.
/// Errors inside tagged tables point at the enclosing table.
fn resolve(root: &Item, span: &Range<usize>, field: &str) -> Vec<String> {
    let mut path = path_at(root, span, &mut Vec::new()).unwrap_or_default();
    if path.last().map(String::as_str) == Some(field) {
        return path;
    }
    if let Some(rest) = item_at(root, &path).and_then(|i| find_below(i, field)) {
        path.extend(rest);
    } else {
        path.push(field.to_string());
    }
    path
}

fn remove(doc: &mut DocumentMut, path: &[String]) -> bool {
    let Some((last, parents)) = path.split_last() else {
        return false;
    };
    let mut item = doc.as_item_mut();
    for k in parents {
        match item.as_table_like_mut().and_then(|t| t.get_mut(k)) {
            Some(i) => item = i,
            None => return false,
        }
    }
    item.as_table_like_mut()
        .and_then(|t| t.remove(last))
        .is_some()
}

/// Deserializes `text`, collecting every problem. After an error that is not
/// an unknown key, the offending entry is dropped too so later keys are still
/// checked.
pub fn parse_toml<T: DeserializeOwned>(text: &str, source: &str) -> Result<T, ConfigError> {
    let fail = |problems| ConfigError {
        source: source.to_string(),
        problems,
    };
    let mut current = text.to_string();
    let mut problems = Vec::new();
    loop {
        let err = match toml::from_str::<T>(&current) {
            Ok(v) if problems.is_empty() => return Ok(v),
            Ok(_) => return Err(fail(problems)),
            Err(e) => e,
        };
        let message = err.message().to_string();
        let span = err.span();
        let Ok(doc) = Document::parse(current.as_str()) else {
            // syntax error: nothing to resolve keys against
            problems.push(Problem::Other {
                location: span.map(|s| line_col(&current, s.start)),
                message,
            });
            return Err(fail(problems));
        };
        let root = doc.as_item();
        let at = span
            .as_ref()
            .and_then(|s| path_at(root, s, &mut Vec::new()));
        let (problem, drop) =
            if let (Some(field), Some(s)) = (quoted_after(&message, "unknown field "), &span) {
                let path = resolve(root, s, field);
                (Problem::UnknownKey(path.join(".")), Some(path))
            } else if let Some(field) = quoted_after(&message, "missing field ") {
                let mut path = at.clone().unwrap_or_default();
                path.push(field.to_string());
                (Problem::MissingKey(path.join(".")), at)
            } else {
                let location = if current == text {
                    span.as_ref().map(|s| line_col(text, s.start))
                } else {
                    // offsets refer to the edited text
                    None
                };
                let prefix = at
                    .as_ref()
                    .map(|p| format!("`{}`: ", p.join(".")))
                    .unwrap_or_default();
                let problem = Problem::Other {
                    location,
                    message: format!("{prefix}{message}"),
                };
                (problem, at)
            };
        problems.push(problem);
        let mut edit = doc.clone().into_mut();
        match drop {
            Some(path) if remove(&mut edit, &path) => current = edit.to_string(),
            _ => return Err(fail(problems)),
        }
    }
}

pub fn load_toml<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(parse_toml(&text, &path.display().to_string())?)
}
