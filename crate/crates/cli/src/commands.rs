use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use emgkit::emd::{emd, hilbert_track};
use emgkit::eval::{
    cross_validate, derive_seed, extract_features, group_dataset, train_pipeline,
    wilcoxon_signed_rank, CvReport, Decision, PipelineConfig, SpecLearner, TrainedPipeline,
    TrialFeatures, WilcoxonResult, STREAM_SPLIT,
};
use emgkit::features::{extract_trial, if_stats, FeatureDataset, FeatureSchema};
use emgkit::io::{
    confusion_csv, folds_csv, format_report_text, format_subject_table, generate_synthetic,
    parse_channels, read_feature_dataset, simplot_decode as decode_stream,
    simplot_encode as encode_frame, write_feature_dataset, write_trials, ChannelLayout,
    SimplotFrame, SynthConfig, TrialFileManifest,
};
use emgkit::signal::Trial;
use log::info;
use serde::{Deserialize, Serialize};

use crate::config::{load_toml, ConfigFile};
use crate::Source;

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    let cfg = match path {
        Some(p) => load_toml(p)?,
        None => ConfigFile::default(),
    };
    echo_config(&cfg, path)?;
    Ok(cfg)
}

/// Resolved configuration and seed streams, on stderr.
fn echo_config(cfg: &ConfigFile, path: Option<&Path>) -> Result<()> {
    let origin = path.map_or("built-in defaults".to_string(), |p| p.display().to_string());
    let mut out = format!("# resolved configuration ({origin})\n");
    out.push_str(&toml::to_string(cfg).context("cannot render configuration")?);
    let splits: Vec<String> = (0..cfg.protocol.repetitions)
        .map(|r| format!("{:#018x}", derive_seed(cfg.seed, &[STREAM_SPLIT, r as u64])))
        .collect();
    writeln!(
        out,
        "# master seed {}; split seeds per repetition: {}",
        cfg.seed,
        splits.join(" ")
    )?;
    eprint!("{out}");
    Ok(())
}

fn load_trials(dir: &Path, cfg: &ConfigFile) -> Result<Vec<Trial>> {
    let manifest = TrialFileManifest::scan(dir, cfg.data.fs, cfg.data.layout)
        .with_context(|| format!("cannot scan trial directory {}", dir.display()))?;
    if manifest.entries.is_empty() {
        bail!("no trial files found under {}", dir.display());
    }
    let trials = manifest.load()?;
    info!("loaded {} trials from {}", trials.len(), dir.display());
    Ok(trials)
}

/// Trial features and their column names.
fn load_source(source: &Source, cfg: &ConfigFile) -> Result<(Vec<TrialFeatures>, Vec<String>)> {
    if let Some(dir) = &source.trials {
        let trials = load_trials(dir, cfg)?;
        let names = FeatureSchema::new(cfg.features.schema, trials[0].channels().len()).names();
        return Ok((extract_features(&trials, &cfg.pipeline())?, names));
    }
    let path = source.features.as_ref().expect("clap enforces one source");
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let ds = read_feature_dataset(&bytes)
        .with_context(|| format!("invalid feature file {}", path.display()))?;
    if ds.schema.kind.is_some_and(|k| k != cfg.features.schema) {
        log::warn!("feature file schema differs from [features] schema; the file is used as is");
    }
    Ok((group_dataset(&ds)?, ds.schema.names()))
}

fn write_out(path: &Path, content: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
}

pub fn decompose(
    input: &Path,
    channel: usize,
    start: usize,
    len: Option<usize>,
    config: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let text =
        fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let channels = parse_channels(&text, cfg.data.layout)?;
    let samples = channels
        .get(channel)
        .with_context(|| format!("channel {channel} requested, file has {}", channels.len()))?;
    let end = len.map_or(samples.len(), |l| start.saturating_add(l));
    if start >= end || end > samples.len() {
        bail!(
            "span {start}..{end} is outside the {} samples of the recording",
            samples.len()
        );
    }
    let x = &samples[start..end];
    let dec = emd(x, &cfg.sift)?;
    let fs_hz = cfg.data.fs;
    let tracks = dec
        .imfs
        .iter()
        .map(|m| hilbert_track(m, fs_hz))
        .collect::<emgkit::Result<Vec<_>>>()?;
    println!(
        "{} samples, {} IMFs, reconstruction error {:.3e}",
        x.len(),
        dec.imfs.len(),
        dec.reconstruction_error(x)
    );
    println!("imf  energy  if_median_hz  if_std_hz  if_kurtosis");
    for (k, (m, t)) in dec.imfs.iter().zip(&tracks).enumerate() {
        let st = if_stats(t, cfg.features.if_edge_trim)?;
        let energy: f64 = m.iter().map(|v| v * v).sum();
        println!(
            "{:>3}  {energy:.4e}  {:>12.3}  {:>9.3}  {:>11.3}",
            k + 1,
            st.median,
            st.std,
            st.kurtosis
        );
    }
    if let Some(out) = out {
        let k = dec.imfs.len();
        let mut csv = String::from("sample,signal");
        (1..=k).for_each(|i| write!(csv, ",imf{i}").unwrap());
        csv.push_str(",residual");
        (1..=k).for_each(|i| write!(csv, ",if{i}_hz").unwrap());
        csv.push('\n');
        for (i, v) in x.iter().enumerate() {
            write!(csv, "{},{v}", start + i)?;
            for m in &dec.imfs {
                write!(csv, ",{}", m[i])?;
            }
            write!(csv, ",{}", dec.residual[i])?;
            for t in &tracks {
                write!(csv, ",{}", t.inst_freq[i])?;
            }
            csv.push('\n');
        }
        write_out(out, csv.as_bytes())?;
    }
    Ok(())
}

pub fn features(input: &Path, config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let trials = load_trials(input, &cfg)?;
    let schema = FeatureSchema::new(cfg.features.schema, trials[0].channels().len());
    let mut trials = trials;
    trials.sort_by_key(|t| t.key());
    let mut vectors = Vec::new();
    for t in &trials {
        let v = extract_trial(t, &cfg.windowing, &cfg.features, &cfg.sift)
            .with_context(|| format!("feature extraction failed for trial {}", t.key()))?;
        if v.is_empty() {
            log::warn!("trial {} produced no windows", t.key());
        }
        vectors.extend(v);
    }
    let n = vectors.len();
    write_out(
        out,
        &write_feature_dataset(&FeatureDataset { schema, vectors })?,
    )?;
    eprintln!(
        "wrote {n} feature vectors from {} trials to {}",
        trials.len(),
        out.display()
    );
    Ok(())
}

fn evaluate(data: &[TrialFeatures], cfg: &PipelineConfig) -> Result<CvReport> {
    Ok(cross_validate(
        data,
        cfg,
        &SpecLearner(cfg.classifier.clone()),
        &mut (),
    )?)
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    report: &'a CvReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    compared: Option<&'a CvReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wilcoxon: Option<&'a WilcoxonResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    subjects: Vec<(&'a str, &'a CvReport)>,
}

pub fn eval(
    source: &Source,
    config: Option<&Path>,
    compare: Option<&Path>,
    alpha: f64,
    per_subject: bool,
    out_dir: Option<&Path>,
) -> Result<()> {
    let cfg = load_config(config)?;
    let (data, _) = load_source(source, &cfg)?;
    let report = evaluate(&data, &cfg.pipeline())?;
    println!("{}", format_report_text(&report));

    let mut subjects = Vec::new();
    if per_subject {
        let mut by: BTreeMap<String, Vec<TrialFeatures>> = BTreeMap::new();
        for t in &data {
            by.entry(t.key.subject.clone()).or_default().push(t.clone());
        }
        for (s, d) in by {
            let r = evaluate(&d, &cfg.pipeline())
                .with_context(|| format!("evaluation of subject {s} failed"))?;
            subjects.push((s, r));
        }
        println!("{}", format_subject_table(&subjects));
    }

    let mut comparison = None;
    if let Some(other_path) = compare {
        let other = load_config(Some(other_path))?;
        let same_extraction = other.data == cfg.data
            && other.features == cfg.features
            && other.windowing == cfg.windowing
            && other.sift == cfg.sift;
        let other_data = if source.trials.is_some() && !same_extraction {
            load_source(source, &other)?.0
        } else {
            data.clone()
        };
        let r = evaluate(&other_data, &other.pipeline())?;
        let w = wilcoxon_signed_rank(&report.fold_accuracies(), &r.fold_accuracies(), alpha)?;
        println!(
            "comparison: {:.2}% vs {:.2}% mean fold accuracy over {} folds",
            report.mean_fold_accuracy,
            r.mean_fold_accuracy,
            report.folds.len()
        );
        let p = w.p_value.map_or("-".to_string(), |p| format!("{p:.4}"));
        let verdict = match w.decision {
            Decision::Reject => "difference significant",
            Decision::Retain => "no significant difference",
            Decision::NoDecision => "no decision (all folds tied)",
        };
        println!(
            "wilcoxon signed-rank: n={} W+={} W-={} p={p} ({}) at alpha {alpha}: {verdict}",
            w.n,
            w.w_plus,
            w.w_minus,
            if w.exact {
                "exact"
            } else {
                "normal approximation"
            }
        );
        comparison = Some((r, w));
    }

    if let Some(dir) = out_dir {
        let out = EvalOutput {
            report: &report,
            compared: comparison.as_ref().map(|c| &c.0),
            wilcoxon: comparison.as_ref().map(|c| &c.1),
            subjects: subjects.iter().map(|(s, r)| (s.as_str(), r)).collect(),
        };
        write_out(&dir.join("report.json"), &serde_json::to_vec_pretty(&out)?)?;
        write_out(
            &dir.join("confusion.csv"),
            confusion_csv(&report.confusion).as_bytes(),
        )?;
        write_out(&dir.join("folds.csv"), folds_csv(&report).as_bytes())?;
        eprintln!(
            "wrote report.json, confusion.csv and folds.csv to {}",
            dir.display()
        );
    }
    Ok(())
}

/// A fitted pipeline with the configuration needed to feed it raw trials.
#[derive(Serialize, Deserialize)]
struct SavedModel {
    config: ConfigFile,
    pipeline: TrainedPipeline,
}

pub fn train(source: &Source, config: Option<&Path>, model: &Path) -> Result<()> {
    let cfg = load_config(config)?;
    let (data, names) = load_source(source, &cfg)?;
    let pipeline = train_pipeline(&data, names, &cfg.pipeline(), &mut ())?;
    if let Some(k) = pipeline.selected {
        eprintln!("selected dimensionality {k}");
    }
    let saved = SavedModel {
        config: cfg,
        pipeline,
    };
    write_out(model, &serde_json::to_vec(&saved)?)?;
    eprintln!("model written to {}", model.display());
    Ok(())
}

pub fn predict(model: &Path, source: &Source, out: Option<&Path>) -> Result<()> {
    let text =
        fs::read_to_string(model).with_context(|| format!("cannot read {}", model.display()))?;
    let saved: SavedModel = serde_json::from_str(&text)
        .with_context(|| format!("invalid model file {}", model.display()))?;
    let (data, names) = load_source(source, &saved.config)?;
    if names != saved.pipeline.feature_names {
        bail!(
            "feature columns do not match the model ({} given, {} expected)",
            names.len(),
            saved.pipeline.feature_names.len()
        );
    }
    let mut csv = String::from("subject,class,trial,window,predicted\n");
    let (mut hits, mut total) = (0usize, 0usize);
    for t in &data {
        for (row, w) in t.rows.iter_rows().zip(&t.windows) {
            let p = saved.pipeline.predict_row(row)?;
            writeln!(
                csv,
                "{},{},{},{w},{}",
                t.key.subject,
                t.key.class.name(),
                t.key.index,
                p.name()
            )?;
            hits += usize::from(p == t.key.class);
            total += 1;
        }
    }
    match out {
        Some(path) => write_out(path, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    if total > 0 {
        eprintln!(
            "{total} windows, {:.2}% agree with the directory labels",
            100.0 * hits as f64 / total as f64
        );
    }
    Ok(())
}

pub fn synth(
    out: &Path,
    config: Option<&Path>,
    seed: Option<u64>,
    trials_per_class: Option<usize>,
    layout: ChannelLayout,
) -> Result<()> {
    let mut cfg: SynthConfig = match config {
        Some(p) => load_toml(p)?,
        None => SynthConfig::default(),
    };
    cfg.seed = seed.unwrap_or(cfg.seed);
    cfg.trials_per_class = trials_per_class.unwrap_or(cfg.trials_per_class);
    eprint!(
        "# resolved synthetic generator settings\n{}",
        toml::to_string(&cfg)?
    );
    let trials = generate_synthetic(&cfg)?;
    let paths = write_trials(out, &trials, layout)?;
    eprintln!("wrote {} trials to {}", paths.len(), out.display());
    Ok(())
}

pub fn simplot_encode(input: &Path, out: &Path) -> Result<()> {
    let text =
        fs::read_to_string(input).with_context(|| format!("cannot read {}", input.display()))?;
    let mut bytes = Vec::new();
    let mut frames = 0;
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        let samples = fields
            .iter()
            .map(|t| t.parse::<i16>())
            .collect::<std::result::Result<Vec<i16>, _>>()
            .with_context(|| format!("line {}: samples must be 16-bit integers", i + 1))?;
        let frame = SimplotFrame::new(&samples).with_context(|| format!("line {}", i + 1))?;
        bytes.extend(encode_frame(&frame));
        frames += 1;
    }
    write_out(out, &bytes)?;
    eprintln!("encoded {frames} frames ({} bytes)", bytes.len());
    Ok(())
}

pub fn simplot_decode(input: &Path, out: Option<&Path>) -> Result<()> {
    let bytes = fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let (frames, skipped) = decode_stream(&bytes);
    let mut text = String::new();
    for f in &frames {
        let s: Vec<String> = f.samples().iter().map(i16::to_string).collect();
        writeln!(text, "{}", s.join(","))?;
    }
    match out {
        Some(p) => write_out(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    eprintln!("decoded {} frames, skipped {skipped} bytes", frames.len());
    Ok(())
}
