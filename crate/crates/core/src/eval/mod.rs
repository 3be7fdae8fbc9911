//! Trial-level 5×2 cross-validation with nested model selection.
//!
//! Trials, never windows, are the unit of splitting. Standardization,
//! reduction and classifier are refit on the training trials of every fold,
//! and every fit is reported to a [`FitObserver`] so callers can audit what
//! data reached it.

mod confusion;
mod learner;
mod wilcoxon;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use confusion::{confusion_accumulate, ConfusionMatrix};
pub use learner::{Learner, OracleLearner, Predictor, SampleMeta, SpecLearner};
pub use wilcoxon::{wilcoxon_signed_rank, Decision, WilcoxonResult, EXACT_LIMIT};

use crate::classify::ClassifierSpec;
use crate::dimred::{
    pca_fit, ranking, relief_e, standardize_apply, standardize_fit, PcaModel, StandardizerState,
    DEFAULT_RELIEF_SAMPLES,
};
use crate::emd::SiftConfig;
use crate::error::{invalid, Result};
use crate::features::{extract_trial, FeatureConfig, FeatureDataset};
use crate::matrix::FeatureMatrix;
use crate::signal::{MovementClass, Trial, TrialKey, WindowingConfig};

fn default_relief_samples() -> usize {
    DEFAULT_RELIEF_SAMPLES
}

/// Dimensionality reduction applied after standardization. A missing grid
/// means every dimension count from 1 to the available width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase", deny_unknown_fields)]
pub enum Reduction {
    None,
    Pca {
        #[serde(default)]
        grid: Option<Vec<usize>>,
    },
    Relief {
        #[serde(default)]
        grid: Option<Vec<usize>>,
        #[serde(default = "default_relief_samples")]
        samples: usize,
    },
}

impl Default for Reduction {
    fn default() -> Self {
        Reduction::Pca { grid: None }
    }
}

impl Reduction {
    fn grid(&self) -> Option<Option<&[usize]>> {
        match self {
            Reduction::None => None,
            Reduction::Pca { grid } | Reduction::Relief { grid, .. } => Some(grid.as_deref()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    pub repetitions: usize,
    pub inner_repetitions: usize,
    pub inner_train_fraction: f64,
    /// Reject unequal per-class trial counts instead of splitting each class
    /// as evenly as it allows.
    pub strict_balance: bool,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            repetitions: 5,
            inner_repetitions: 10,
            inner_train_fraction: 0.7,
            strict_balance: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub features: FeatureConfig,
    pub windowing: WindowingConfig,
    pub sift: SiftConfig,
    pub reduction: Reduction,
    pub classifier: ClassifierSpec,
    pub protocol: ProtocolConfig,
    pub seed: u64,
}

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Expands a master seed into an independent stream id for `path`.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix(master), |s, &p| splitmix(s ^ splitmix(p)))
}

/// Stream ids under the master seed: outer splits are
/// `[STREAM_SPLIT, repetition]`, inner splits and fits also carry the fold
/// and inner repetition.
pub const STREAM_SPLIT: u64 = 1;
pub const STREAM_INNER: u64 = 2;
pub const STREAM_FIT: u64 = 3;

// ---------------------------------------------------------------------------
// Audit hooks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitStage {
    Standardize,
    Reduction,
    Classifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitContext {
    pub repetition: usize,
    pub fold: usize,
    /// Inner model-selection repetition, `None` for the outer fit.
    pub inner: Option<usize>,
}

/// One fitting call and the distinct trials whose rows it saw.
#[derive(Debug, Clone, Copy)]
pub struct FitEvent<'a> {
    pub stage: FitStage,
    pub context: FitContext,
    pub trials: &'a [TrialKey],
}

pub trait FitObserver {
    fn on_fit(&mut self, event: &FitEvent<'_>);
}

impl FitObserver for () {
    fn on_fit(&mut self, _event: &FitEvent<'_>) {}
}

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

/// All window vectors of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialFeatures {
    pub key: TrialKey,
    pub rows: FeatureMatrix,
    pub windows: Vec<usize>,
}

/// Runs feature extraction over every trial, sorted by trial key.
///
/// Extraction has no fitted state, so doing it once up front cannot leak
/// between folds.
pub fn extract_features(trials: &[Trial], cfg: &PipelineConfig) -> Result<Vec<TrialFeatures>> {
    let mut out = Vec::with_capacity(trials.len());
    let mut width = None;
    for t in trials {
        let vectors = extract_trial(t, &cfg.windowing, &cfg.features, &cfg.sift)?;
        let w = vectors.first().map(|v| v.values.len());
        if w.is_none() {
            log::warn!("trial {} produced no windows", t.key());
        }
        if let (Some(a), Some(b)) = (width, w) {
            if a != b {
                return Err(invalid(format!(
                    "trial {} has {b} features, expected {a}",
                    t.key()
                )));
            }
        }
        width = width.or(w);
        let mut rows = FeatureMatrix::with_width(w.unwrap_or(0));
        let mut windows = Vec::with_capacity(vectors.len());
        for v in &vectors {
            rows.push_row(&v.values);
            windows.push(v.window_index);
        }
        out.push(TrialFeatures {
            key: t.key(),
            rows,
            windows,
        });
    }
    let w = width.unwrap_or(0);
    for t in &mut out {
        if t.rows.rows() == 0 {
            t.rows = FeatureMatrix::with_width(w);
        }
    }
    out.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(out)
}

/// Groups dataset rows by trial, ordering windows by index.
pub fn group_dataset(ds: &FeatureDataset) -> Result<Vec<TrialFeatures>> {
    let mut groups: BTreeMap<TrialKey, Vec<(usize, &[f64])>> = BTreeMap::new();
    for v in &ds.vectors {
        if v.values.len() != ds.schema.len() {
            return Err(invalid(format!(
                "row of trial {} has the wrong width",
                v.trial
            )));
        }
        if v.label != v.trial.class {
            return Err(invalid(format!(
                "row of trial {} is labelled {}",
                v.trial, v.label
            )));
        }
        groups
            .entry(v.trial.clone())
            .or_default()
            .push((v.window_index, &v.values));
    }
    Ok(groups
        .into_iter()
        .map(|(key, mut rows)| {
            rows.sort_by_key(|r| r.0);
            let mut m = FeatureMatrix::with_width(ds.schema.len());
            for r in &rows {
                m.push_row(r.1);
            }
            TrialFeatures {
                key,
                rows: m,
                windows: rows.iter().map(|r| r.0).collect(),
            }
        })
        .collect())
}

/// Rows of several trials stacked together.
struct Stack<'a> {
    x: FeatureMatrix,
    labels: Vec<usize>,
    trials: Vec<TrialKey>,
    meta: Vec<SampleMeta<'a>>,
}

impl<'a> Stack<'a> {
    fn new(data: &'a [TrialFeatures], idx: &[usize], classes: &[MovementClass]) -> Self {
        let width = data.first().map_or(0, |t| t.rows.width());
        let mut x = FeatureMatrix::with_width(width);
        let mut labels = Vec::new();
        let mut meta = Vec::new();
        let mut trials: Vec<TrialKey> = idx.iter().map(|&i| data[i].key.clone()).collect();
        trials.sort();
        for &i in idx {
            let t = &data[i];
            let c = class_index(classes, t.key.class);
            for (r, &w) in t.rows.iter_rows().zip(&t.windows) {
                x.push_row(r);
                labels.push(c);
                meta.push(SampleMeta {
                    trial: &t.key,
                    window: w,
                });
            }
        }
        Self {
            x,
            labels,
            trials,
            meta,
        }
    }
}

fn class_index(classes: &[MovementClass], c: MovementClass) -> usize {
    classes.iter().position(|k| *k == c).expect("class in list")
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

/// A fitted reduction step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReductionModel {
    Identity,
    Pca(PcaModel),
    /// Standardized columns kept, in RELIEF rank order.
    Columns {
        columns: Vec<usize>,
    },
}

/// Standardizer plus reduction, fitted on one training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Front {
    std: StandardizerState,
    red: ReductionModel,
}

impl Front {
    fn apply_row(&self, row: &[f64], buf: &mut Vec<f64>, out: &mut Vec<f64>) {
        self.std.apply_row(row, buf);
        match &self.red {
            ReductionModel::Identity => {
                out.clear();
                out.extend_from_slice(buf);
            }
            ReductionModel::Pca(m) => m.project_row(buf, out),
            ReductionModel::Columns { columns: c } => {
                out.clear();
                out.extend(c.iter().map(|&j| buf[j]));
            }
        }
    }
}

/// Fits standardization and reduction. `dims` caps the reduced width; `None`
/// keeps every available dimension, ordered so that prefixes are nested.
fn fit_front(
    stack: &Stack<'_>,
    reduction: &Reduction,
    dims: Option<usize>,
    seed: u64,
    context: FitContext,
    observer: &mut dyn FitObserver,
) -> Result<(Front, FeatureMatrix)> {
    let event = |stage| FitEvent {
        stage,
        context,
        trials: &stack.trials,
    };
    let std = standardize_fit(&stack.x)?;
    observer.on_fit(&event(FitStage::Standardize));
    let z = standardize_apply(&std, &stack.x)?;
    let avail = z.width();
    if avail == 0 {
        return Err(invalid(
            "every feature column is constant on the training trials",
        ));
    }
    let take = |d: Option<usize>| d.map_or(avail, |d| d.min(avail));
    let red = match reduction {
        Reduction::None => ReductionModel::Identity,
        Reduction::Pca { .. } => {
            let m = pca_fit(&z, take(dims))?;
            observer.on_fit(&event(FitStage::Reduction));
            ReductionModel::Pca(m)
        }
        Reduction::Relief { samples, .. } => {
            let w = relief_e(&z, &stack.labels, *samples, seed)?;
            observer.on_fit(&event(FitStage::Reduction));
            let mut order = ranking(&w.weights);
            order.truncate(take(dims));
            ReductionModel::Columns { columns: order }
        }
    };
    let front = Front { std, red };
    let reduced = match &front.red {
        ReductionModel::Identity => z,
        ReductionModel::Pca(m) => {
            let mut out = FeatureMatrix::with_width(m.retained());
            let mut buf = Vec::new();
            for r in z.iter_rows() {
                m.project_row(r, &mut buf);
                out.push_row(&buf);
            }
            out
        }
        ReductionModel::Columns { columns: c } => z.select_columns(c),
    };
    Ok((front, reduced))
}

/// Outcome of the inner model-selection loop.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub value: usize,
    /// Total inner-test errors for each grid value evaluated in every inner
    /// repetition.
    pub errors: Vec<(usize, u64)>,
}

/// Picks the reduced dimensionality with the fewest inner-test errors over
/// repeated stratified splits of the training trials; ties go to the smaller
/// value.
#[allow(clippy::too_many_arguments)]
pub fn nested_select(
    data: &[TrialFeatures],
    train: &[usize],
    classes: &[MovementClass],
    cfg: &PipelineConfig,
    learner: &dyn Learner,
    grid: Option<&[usize]>,
    context: FitContext,
    observer: &mut dyn FitObserver,
) -> Result<Selection> {
    let explicit: Option<Vec<usize>> = grid.map(|g| {
        let mut g: Vec<usize> = g.iter().copied().filter(|&v| v > 0).collect();
        g.sort_unstable();
        g.dedup();
        g
    });
    if let Some(g) = &explicit {
        if g.is_empty() {
            return Err(invalid("selection grid has no positive value"));
        }
        if g.len() == 1 {
            return Ok(Selection {
                value: g[0],
                errors: Vec::new(),
            });
        }
    }
    let reps = cfg.protocol.inner_repetitions.max(1);
    let frac = cfg.protocol.inner_train_fraction;
    if !(frac > 0.0 && frac < 1.0) {
        return Err(invalid("inner train fraction must lie in (0, 1)"));
    }
    let mut per_class: BTreeMap<MovementClass, Vec<usize>> = BTreeMap::new();
    for &i in train {
        per_class.entry(data[i].key.class).or_default().push(i);
    }

    let mut errors: BTreeMap<usize, (u64, usize)> = BTreeMap::new();
    let mut skipped = std::collections::BTreeSet::new();
    let (mut buf, mut row) = (Vec::new(), Vec::new());
    for inner in 0..reps {
        let ctx = FitContext {
            inner: Some(inner),
            ..context
        };
        let path = [context.repetition as u64, context.fold as u64, inner as u64];
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
            cfg.seed,
            &[STREAM_INNER, path[0], path[1], path[2]],
        ));
        let (mut fit_idx, mut eval_idx) = (Vec::new(), Vec::new());
        for members in per_class.values() {
            let mut m = members.clone();
            m.shuffle(&mut rng);
            let n = m.len();
            let k = ((frac * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1));
            fit_idx.extend_from_slice(&m[..k]);
            eval_idx.extend_from_slice(&m[k..]);
        }
        let fit_stack = Stack::new(data, &fit_idx, classes);
        let eval_stack = Stack::new(data, &eval_idx, classes);
        let fit_seed = derive_seed(cfg.seed, &[STREAM_FIT, path[0], path[1], path[2]]);
        let (front, z) = fit_front(&fit_stack, &cfg.reduction, None, fit_seed, ctx, observer)?;
        let avail = z.width();
        let dims: Vec<usize> = match &explicit {
            Some(g) => {
                skipped.extend(g.iter().copied().filter(|&v| v > avail));
                g.iter().copied().filter(|&v| v <= avail).collect()
            }
            None => (1..=avail).collect(),
        };
        if dims.is_empty() {
            continue;
        }
        let models = learner.fit_prefixes(&z, &fit_stack.labels, &dims, fit_seed)?;
        observer.on_fit(&FitEvent {
            stage: FitStage::Classifier,
            context: ctx,
            trials: &fit_stack.trials,
        });
        let mut errs = vec![0u64; dims.len()];
        for (r, (label, meta)) in eval_stack
            .x
            .iter_rows()
            .zip(eval_stack.labels.iter().zip(&eval_stack.meta))
        {
            front.apply_row(r, &mut buf, &mut row);
            for (e, (model, &d)) in errs.iter_mut().zip(models.iter().zip(&dims)) {
                if model.predict(&row[..d], meta)? != *label {
                    *e += 1;
                }
            }
        }
        for (d, e) in dims.iter().zip(errs) {
            let slot = errors.entry(*d).or_insert((0, 0));
            slot.0 += e;
            slot.1 += 1;
        }
    }
    let complete: Vec<(usize, u64)> = errors
        .into_iter()
        .filter(|(d, (_, n))| {
            if *n < reps {
                skipped.insert(*d);
            }
            *n == reps
        })
        .map(|(d, (e, _))| (d, e))
        .collect();
    if explicit.is_some() && !skipped.is_empty() {
        log::warn!("grid values {skipped:?} exceed the available dimensionality and were skipped");
    }
    let best = complete
        .iter()
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .ok_or_else(|| invalid("no grid value fits the available dimensionality"))?;
    Ok(Selection {
        value: best.0,
        errors: complete.clone(),
    })
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub repetition: usize,
    pub fold: usize,
    pub train: Vec<TrialKey>,
    pub test: Vec<TrialKey>,
    /// Retained dimensionality chosen by the inner loop.
    pub selected: Option<usize>,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub classes: Vec<MovementClass>,
    pub seed: u64,
    /// False when classes had unequal trial counts and were split unevenly.
    pub balanced: bool,
    pub folds: Vec<FoldRecord>,
    pub confusion: ConfusionMatrix,
    /// `100 · trace / total` of the aggregated matrix.
    pub accuracy: f64,
    pub mean_fold_accuracy: f64,
}

impl CvReport {
    pub fn fold_accuracies(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.accuracy).collect()
    }
}

/// Extracts features and runs the full protocol with the configured classifier.
pub fn five_by_two_cv(
    trials: &[Trial],
    cfg: &PipelineConfig,
    observer: &mut dyn FitObserver,
) -> Result<CvReport> {
    let data = extract_features(trials, cfg)?;
    cross_validate(&data, cfg, &SpecLearner(cfg.classifier.clone()), observer)
}

/// The repeated two-fold protocol over precomputed trial features.
pub fn cross_validate(
    data: &[TrialFeatures],
    cfg: &PipelineConfig,
    learner: &dyn Learner,
    observer: &mut dyn FitObserver,
) -> Result<CvReport> {
    let mut per_class: BTreeMap<MovementClass, Vec<usize>> = BTreeMap::new();
    for (i, t) in data.iter().enumerate() {
        per_class.entry(t.key.class).or_default().push(i);
    }
    if per_class.len() < 2 {
        return Err(invalid("cross-validation needs at least two classes"));
    }
    for list in per_class.values_mut() {
        list.sort_by(|&a, &b| data[a].key.cmp(&data[b].key));
    }
    let classes: Vec<MovementClass> = per_class.keys().copied().collect();
    let counts: Vec<usize> = per_class.values().map(Vec::len).collect();
    if counts.iter().any(|&n| n < 2) {
        return Err(invalid("every class needs at least two trials"));
    }
    let balanced = counts.iter().all(|&n| n == counts[0]);
    if !balanced {
        if cfg.protocol.strict_balance {
            return Err(invalid(format!(
                "unequal trial counts per class: {counts:?}"
            )));
        }
        log::warn!(
            "unequal trial counts per class {counts:?}; splitting each class as evenly as possible"
        );
    }
    if cfg.protocol.repetitions == 0 {
        return Err(invalid("at least one repetition is required"));
    }

    let mut folds = Vec::new();
    let mut total = ConfusionMatrix::new(classes.clone());
    for rep in 0..cfg.protocol.repetitions {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, &[STREAM_SPLIT, rep as u64]));
        let (mut half_a, mut half_b) = (Vec::new(), Vec::new());
        for list in per_class.values() {
            let mut m = list.clone();
            m.shuffle(&mut rng);
            let h = m.len() / 2;
            half_a.extend_from_slice(&m[..h]);
            half_b.extend_from_slice(&m[h..]);
        }
        for (fold, (train, test)) in [(&half_a, &half_b), (&half_b, &half_a)]
            .into_iter()
            .enumerate()
        {
            let context = FitContext {
                repetition: rep,
                fold,
                inner: None,
            };
            let record = run_fold(data, train, test, &classes, cfg, learner, context, observer)?;
            total.add(&record.confusion)?;
            folds.push(record);
        }
    }
    let mean_fold_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64;
    Ok(CvReport {
        classes,
        seed: cfg.seed,
        balanced,
        accuracy: total.accuracy(),
        confusion: total,
        folds,
        mean_fold_accuracy,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    data: &[TrialFeatures],
    train: &[usize],
    test: &[usize],
    classes: &[MovementClass],
    cfg: &PipelineConfig,
    learner: &dyn Learner,
    context: FitContext,
    observer: &mut dyn FitObserver,
) -> Result<FoldRecord> {
    let selected = match cfg.reduction.grid() {
        None => None,
        Some(grid) => {
            Some(nested_select(data, train, classes, cfg, learner, grid, context, observer)?.value)
        }
    };
    let train_stack = Stack::new(data, train, classes);
    let test_stack = Stack::new(data, test, classes);
    let fit_seed = derive_seed(
        cfg.seed,
        &[
            STREAM_FIT,
            context.repetition as u64,
            context.fold as u64,
            u64::MAX,
        ],
    );
    let (front, z) = fit_front(
        &train_stack,
        &cfg.reduction,
        selected,
        fit_seed,
        context,
        observer,
    )?;
    if let Some(s) = selected {
        if s > z.width() {
            log::warn!(
                "selected dimensionality {s} exceeds the {} available; using all",
                z.width()
            );
        }
    }
    let model = learner.fit(&z, &train_stack.labels, fit_seed)?;
    observer.on_fit(&FitEvent {
        stage: FitStage::Classifier,
        context,
        trials: &train_stack.trials,
    });
    let mut confusion = ConfusionMatrix::new(classes.to_vec());
    let (mut buf, mut row) = (Vec::new(), Vec::new());
    for (r, (label, meta)) in test_stack
        .x
        .iter_rows()
        .zip(test_stack.labels.iter().zip(&test_stack.meta))
    {
        front.apply_row(r, &mut buf, &mut row);
        confusion.record(*label, model.predict(&row, meta)?);
    }
    Ok(FoldRecord {
        repetition: context.repetition,
        fold: context.fold,
        train: train_stack.trials.clone(),
        test: test_stack.trials.clone(),
        selected,
        accuracy: confusion.accuracy(),
        confusion,
    })
}

/// A standardizer, reduction and classifier fitted on a whole dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub classes: Vec<MovementClass>,
    pub feature_names: Vec<String>,
    pub selected: Option<usize>,
    front: Front,
    pub model: crate::classify::TrainedModel,
}

impl TrainedPipeline {
    pub fn standardizer(&self) -> &StandardizerState {
        &self.front.std
    }

    pub fn reduction(&self) -> &ReductionModel {
        &self.front.red
    }

    pub fn predict_row(&self, row: &[f64]) -> Result<MovementClass> {
        if row.len() != self.front.std.input_width {
            return Err(invalid(format!(
                "row has {} features, the model expects {}",
                row.len(),
                self.front.std.input_width
            )));
        }
        let (mut buf, mut out) = (Vec::new(), Vec::new());
        self.front.apply_row(row, &mut buf, &mut out);
        Ok(self.classes[self.model.predict(&out)?])
    }
}

/// Fits the configured pipeline on every trial in `data`, running the inner
/// selection loop over all of them.
pub fn train_pipeline(
    data: &[TrialFeatures],
    feature_names: Vec<String>,
    cfg: &PipelineConfig,
    observer: &mut dyn FitObserver,
) -> Result<TrainedPipeline> {
    let classes: Vec<MovementClass> = {
        let mut c: Vec<MovementClass> = data.iter().map(|t| t.key.class).collect();
        c.sort();
        c.dedup();
        c
    };
    if classes.len() < 2 {
        return Err(invalid("training needs at least two classes"));
    }
    let all: Vec<usize> = (0..data.len()).collect();
    let context = FitContext {
        repetition: 0,
        fold: 0,
        inner: None,
    };
    let learner = SpecLearner(cfg.classifier.clone());
    let selected = match cfg.reduction.grid() {
        None => None,
        Some(grid) => {
            Some(nested_select(data, &all, &classes, cfg, &learner, grid, context, observer)?.value)
        }
    };
    let stack = Stack::new(data, &all, &classes);
    let fit_seed = derive_seed(cfg.seed, &[STREAM_FIT, u64::MAX]);
    let (front, z) = fit_front(
        &stack,
        &cfg.reduction,
        selected,
        fit_seed,
        context,
        observer,
    )?;
    let mut spec = cfg.classifier.clone();
    if let ClassifierSpec::Svm { smo, .. } = &mut spec {
        smo.seed = fit_seed;
    }
    let model = spec.train(&z, &stack.labels)?;
    observer.on_fit(&FitEvent {
        stage: FitStage::Classifier,
        context,
        trials: &stack.trials,
    });
    Ok(TrainedPipeline {
        classes,
        feature_names,
        selected,
        front,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_by_path() {
        let a = derive_seed(7, &[1, 0]);
        assert_ne!(a, derive_seed(7, &[1, 1]));
        assert_ne!(a, derive_seed(8, &[1, 0]));
        assert_eq!(a, derive_seed(7, &[1, 0]));
    }

    #[test]
    fn config_defaults_from_json() {
        let c: PipelineConfig =
            serde_json::from_str(r#"{"reduction":{"method":"relief","grid":[2,4]}}"#).unwrap();
        assert_eq!(
            c.reduction,
            Reduction::Relief {
                grid: Some(vec![2, 4]),
                samples: 5000
            }
        );
        assert_eq!(c.protocol.repetitions, 5);
        assert!(serde_json::from_str::<PipelineConfig>(r#"{"bogus":1}"#).is_err());
    }
}
