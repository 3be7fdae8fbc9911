//! File formats, wire framing, synthetic data and report rendering.

mod dataset;
mod report;
mod simplot;
mod synth;
mod trial_text;

pub use dataset::{read_feature_dataset, write_feature_dataset};
pub use report::{confusion_csv, folds_csv, format_report_text, format_subject_table};
pub use simplot::{
    simplot_decode, simplot_encode, SimplotDecoder, SimplotFrame, HEADER, MAX_CHANNELS,
};
pub use synth::{default_profile, generate_synthetic, ClassProfile, Resonance, SynthConfig};
pub use trial_text::{
    format_channels, format_trial, parse_channels, parse_trial_text, trial_path, write_trials,
    ChannelLayout, TrialFileManifest,
};
