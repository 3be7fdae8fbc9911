//! Surface-EMG hand movement recognition.
//!
//! The crate covers the whole path from a raw multi-channel recording to an
//! evaluated classifier:
//!
//! - [`signal`]: trials, IEMG onset detection and overlapping windows
//! - [`emd`]: empirical mode decomposition and Hilbert instantaneous frequency
//! - [`features`]: time/frequency-domain features and per-window vectors
//! - [`dimred`]: standardization, PCA and RELIEF feature weighting
//! - [`classify`]: LDC, k-NN, PNN, SMO-trained SVM and centroid classifiers
//! - [`eval`]: trial-level 5×2 cross-validation with nested model selection
//! - [`io`]: trial text files, feature datasets, SimPlot framing, synthetic data

pub mod classify;
pub mod dimred;
pub mod emd;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod matrix;
pub mod signal;

pub use error::{Error, Result};
