//! Standardization, PCA projection and RELIEF feature weighting.

mod pca;
mod relief;
mod standardize;

pub use pca::{pca_fit, pca_transform, PcaModel};
pub use relief::{
    ranking, relief, relief_e, select_by_threshold, select_top, ReliefVariant, ReliefWeights,
    DEFAULT_RELIEF_SAMPLES,
};
pub use standardize::{standardize_apply, standardize_fit, StandardizerState};
