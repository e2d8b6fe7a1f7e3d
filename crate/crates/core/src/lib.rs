//! Mutual-information band selection for hyperspectral cubes.
//!
//! Bands are ranked by their mutual information with a ground-truth map and
//! then added greedily: each candidate is averaged into an estimated
//! reference map and kept only if that raises the estimate's MI with the
//! ground truth by more than a threshold. Selected subsets are scored with a
//! nearest-centroid classifier on a seeded train/test split.
//!
//! - [`cube`]: cube and label-map types, file formats, quantization
//! - [`info`]: entropy, mutual information, Fano bounds
//! - [`selector`]: ranking and greedy selection
//! - [`synth`]: synthetic scenes for testing the pipeline
//! - [`evaluator`]: train/test split and classification accuracy
//! - [`cli`]: the `mibandsel` command line

pub mod cli;
pub mod cube;
pub mod error;
pub mod evaluator;
pub mod fsio;
pub mod info;
pub mod selector;
pub mod synth;

pub use cube::{GroundTruth, HyperCube, QuantizedImage, RealImage};
pub use error::{Error, Result};
pub use evaluator::{evaluate_subset, EvalReport, SplitSpec};
pub use info::{entropy, fano_bounds, mutual_information, FanoBounds, JointHistogram, PixelMask};
pub use selector::{
    rank_bands, select_bands, BandScore, Reference, SelectionConfig, SelectionResult,
};
