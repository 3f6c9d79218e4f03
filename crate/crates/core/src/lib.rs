//! Single-image super-resolution by self-optimizing fractional-order
//! gradient interpolation over a linear spatial pyramid.
//!
//! Each pyramid level doubles the resolution in three steps:
//!
//! 1. [`pyramid::optimize_alpha`] interpolates the level with Grünwald–Letnikov
//!    directional masks for every order on a grid and keeps the order whose
//!    result best agrees with the input after blur and decimation.
//! 2. The winning interpolation and its gradient field become the starting
//!    point and target gradient of [`reconstruct::reconstruct`], which
//!    minimizes a fidelity plus gradient-similarity energy with an
//!    accumulated-gradient descent.
//! 3. The reconstructed image feeds the next level.
//!
//! [`metrics`] provides RMSE, SSIM and GLCM texture features for evaluating
//! results, and [`cli`] wraps everything in the `fracsr` command.

pub mod cli;
pub mod config;
mod error;
pub mod fracgrad;
pub mod gradient;
pub mod imaging;
pub mod metrics;
pub mod pipeline;
pub mod pyramid;
pub mod reconstruct;

pub use config::{AlphaMode, ColorMode, PipelineConfig};
pub use error::{Error, Result};
pub use gradient::GradientField;
pub use imaging::{GaussianKernel, Image, ScaleFactor};
pub use pipeline::{super_resolve, upscale, LevelReport, SuperResolution};
pub use reconstruct::ReconstructionConfig;
