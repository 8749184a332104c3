//! Estimation of latent positions on the unit circle from a noisy pairwise
//! affinity matrix.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: circle points, the geodesic metric, regular grids, the
//!   action of the orthogonal group `O(2)` and alignment quasi-metrics.
//! - [`model`]: affinity functions, bi-Lipschitz checks, position samplers
//!   and noisy matrix generation.
//! - [`spectral`]: symmetric eigendecomposition, the vanilla spectral
//!   embedding, projection onto regular positions and Fourier/spectral gaps.
//! - [`estimators`]: the localize-and-refine pipeline (QAP or spectral
//!   initial localization, per-point refinement, synchronized merge).
//! - [`seriation`]: the reduction to toroidal seriation and its loss.
//! - [`experiments`]: a seeded Monte Carlo harness with tidy CSV output.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod model;
pub mod par;
pub mod rng;
pub mod seriation;
pub mod spectral;

pub use error::{Error, Result};
pub use estimators::{localize_and_refine, EstimationReport, Initializer, PipelineOptions};
pub use geometry::{CirclePoint, Configuration, OrthogonalTransform, RegularGrid};
pub use model::{AffinityMatrix, AffinityModel, NoiseSpec};
