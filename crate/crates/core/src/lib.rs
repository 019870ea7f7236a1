//! Numerical differential geometry of subspace-averaged Ricci curvatures.
//!
//! The crate evaluates curvature tensors of coordinate charts through nested
//! forward-mode dual numbers, averages sectional curvatures over tangent
//! d-planes (intrinsic and normal/mixed means), assembles the Weitzenböck
//! curvature endomorphism on d-vectors, and cross-checks everything against
//! closed-form model manifolds and Jacobi-field volume expansions.
//!
//! Entry points:
//! - [`chart::MetricChart`] wraps a smooth metric over an axis-aligned box.
//! - [`curvature`] turns a chart into Christoffel symbols and the full
//!   curvature tensor at a point.
//! - [`frame::SubspaceFrame`] and [`means`] compute the subspace means.
//! - [`weitzenboeck`] builds the curvature endomorphism on Λ^d and pairs it
//!   with simple d-vectors.
//! - [`expansion`] fits the r² defect of geodesic-sphere volume densities.
//! - [`catalogue`] holds the model manifolds and their exact oracles.
//! - [`verify`] runs the whole consistency suite over the catalogue.

// Index-based loops mirror the tensor notation throughout.
#![allow(clippy::needless_range_loop)]

pub mod autodiff;
pub mod catalogue;
pub mod chart;
pub mod curvature;
pub mod error;
pub mod expansion;
pub mod fd;
pub mod frame;
pub mod geodesic;
pub mod kappa;
pub mod linalg;
pub mod means;
pub mod report;
pub mod verify;
pub mod wedge;
pub mod weitzenboeck;

pub use error::{Error, Result};

/// Default RNG seed shared by every sampling routine.
pub const DEFAULT_SEED: u64 = 0x5EED;
