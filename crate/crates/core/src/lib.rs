//! # curvlab
//!
//! Numerical verification of synthetic lower Ricci curvature bounds on
//! one-dimensional weighted metric measure spaces.
//!
//! A model space is one of the line, the half-line, a compact interval or a
//! circle, carrying a reference measure `m = e^{-f} H^1`. On top of this the
//! crate provides:
//!
//! - [`coefficients`]: distortion coefficients `σ^{(t)}_{K,N}(θ)`, the model
//!   volume density `S_{K,N}` and its antiderivative `F(r) = ∫ S^{N-1}`.
//! - [`space1d`]: balls, spheres, boundary measures, disintegration and
//!   pointed rescaling.
//! - [`transport1d`]: exact quadratic optimal transport on the line and the
//!   circle via quantile functions, displacement interpolation, and the
//!   Shannon and Rényi entropies relative to `m`.
//! - [`curvature`]: `(K,N)`-convexity of weights, the entropic `CD^e(K,N)` and
//!   `CD(K,∞)` inequalities along Wasserstein geodesics, and the obstruction
//!   that rules out circles under positive curvature.
//! - [`geometry_scan`]: Bishop–Gromov ratio scans, boundary-measure bounds,
//!   linear ball growth, density ratios and the Lipschitz modulus of
//!   `x ↦ m(B_r(x))/r`, plus a classifier for model spaces.
//! - [`branching`]: the tripod, branching transport plans and the failure of
//!   entropy convexity under branching.
//! - [`cli`]: the `curvlab` command-line front end.
//!
//! Every check reports a signed margin (negative means the inequality holds)
//! instead of a bare boolean, so discretization error stays visible.

// `!(a > b)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branching;
pub mod cli;
pub mod coefficients;
pub mod curvature;
mod error;
pub mod geometry_scan;
pub mod quadrature;
pub mod space1d;
pub mod transport1d;

pub use error::{Error, Result};

/// Version string written into every report.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
