//! Spectral calculus for the Grushin operator `G = -Δ - |x|²∂_t²` on `R^{n+1}`.
//!
//! Functions of `G` are computed fiberwise: a Fourier transform in `t` turns `G`
//! into the family of scaled Hermite operators `H(λ) = -Δ + λ²|x|²`, whose
//! eigenfunctions are dilated Hermite functions with eigenvalues `(2k+n)|λ|`.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Bessel functions of complex order, the multiplier
//!   `m_α(u) = J_α(√u)/√u^α`, complex Gamma and quadrature rules.
//! * [`hermite`]: Hermite functions, grids, projections, kernels and
//!   raising operators.
//! * [`multiplier`]: the functional calculus of `H(λ)`, oscillatory kernels,
//!   maximal functions and the weighted `L²` test.
//! * [`grushin`]: the `(x, t)` layer: `t`-transform, `m(G)`, the wave
//!   propagator, dilations and the `λ d/dλ` family.
//! * [`lab`]: experiments, random batteries and persistent records.
//! * [`config`]: run configuration shared with the command line front end.
//! * [`selftest`]: the small-scale invariant suite.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod config;
pub mod error;
pub mod grushin;
pub mod hermite;
pub mod lab;
pub mod multiplier;
pub mod selftest;
pub mod specfun;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
