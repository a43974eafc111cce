//! Bessel functions of complex order, the multiplier `m_α`, and supporting
//! Gamma and quadrature routines.
//!
//! All functions are pure and thread-safe.

mod bessel;
mod dd;
mod gamma;
pub mod quadrature;

pub use bessel::{
    bessel_j, bessel_j_asymptotic, bessel_j_series, half_integer_j, m_alpha,
    m_alpha_prime_residual, order_lift, poisson_bessel, poisson_nodes, series_limit, AdmissibleConstant,
    BesselOrder,
};
pub use gamma::{complex_gamma, reciprocal_gamma};
