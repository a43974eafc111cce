//! Hermite functions on `R^n`, their scaled systems `Φ_μ^λ`, projection
//! kernels, raising operators and grid transforms.

mod basis;
mod closure;
mod functions;
mod grid;
mod kernel;
mod raising;
pub mod stencil;
mod transform;

pub use basis::{HermiteBasis, MultiIndex};
pub use functions::{hermite_1d, hermite_table, scaled_hermite_table};
pub use grid::{Axis, AxisRule, GridCertificate, GridSpec, SampledFieldRn, DEFAULT_GRAM_TOLERANCE};
pub use kernel::{
    apply_projection, diagonal_sup, level_kernels, m_psi_kernel, phi_multi, projection_kernel,
    scaled_phi,
};
pub use closure::{
    forward_difference, closure_residual, closure_terms, mean_value_difference, ClosureConstants,
    ClosureTerm,
};
pub use raising::{lowering_apply, raising_apply, KernelExpansion, Raising};
pub use transform::ScaledTransform;
