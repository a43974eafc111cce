//! The Grushin operator `G = -Δ - |x|²∂_t²` on `ℝ^{n+1}`.
//!
//! Fields are sampled on a product of an `x`-grid and a periodic `t`-grid.
//! Every operator works slice by slice in the `t`-frequency `λ`, where `G`
//! acts as `H(λ) = -Δ + λ²|x|²`.

mod container;
mod dilation;
mod fiber;
mod field;
mod operator;

pub use container::{
    decode_field, encode_field, read_field, write_field, ByteOrder, FieldContainer, MAGIC,
    MAX_SAMPLES, VERSION,
};
pub use dilation::dilate;
pub use fiber::{
    czo_block, derivative_family, derivative_family_fd, derivative_terms, DerivativeTerms,
    S_DOUBLING_TOLERANCE, S_NODES,
};
pub use field::{inverse_t_transform, t_transform, Fiber, FrequencyDecomposition, SpaceTimeField, TimeGrid};
pub use operator::{
    apply_g_direct, apply_g_spectral, apply_m_g, apply_m_g_with_report, fiber_weights,
    wave_energy, wave_propagate, wave_step, FiberReport, NEGLIGIBLE_FIBER,
};
