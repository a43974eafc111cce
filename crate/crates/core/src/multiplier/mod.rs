//! Functional calculus of the fiber operators `H(λ) = -Δ + λ²|x|²`.

mod apply;
mod kernel;
mod maximal;
mod spec;

pub use apply::{apply_multiplier, level_weights, FiberExpansion};
pub use kernel::{
    annulus_l2, annulus_sup, diagonal_exponent, kernel_k, kernel_k_tilde, kernel_on_grid,
    kernel_profile, kernel_weights, parseval_l2, parseval_tail_bound, tail_bound, KernelFamily, KernelProfile,
    KernelValue, COVERAGE_TOLERANCE, DIAGONAL_CONSTANT, TAIL_TOLERANCE,
};
pub use maximal::{
    ball_radii, default_t_samples, dyadic_t_samples, hl_maximal, maximal_energy, maximal_t,
    weighted_l2_test,
};
pub use spec::{MultiplierSpec, Symbol};
