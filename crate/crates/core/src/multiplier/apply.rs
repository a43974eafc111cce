use std::sync::Arc;

use crate::hermite::{GridSpec, SampledFieldRn, ScaledTransform};
use crate::multiplier::MultiplierSpec;
use crate::{Result, C64};

/// `[m((2k+n)|λ|) : k ≤ K]`
pub fn level_weights(spec: &MultiplierSpec, lambda: f64, n: usize, k: usize) -> Result<Vec<C64>> {
    (0..=k)
        .map(|j| spec.eval((2 * j + n) as f64 * lambda.abs()))
        .collect()
}

/// A field analysed once against the scaled system at one `λ`, so that many
/// multipliers can be applied for the cost of a synthesis each.
#[derive(Clone, Debug)]
pub struct FiberExpansion {
    transform: ScaledTransform,
    coeffs: Vec<C64>,
    levels: Vec<usize>,
}

impl FiberExpansion {
    pub fn new(f: &SampledFieldRn, lambda: f64, k: usize) -> Result<Self> {
        let transform = ScaledTransform::new(f.grid(), lambda, k)?;
        Self::with_transform(transform, f.values())
    }

    pub fn with_transform(transform: ScaledTransform, values: &[C64]) -> Result<Self> {
        let levels = transform.box_levels();
        let k = transform.level();
        let mut coeffs = transform.analyze(values);
        for (c, &l) in coeffs.iter_mut().zip(&levels) {
            if l > k {
                *c = C64::new(0.0, 0.0);
            }
        }
        Ok(Self {
            transform,
            coeffs,
            levels,
        })
    }

    pub fn transform(&self) -> &ScaledTransform {
        &self.transform
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        self.transform.grid()
    }

    /// Box coefficients; entries with `|μ| > K` are zero.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn levels(&self) -> &[usize] {
        &self.levels
    }

    pub fn level(&self) -> usize {
        self.transform.level()
    }

    /// `Σ_k w_k P_k(λ) f` on the grid.
    pub fn apply(&self, weights: &[C64]) -> Vec<C64> {
        let c: Vec<C64> = self
            .coeffs
            .iter()
            .zip(&self.levels)
            .map(|(c, &l)| weights.get(l).map_or(C64::new(0.0, 0.0), |w| c * w))
            .collect();
        self.transform.synthesize(&c)
    }

    pub fn apply_spec(&self, spec: &MultiplierSpec) -> Result<SampledFieldRn> {
        let n = self.grid().dim();
        let w = level_weights(spec, self.transform.scale(), n, self.level())?;
        Ok(SampledFieldRn::from_parts(self.grid().clone(), self.apply(&w)))
    }

    /// `Σ_k |w_k|² ‖P_k(λ) f‖²`, the spectral-side squared norm.
    pub fn spectral_norm_sqr(&self, weights: &[C64]) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.levels)
            .map(|(c, &l)| weights.get(l).map_or(0.0, |w| (c * w).norm_sqr()))
            .sum()
    }
}

/// `m(H(λ)) f = Σ_{k ≤ K} m((2k+n)|λ|) P_k(λ) f`.
pub fn apply_multiplier(spec: &MultiplierSpec, lambda: f64, f: &SampledFieldRn, k: usize) -> Result<SampledFieldRn> {
    FiberExpansion::new(f, lambda, k)?.apply_spec(spec)
}
