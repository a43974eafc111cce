use std::sync::Arc;

use rayon::prelude::*;

use super::basis::MultiIndex;
use super::functions::scaled_hermite_table;
use super::grid::{GridCertificate, GridSpec, DEFAULT_GRAM_TOLERANCE};
use crate::{Error, Result, C64};

/// `out[.., q, ..] = Σ_i mat[q, i] · data[.., i, ..]` along one axis of a
/// row-major tensor. Each output line is reduced in a fixed order, so the
/// result does not depend on how rayon splits the work.
pub(crate) fn contract_axis(
    data: &[C64],
    dims: &[usize],
    axis: usize,
    mat: &[f64],
    rows: usize,
) -> Vec<C64> {
    let d = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    debug_assert_eq!(data.len(), outer * d * inner);
    debug_assert_eq!(mat.len(), rows * d);
    let mut out = vec![C64::new(0.0, 0.0); outer * rows * inner];
    let min_len = (4096 / inner.max(1)).max(1);
    out.par_chunks_mut(inner)
        .with_min_len(min_len)
        .enumerate()
        .for_each(|(idx, chunk)| {
            let o = idx / rows;
            let q = idx % rows;
            let row = &mat[q * d..(q + 1) * d];
            let base = o * d * inner;
            for (i, &w) in row.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let src = &data[base + i * inner..base + (i + 1) * inner];
                for (a, b) in chunk.iter_mut().zip(src) {
                    *a += b * w;
                }
            }
        });
    out
}

/// Analysis and synthesis between grid samples and the coefficient box
/// `{μ : 0 ≤ μ_a ≤ level}` of the scaled system `Φ_μ^λ`.
///
/// Only coefficients with `|μ| ≤ level` are meaningful; the others are
/// computed by the tensor contraction but discarded by the callers.
#[derive(Clone, Debug)]
pub struct ScaledTransform {
    grid: Arc<GridSpec>,
    scale: f64,
    level: usize,
    /// per axis, `(level+1) × N_a`, entries `w_i h_k^λ(x_i)`
    analysis: Vec<Vec<f64>>,
    /// per axis, `N_a × (level+1)`, entries `h_k^λ(x_i)`
    synthesis: Vec<Vec<f64>>,
    certificate: GridCertificate,
}

impl ScaledTransform {
    pub fn new(grid: &Arc<GridSpec>, lambda: f64, level: usize) -> Result<Self> {
        Self::with_tolerance(grid, lambda, level, DEFAULT_GRAM_TOLERANCE)
    }

    pub fn with_tolerance(
        grid: &Arc<GridSpec>,
        lambda: f64,
        level: usize,
        tolerance: f64,
    ) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::ZeroFrequency);
        }
        let scale = lambda.abs();
        let certificate = grid.certify(level, scale, tolerance)?;
        let mut analysis = Vec::with_capacity(grid.dim());
        let mut synthesis = Vec::with_capacity(grid.dim());
        for axis in grid.axes() {
            let n = axis.len();
            let mut a = vec![0.0; (level + 1) * n];
            let mut s = vec![0.0; n * (level + 1)];
            for (i, (&x, &w)) in axis.nodes().iter().zip(axis.weights()).enumerate() {
                let t = scaled_hermite_table(level, scale, x);
                for k in 0..=level {
                    a[k * n + i] = w * t[k];
                    s[i * (level + 1) + k] = t[k];
                }
            }
            analysis.push(a);
            synthesis.push(s);
        }
        Ok(Self {
            grid: grid.clone(),
            scale,
            level,
            analysis,
            synthesis,
            certificate,
        })
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn certificate(&self) -> &GridCertificate {
        &self.certificate
    }

    pub fn box_shape(&self) -> Vec<usize> {
        vec![self.level + 1; self.grid.dim()]
    }

    pub fn box_len(&self) -> usize {
        (self.level + 1).pow(self.grid.dim() as u32)
    }

    /// Position of `μ` in the coefficient box.
    pub fn box_index(&self, mu: &MultiIndex) -> Option<usize> {
        let side = self.level + 1;
        mu.entries().iter().try_fold(0, |acc, &m| (m < side).then_some(acc * side + m))
    }

    /// `|μ|` of every box position.
    pub fn box_levels(&self) -> Vec<usize> {
        let side = self.level + 1;
        let mut out = vec![0usize];
        for _ in 0..self.grid.dim() {
            out = out
                .iter()
                .flat_map(|&l| (0..side).map(move |k| l + k))
                .collect();
        }
        out
    }

    /// Coefficients `(f, Φ_μ^λ)` over the box.
    pub fn analyze(&self, values: &[C64]) -> Vec<C64> {
        let mut dims = self.grid.shape();
        let mut data = values.to_vec();
        for a in 0..dims.len() {
            data = contract_axis(&data, &dims, a, &self.analysis[a], self.level + 1);
            dims[a] = self.level + 1;
        }
        data
    }

    /// `Σ_μ c_μ Φ_μ^λ` on the grid.
    pub fn synthesize(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut dims = self.box_shape();
        let mut data = coeffs.to_vec();
        for a in 0..dims.len() {
            let n = self.grid.axis(a).len();
            data = contract_axis(&data, &dims, a, &self.synthesis[a], n);
            dims[a] = n;
        }
        data
    }

    /// Analysis, pointwise weighting by `|μ|`, synthesis. Levels above
    /// `self.level()` are dropped.
    pub fn apply_level_weights<F: Fn(usize) -> C64>(&self, values: &[C64], weight: F) -> Vec<C64> {
        let mut coeffs = self.analyze(values);
        let weights: Vec<C64> = (0..=self.level).map(&weight).collect();
        for (c, l) in coeffs.iter_mut().zip(self.box_levels()) {
            *c = if l <= self.level { *c * weights[l] } else { C64::new(0.0, 0.0) };
        }
        self.synthesize(&coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::functions::hermite_1d;

    #[test]
    fn contraction_matches_naive_loop() {
        let dims = [3, 4, 2];
        let data: Vec<C64> = (0..24).map(|i| C64::new(i as f64, -(i as f64) / 3.0)).collect();
        let mat: Vec<f64> = (0..5 * 4).map(|i| (i as f64).sin()).collect();
        let out = contract_axis(&data, &dims, 1, &mat, 5);
        for o in 0..3 {
            for q in 0..5 {
                for r in 0..2 {
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..4 {
                        s += data[(o * 4 + i) * 2 + r] * mat[q * 4 + i];
                    }
                    assert!((out[(o * 5 + q) * 2 + r] - s).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn analysis_inverts_synthesis_on_the_box() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 9.0, 0.15).unwrap());
        let tr = ScaledTransform::new(&grid, 1.7, 10).unwrap();
        let coeffs: Vec<C64> = (0..tr.box_len())
            .map(|i| C64::new((i as f64 * 0.37).cos(), (i as f64 * 0.11).sin()))
            .collect();
        let back = tr.analyze(&tr.synthesize(&coeffs));
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn synthesis_places_scaled_functions() {
        let grid = Arc::new(GridSpec::uniform_spacing(1, 8.0, 0.1).unwrap());
        let tr = ScaledTransform::new(&grid, 2.0, 6).unwrap();
        let mu = MultiIndex::new(vec![3]).unwrap();
        let mut c = vec![C64::new(0.0, 0.0); tr.box_len()];
        c[tr.box_index(&mu).unwrap()] = C64::new(1.0, 0.0);
        let v = tr.synthesize(&c);
        for (i, x) in grid.axis(0).nodes().iter().enumerate() {
            let expect = 2f64.powf(0.25) * hermite_1d(3, 2f64.sqrt() * x);
            assert!((v[i].re - expect).abs() < 1e-14);
        }
    }
}
