use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::hermite::{hermite_table, level_kernels, GridSpec, ScaledTransform};
use crate::specfun::{m_alpha, BesselOrder};
use crate::{Error, Result, C64};

/// A truncated kernel value is flagged when its tail bound exceeds this
/// multiple of `1 + |value|`.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Conservative constant in `Φ_k(x,x) ≤ C (2k+n)^{e(n)}` used by the tail
/// bound; the measured suprema stay well below it for `n ≤ 3`.
pub const DIAGONAL_CONSTANT: f64 = 1.0;

/// Fraction of `∫|K|²` allowed in the outer layers of the box before an
/// annulus computation is refused.
pub const COVERAGE_TOLERANCE: f64 = 1e-10;
const EDGE_LAYERS: usize = 3;

/// Growth exponent of the diagonal `sup_x Φ_k(x,x)`: `n/2 - 1` for
/// `n ≥ 2`; in one dimension the global supremum decays only like `k^{-1/6}`.
pub fn diagonal_exponent(n: usize) -> f64 {
    if n == 1 {
        -1.0 / 6.0
    } else {
        n as f64 / 2.0 - 1.0
    }
}

/// Which kernel family: `m_α(t²H)` or `t²H m_{α+1}(t²H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Plain,
    Energy,
}

impl KernelFamily {
    fn symbol(self, order: BesselOrder, u: f64) -> Result<C64> {
        match self {
            Self::Plain => m_alpha(order, u),
            Self::Energy => Ok(m_alpha(order.shifted(1.0), u)? * u),
        }
    }

    /// Exponent `a` in `|symbol(u)| ≤ c · (√u)^{-a}` for large `u`.
    fn decay(self, order: BesselOrder) -> f64 {
        match self {
            Self::Plain => order.re + 0.5,
            Self::Energy => order.re - 0.5,
        }
    }
}

/// Truncated kernel value with its tail bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: C64,
    pub tail_bound: f64,
    pub truncation_sufficient: bool,
}

/// `[symbol(t²(2k+n)) : k ≤ K]`
pub fn kernel_weights(family: KernelFamily, order: BesselOrder, t: f64, n: usize, k: usize) -> Result<Vec<C64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("kernel scale t must be positive, got {t}")));
    }
    (0..=k)
        .map(|j| family.symbol(order, t * t * (2 * j + n) as f64))
        .collect()
}

/// Measured `sup_u |symbol(u)|` and `sup_{u ≥ 1} |symbol(u)| u^{a/2}` over a
/// dyadic sample with eight points per octave.
fn symbol_constants(family: KernelFamily, order: BesselOrder) -> Result<(f64, f64)> {
    let a = family.decay(order);
    let mut small = 0.0f64;
    let mut large = 0.0f64;
    for j in -80..=128 {
        let u = 2f64.powf(j as f64 / 8.0);
        let v = family.symbol(order, u)?.norm();
        small = small.max(v);
        if u >= 1.0 {
            large = large.max(v * u.powf(a / 2.0));
        }
    }
    Ok((small, large))
}

/// Bound on `Σ_{k > K} |symbol(t²(2k+n))| · C (2k+n)^{e(n)}` from dyadic
/// blocks; infinite when the block sums do not decay.
pub fn tail_bound(family: KernelFamily, order: BesselOrder, t: f64, n: usize, k: usize) -> Result<f64> {
    block_tail(family, order, t, n, k, 1.0)
}

/// As [`tail_bound`] for `Σ_{k > K} |symbol|² Φ_k(x,x)`, the tail of the
/// series returned by [`parseval_l2`].
pub fn parseval_tail_bound(family: KernelFamily, order: BesselOrder, t: f64, n: usize, k: usize) -> Result<f64> {
    block_tail(family, order, t, n, k, 2.0)
}

fn block_tail(family: KernelFamily, order: BesselOrder, t: f64, n: usize, k: usize, power: f64) -> Result<f64> {
    let (small, large) = symbol_constants(family, order)?;
    let (small, large) = (small.powf(power), large.powf(power));
    let a = family.decay(order) * power;
    let de = diagonal_exponent(n);
    let nf = n as f64;
    // levels with t²(2k+n) < 1 only obey the uniform bound
    let first_large = (((1.0 / (t * t)) - nf) / 2.0).ceil().max(0.0) as usize;
    let mut bound = 0.0;
    let start = if first_large > k + 1 {
        let count = (first_large - k - 1) as f64;
        bound += count * small * DIAGONAL_CONSTANT * (2.0 * first_large as f64 + nf).powf(de.max(0.0));
        first_large
    } else {
        k + 1
    };
    // power-law part: term ≤ c t^{-a} D (2j+n)^{e}, e = de - a/2
    let e = de - a / 2.0;
    if e >= -1.0 {
        return Ok(f64::INFINITY);
    }
    let lead = large * t.powf(-a) * DIAGONAL_CONSTANT;
    let s = start as f64;
    // block [s 2^i, s 2^{i+1}) holds s 2^i terms each ≤ lead (2 s 2^i)^e
    let blocks = lead * 2f64.powf(e) * s.powf(e + 1.0) / (1.0 - 2f64.powf(e + 1.0));
    bound += blocks;
    Ok(bound)
}

fn kernel_value(
    family: KernelFamily,
    order: BesselOrder,
    t: f64,
    x: &[f64],
    y: &[f64],
    k: usize,
) -> Result<KernelValue> {
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Shape("kernel points must share a positive dimension".into()));
    }
    let n = x.len();
    let w = kernel_weights(family, order, t, n, k)?;
    let phi = level_kernels(x, y, k);
    let value: C64 = w.iter().zip(&phi).map(|(w, p)| w * p).sum();
    let tail = tail_bound(family, order, t, n, k)?;
    Ok(KernelValue {
        value,
        tail_bound: tail,
        truncation_sufficient: tail <= TAIL_TOLERANCE * (1.0 + value.norm()),
    })
}

/// `K_t^α(x,y) = Σ_{k ≤ K} m_α(t²(2k+n)) Φ_k(x,y)`
pub fn kernel_k(order: BesselOrder, t: f64, x: &[f64], y: &[f64], k: usize) -> Result<KernelValue> {
    kernel_value(KernelFamily::Plain, order, t, x, y, k)
}

/// `K̃_t^α(x,y) = Σ_{k ≤ K} t²(2k+n) m_{α+1}(t²(2k+n)) Φ_k(x,y)`
pub fn kernel_k_tilde(order: BesselOrder, t: f64, x: &[f64], y: &[f64], k: usize) -> Result<KernelValue> {
    kernel_value(KernelFamily::Energy, order, t, x, y, k)
}

/// `y ↦ K(x, y)` at every node, by synthesis of the coefficients
/// `w_{|μ|} Φ_μ(x)`.
pub fn kernel_on_grid(
    family: KernelFamily,
    order: BesselOrder,
    t: f64,
    x: &[f64],
    grid: &Arc<GridSpec>,
    k: usize,
) -> Result<Vec<C64>> {
    if x.len() != grid.dim() {
        return Err(Error::Shape("base point and grid dimensions differ".into()));
    }
    let w = kernel_weights(family, order, t, grid.dim(), k)?;
    let tr = ScaledTransform::new(grid, 1.0, k)?;
    let tables: Vec<Vec<f64>> = x.iter().map(|&v| hermite_table(k, v)).collect();
    let side = k + 1;
    let mut coeffs = vec![C64::new(0.0, 0.0); tr.box_len()];
    for (pos, c) in coeffs.iter_mut().enumerate() {
        let mut rem = pos;
        let mut level = 0;
        let mut phi = 1.0;
        for a in (0..grid.dim()).rev() {
            let m = rem % side;
            rem /= side;
            level += m;
            phi *= tables[a][m];
        }
        if level <= k {
            *c = w[level] * phi;
        }
    }
    Ok(tr.synthesize(&coeffs))
}

/// Annulus norms of one kernel section `y ↦ K_t^α(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProfile {
    pub order: BesselOrder,
    pub family: KernelFamily,
    pub t: f64,
    pub x: Vec<f64>,
    pub n: usize,
    pub truncation: usize,
    pub radii: Vec<f64>,
    /// `∫_{|x-y| > r} |K(x,y)|² dy`
    pub l2: Vec<f64>,
    /// `sup_{|x-y| > r} |K(x,y)|`
    pub sup: Vec<f64>,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("radii must be finite, nonnegative and strictly increasing".into()));
    }
    Ok(())
}

pub fn kernel_profile(
    family: KernelFamily,
    order: BesselOrder,
    t: f64,
    x: &[f64],
    radii: &[f64],
    grid: &Arc<GridSpec>,
    k: usize,
) -> Result<KernelProfile> {
    check_radii(radii)?;
    let values = kernel_on_grid(family, order, t, x, grid, k)?;
    let weights = grid.weights();
    let shape = grid.shape();
    let mut total = 0.0;
    let mut edge = 0.0;
    let mut dist = Vec::with_capacity(values.len());
    for (i, (v, w)) in values.iter().zip(&weights).enumerate() {
        let p = grid.point(i);
        let d: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        dist.push(d);
        let m = w * v.norm_sqr();
        total += m;
        let on_edge = grid
            .coords(i)
            .iter()
            .zip(&shape)
            .any(|(&c, &len)| c < EDGE_LAYERS || c + EDGE_LAYERS >= len);
        if on_edge {
            edge += m;
        }
    }
    if edge > COVERAGE_TOLERANCE * total {
        return Err(Error::GridCoverage(format!(
            "kernel keeps a fraction {:.2e} of its mass at the box edge",
            edge / total
        )));
    }
    let mut l2 = Vec::with_capacity(radii.len());
    let mut sup = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut s = 0.0;
        let mut m = 0.0f64;
        for ((v, w), d) in values.iter().zip(&weights).zip(&dist) {
            if *d > r {
                s += w * v.norm_sqr();
                m = m.max(v.norm());
            }
        }
        l2.push(s);
        sup.push(m);
    }
    Ok(KernelProfile {
        order,
        family,
        t,
        x: x.to_vec(),
        n: grid.dim(),
        truncation: k,
        radii: radii.to_vec(),
        l2,
        sup,
    })
}

/// `∫_{|x-y|>r} |K_t^α(x,y)|² dy` by grid quadrature.
pub fn annulus_l2(order: BesselOrder, t: f64, x: &[f64], r: f64, grid: &Arc<GridSpec>, k: usize) -> Result<f64> {
    Ok(kernel_profile(KernelFamily::Plain, order, t, x, &[r], grid, k)?.l2[0])
}

/// `sup_{|x-y|>r} |K_t^α(x,y)|` over grid nodes.
pub fn annulus_sup(order: BesselOrder, t: f64, x: &[f64], r: f64, grid: &Arc<GridSpec>, k: usize) -> Result<f64> {
    Ok(kernel_profile(KernelFamily::Plain, order, t, x, &[r], grid, k)?.sup[0])
}

/// `Σ_{k ≤ K} |symbol(t²(2k+n))|² Φ_k(x,x)`, the full `L²` norm of the
/// truncated kernel section by orthogonality.
pub fn parseval_l2(family: KernelFamily, order: BesselOrder, t: f64, x: &[f64], k: usize) -> Result<f64> {
    let w = kernel_weights(family, order, t, x.len(), k)?;
    let d = level_kernels(x, x, k);
    Ok(w.iter().zip(&d).map(|(w, d)| w.norm_sqr() * d).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_is_symmetric_and_matches_level_sum() {
        let order = BesselOrder::real(1.0);
        let x = [0.3, -0.4];
        let y = [-1.0, 0.8];
        let a = kernel_k(order, 0.5, &x, &y, 40).unwrap();
        let b = kernel_k(order, 0.5, &y, &x, 40).unwrap();
        assert!((a.value - b.value).norm() < 1e-14);
    }

    #[test]
    fn tail_bound_tracks_summability() {
        let order = BesselOrder::real(1.0);
        // n = 2: terms decay like k^{-3/4}, not summable
        assert!(tail_bound(KernelFamily::Plain, order, 0.5, 2, 100).unwrap().is_infinite());
        let high = BesselOrder::real(4.0);
        let b1 = tail_bound(KernelFamily::Plain, high, 0.5, 2, 100).unwrap();
        let b2 = tail_bound(KernelFamily::Plain, high, 0.5, 2, 400).unwrap();
        assert!(b1.is_finite() && b2 < b1);
    }

    #[test]
    fn grid_section_matches_pointwise_kernel() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 8.0, 0.2).unwrap());
        let order = BesselOrder::real(2.0);
        let x = [0.4, -0.2];
        let v = kernel_on_grid(KernelFamily::Plain, order, 0.7, &x, &grid, 12).unwrap();
        for i in [0usize, 700, 3000, 6000] {
            let y = grid.point(i);
            let p = kernel_k(order, 0.7, &x, &y, 12).unwrap();
            assert!((v[i] - p.value).norm() < 1e-12);
        }
    }
}
