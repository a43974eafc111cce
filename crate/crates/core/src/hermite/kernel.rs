use rustfft::FftPlanner;

use super::basis::{HermiteBasis, MultiIndex};
use super::functions::{hermite_1d, hermite_table};
use super::grid::SampledFieldRn;
use super::transform::ScaledTransform;
use crate::{Error, Result, C64};

/// Sequences longer than this are convolved by FFT.
const DIRECT_CONVOLUTION_LIMIT: usize = 384;

/// `Φ_μ(x) = Π h_{μ_j}(x_j)`
pub fn phi_multi(mu: &MultiIndex, x: &[f64]) -> f64 {
    assert_eq!(mu.dim(), x.len(), "index and point dimensions differ");
    mu.entries()
        .iter()
        .zip(x)
        .map(|(&k, &xj)| hermite_1d(k, xj))
        .product()
}

/// `|λ|^{n/4} Φ_μ(|λ|^{1/2} x)`
pub fn scaled_phi(mu: &MultiIndex, lambda: f64, x: &[f64]) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::ZeroFrequency);
    }
    let s = lambda.abs();
    let xs: Vec<f64> = x.iter().map(|v| s.sqrt() * v).collect();
    Ok(s.powf(x.len() as f64 / 4.0) * phi_multi(mu, &xs))
}

/// Truncated linear convolution of two sequences, result length `len`.
fn convolve(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    if len <= DIRECT_CONVOLUTION_LIMIT {
        let mut out = vec![0.0; len];
        for (k, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..=k.min(a.len().saturating_sub(1)) {
                if let Some(bv) = b.get(k - i) {
                    s += a[i] * bv;
                }
            }
            *o = s;
        }
        return out;
    }
    let size = (a.len() + b.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa: Vec<C64> = (0..size).map(|i| C64::new(*a.get(i).unwrap_or(&0.0), 0.0)).collect();
    let mut fb: Vec<C64> = (0..size).map(|i| C64::new(*b.get(i).unwrap_or(&0.0), 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let norm = 1.0 / size as f64;
    fa.iter().take(len).map(|v| v.re * norm).collect()
}

/// `[Φ_0(x,y), …, Φ_kmax(x,y)]` by convolving the one-dimensional products
/// `h_j(x_a) h_j(y_a)` across axes.
pub fn level_kernels(x: &[f64], y: &[f64], kmax: usize) -> Vec<f64> {
    assert_eq!(x.len(), y.len(), "point dimensions differ");
    let mut acc: Option<Vec<f64>> = None;
    for (&xa, &ya) in x.iter().zip(y) {
        let hx = hermite_table(kmax, xa);
        let p: Vec<f64> = if xa == ya {
            hx.iter().map(|v| v * v).collect()
        } else {
            let hy = hermite_table(kmax, ya);
            hx.iter().zip(&hy).map(|(a, b)| a * b).collect()
        };
        acc = Some(match acc {
            None => p,
            Some(prev) => convolve(&prev, &p, kmax + 1),
        });
    }
    acc.unwrap_or_default()
}

/// `Φ_k(x, y) = Σ_{|μ|=k} Φ_μ(x) Φ_μ(y)`, summed over the basis in its
/// fixed lexicographic order.
pub fn projection_kernel(k: usize, x: &[f64], y: &[f64], basis: &HermiteBasis) -> Result<f64> {
    if k > basis.max_level() {
        return Err(Error::LevelOutOfRange {
            level: k,
            max: basis.max_level(),
        });
    }
    check_point(basis, x)?;
    check_point(basis, y)?;
    let tx: Vec<Vec<f64>> = x.iter().map(|&v| hermite_table(k, v)).collect();
    let ty: Vec<Vec<f64>> = y.iter().map(|&v| hermite_table(k, v)).collect();
    let mut s = 0.0;
    for i in basis.level_range(k)? {
        s += product(basis.index(i), &tx, &ty);
    }
    Ok(s)
}

fn check_point(basis: &HermiteBasis, x: &[f64]) -> Result<()> {
    if x.len() != basis.dim() {
        return Err(Error::Shape(format!(
            "point has {} coordinates, basis dimension is {}",
            x.len(),
            basis.dim()
        )));
    }
    Ok(())
}

fn product(mu: &MultiIndex, tx: &[Vec<f64>], ty: &[Vec<f64>]) -> f64 {
    mu.entries()
        .iter()
        .enumerate()
        .map(|(a, &m)| tx[a][m] * ty[a][m])
        .product()
}

/// `M_ψ(x,y) = Σ_{|μ| ≤ K} ψ(|μ|) Φ_μ(x) Φ_μ(y)`.
pub fn m_psi_kernel(psi: &[f64], x: &[f64], y: &[f64], basis: &HermiteBasis) -> Result<f64> {
    let k = basis.max_level();
    if psi.len() <= k {
        return Err(Error::Length {
            needed: k + 1,
            have: psi.len(),
        });
    }
    check_point(basis, x)?;
    check_point(basis, y)?;
    let tx: Vec<Vec<f64>> = x.iter().map(|&v| hermite_table(k, v)).collect();
    let ty: Vec<Vec<f64>> = y.iter().map(|&v| hermite_table(k, v)).collect();
    let mut s = 0.0;
    for i in 0..basis.count_through(k) {
        let mu = basis.index(i);
        let c = psi[mu.order()];
        if c != 0.0 {
            s += c * product(mu, &tx, &ty);
        }
    }
    Ok(s)
}

/// `P_k(λ) f = Σ_{|μ|=k} (f, Φ_μ^λ) Φ_μ^λ`.
pub fn apply_projection(k: usize, lambda: f64, f: &SampledFieldRn) -> Result<SampledFieldRn> {
    let tr = ScaledTransform::new(f.grid(), lambda, k)?;
    let values = tr.apply_level_weights(f.values(), |l| {
        C64::new(if l == k { 1.0 } else { 0.0 }, 0.0)
    });
    Ok(SampledFieldRn::from_parts(f.grid().clone(), values))
}

/// `sup_x Φ_k(x,x)` over a set of points, for every `k ≤ kmax`.
pub fn diagonal_sup(points: &[Vec<f64>], kmax: usize) -> Vec<f64> {
    let mut sup = vec![0.0f64; kmax + 1];
    for p in points {
        for (s, v) in sup.iter_mut().zip(level_kernels(p, p, kmax)) {
            *s = s.max(v);
        }
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn level_kernels_agree_with_basis_sums() {
        let basis = HermiteBasis::new(3, 9, 0).unwrap();
        let x = [0.3, -1.1, 0.7];
        let y = [1.4, 0.2, -0.5];
        let fast = level_kernels(&x, &y, 9);
        for k in 0..=9 {
            let slow = projection_kernel(k, &x, &y, &basis).unwrap();
            assert!((fast[k] - slow).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn fft_convolution_matches_direct() {
        let a: Vec<f64> = (0..600).map(|i| (i as f64 * 0.3).sin() / (1.0 + i as f64)).collect();
        let b: Vec<f64> = (0..600).map(|i| (i as f64 * 0.7).cos() / (1.0 + i as f64)).collect();
        let fft = convolve(&a, &b, 600);
        for k in [0, 1, 17, 300, 599] {
            let direct: f64 = (0..=k).map(|i| a[i] * b[k - i]).sum();
            assert!((fft[k] - direct).abs() < 1e-13, "k = {k}");
        }
    }

    #[test]
    fn origin_values_in_the_plane() {
        // Φ_k(0,0) = 1/π for even k and 0 for odd k when n = 2
        let d = level_kernels(&[0.0, 0.0], &[0.0, 0.0], 800);
        for (k, v) in d.iter().enumerate() {
            let expect = if k % 2 == 0 { 1.0 / PI } else { 0.0 };
            assert!((v - expect).abs() < 1e-12, "k = {k}: {v}");
        }
    }

    #[test]
    fn m_psi_requires_enough_values() {
        let basis = HermiteBasis::new(2, 4, 0).unwrap();
        assert!(matches!(
            m_psi_kernel(&[1.0; 4], &[0.0, 0.0], &[0.0, 0.0], &basis),
            Err(Error::Length { .. })
        ));
    }
}
