use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use super::apply::FiberExpansion;
use super::kernel::{kernel_weights, KernelFamily};
use crate::hermite::{GridSpec, SampledFieldRn};
use crate::multiplier::MultiplierSpec;
use crate::specfun::BesselOrder;
use crate::{Error, Result, C64};

/// Scale samples `2^{j/per_octave}` covering `[t_min, t_max]`.
pub fn dyadic_t_samples(t_min: f64, t_max: f64, per_octave: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min) || per_octave == 0 {
        return Err(Error::Domain(format!("bad scale window [{t_min}, {t_max}]")));
    }
    let p = per_octave as f64;
    let lo = (t_min.log2() * p).floor() as i64;
    let hi = (t_max.log2() * p).ceil() as i64;
    Ok((lo..=hi).map(|j| 2f64.powf(j as f64 / p)).collect())
}

/// `[2^-8, 2^8]` at ratio `√2`.
pub fn default_t_samples() -> Vec<f64> {
    dyadic_t_samples(2f64.powi(-8), 2f64.powi(8), 2).expect("valid window")
}

fn check_samples(ts: &[f64]) -> Result<()> {
    if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::Domain("scale samples must be positive and finite".into()));
    }
    if ts.windows(2).any(|w| !(w[1] > w[0]) || w[1] / w[0] > SQRT_2 * (1.0 + 1e-12)) {
        return Err(Error::InsufficientRange(
            "scale samples must increase with ratio at most √2".into(),
        ));
    }
    Ok(())
}

fn maximal_family(
    family: KernelFamily,
    order: BesselOrder,
    f: &SampledFieldRn,
    ts: &[f64],
    k: usize,
) -> Result<SampledFieldRn> {
    check_samples(ts)?;
    let exp = FiberExpansion::new(f, 1.0, k)?;
    let n = f.grid().dim();
    let mut sup = vec![0.0f64; f.values().len()];
    for &t in ts {
        let w = kernel_weights(family, order, t, n, k)?;
        let v = exp.apply(&w);
        for (s, v) in sup.iter_mut().zip(&v) {
            *s = s.max(v.norm());
        }
    }
    Ok(SampledFieldRn::from_parts(
        f.grid().clone(),
        sup.into_iter().map(|v| C64::new(v, 0.0)).collect(),
    ))
}

/// `sup_t |m_α(t² H) f|` over the sampled scales, at `λ = 1`.
pub fn maximal_t(order: BesselOrder, f: &SampledFieldRn, ts: &[f64], k: usize) -> Result<SampledFieldRn> {
    maximal_family(KernelFamily::Plain, order, f, ts, k)
}

/// `sup_t |t²H m_{α+1}(t² H) f|` over the sampled scales, at `λ = 1`.
pub fn maximal_energy(order: BesselOrder, f: &SampledFieldRn, ts: &[f64], k: usize) -> Result<SampledFieldRn> {
    maximal_family(KernelFamily::Energy, order, f, ts, k)
}

/// Ball radii: zero, dyadic multiples of the finest node spacing, and one
/// radius covering the whole box.
pub fn ball_radii(grid: &GridSpec) -> Vec<f64> {
    let h = grid
        .axes()
        .iter()
        .flat_map(|a| a.nodes().windows(2).map(|w| w[1] - w[0]))
        .fold(f64::INFINITY, f64::min);
    let diameter = 2.0 * grid.half_width() * (grid.dim() as f64).sqrt();
    let mut out = vec![0.0];
    let mut r = h;
    while r < diameter {
        out.push(r);
        r *= 2.0;
    }
    out.push(diameter * (1.0 + 1e-9));
    out
}

/// Prefix sums along the last axis, one extra zero per line.
fn line_prefix(values: &[f64], last: usize) -> Vec<f64> {
    let lines = values.len() / last;
    let mut out = Vec::with_capacity(lines * (last + 1));
    for l in 0..lines {
        let mut acc = 0.0;
        out.push(0.0);
        for v in &values[l * last..(l + 1) * last] {
            acc += v;
            out.push(acc);
        }
    }
    out
}

struct BallSums<'a> {
    grid: &'a GridSpec,
    mass: Vec<f64>,
    volume: Vec<f64>,
    last: usize,
}

impl BallSums<'_> {
    /// Sums of mass and volume over nodes within distance `√r2` of `center`.
    fn ball(&self, center: &[f64], r2: f64) -> (f64, f64) {
        let mut acc = (0.0, 0.0);
        self.recurse(center, r2, 0, 0, &mut acc);
        acc
    }

    fn recurse(&self, center: &[f64], rem: f64, axis: usize, line: usize, acc: &mut (f64, f64)) {
        let nodes = self.grid.axis(axis).nodes();
        let rho = rem.max(0.0).sqrt();
        let lo = nodes.partition_point(|&v| v < center[axis] - rho);
        let hi = nodes.partition_point(|&v| v <= center[axis] + rho);
        if axis + 1 == self.grid.dim() {
            if lo < hi {
                let base = line * (self.last + 1);
                acc.0 += self.mass[base + hi] - self.mass[base + lo];
                acc.1 += self.volume[base + hi] - self.volume[base + lo];
            }
            return;
        }
        for (j, &v) in nodes.iter().enumerate().take(hi).skip(lo) {
            let d = v - center[axis];
            self.recurse(center, rem - d * d, axis + 1, line * nodes.len() + j, acc);
        }
    }
}

/// `M_p f = (M|f|^p)^{1/p}` with centred balls of the radii from
/// [`ball_radii`], clipped to the box and normalised by the clipped volume.
pub fn hl_maximal(f: &SampledFieldRn, p: f64) -> Result<SampledFieldRn> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("maximal exponent must be ≥ 1, got {p}")));
    }
    let grid = f.grid().as_ref();
    let weights = grid.weights();
    let last = grid.axis(grid.dim() - 1).len();
    let powered: Vec<f64> = f
        .values()
        .iter()
        .zip(&weights)
        .map(|(v, w)| w * v.norm().powf(p))
        .collect();
    let sums = BallSums {
        grid,
        mass: line_prefix(&powered, last),
        volume: line_prefix(&weights, last),
        last,
    };
    let radii = ball_radii(grid);
    let values: Vec<C64> = (0..grid.len())
        .into_par_iter()
        .with_min_len(64)
        .map(|i| {
            let c = grid.point(i);
            let own = f.values()[i].norm().powf(p);
            let mut best = own;
            for &r in &radii[1..] {
                let (m, v) = sums.ball(&c, r * r);
                if v > 0.0 {
                    best = best.max(m / v);
                }
            }
            C64::new(best.powf(1.0 / p), 0.0)
        })
        .collect();
    Ok(SampledFieldRn::from_parts(f.grid().clone(), values))
}

/// `∫ |T_α(λ) f|² |φ| / ∫ |f|² Mφ` with `T_α(λ) = m_α(H(λ))`.
pub fn weighted_l2_test(
    order: BesselOrder,
    lambda: f64,
    f: &SampledFieldRn,
    phi: &SampledFieldRn,
    k: usize,
) -> Result<f64> {
    if f.grid() != phi.grid() && **f.grid() != **phi.grid() {
        return Err(Error::Shape("f and φ live on different grids".into()));
    }
    let tf = FiberExpansion::new(f, lambda, k)?.apply_spec(&MultiplierSpec::bessel(order))?;
    let mphi = hl_maximal(phi, 1.0)?;
    let w = f.grid().weights();
    let lhs: f64 = tf
        .values()
        .iter()
        .zip(phi.values())
        .zip(&w)
        .map(|((a, p), w)| w * a.norm_sqr() * p.norm())
        .sum();
    let rhs: f64 = f
        .values()
        .iter()
        .zip(mphi.values())
        .zip(&w)
        .map(|((a, m), w)| w * a.norm_sqr() * m.re)
        .sum();
    if !(rhs > 0.0) {
        return Err(Error::DegenerateRatio);
    }
    Ok(lhs / rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn constant_has_constant_maximal_function() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 2.0, 0.25).unwrap());
        let f = SampledFieldRn::from_fn(grid, |_| C64::new(2.5, 0.0));
        let m = hl_maximal(&f, 1.0).unwrap();
        assert!(m.values().iter().all(|v| (v.re - 2.5).abs() < 1e-12));
    }

    #[test]
    fn maximal_function_dominates() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 3.0, 0.25).unwrap());
        let f = SampledFieldRn::from_fn(grid, |x| C64::new((3.0 * x[0]).sin() * (-x[1] * x[1]).exp(), 0.2));
        for p in [1.0, 2.0] {
            let m = hl_maximal(&f, p).unwrap();
            for (a, b) in f.values().iter().zip(m.values()) {
                assert!(b.re >= a.norm() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn ball_sums_match_brute_force() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 1.0, 0.25).unwrap());
        let f = SampledFieldRn::from_fn(grid.clone(), |x| C64::new(1.0 + x[0] - 0.3 * x[1], 0.0));
        let w = grid.weights();
        let last = grid.axis(1).len();
        let vals: Vec<f64> = f.values().iter().zip(&w).map(|(v, w)| w * v.re).collect();
        let sums = BallSums {
            grid: &grid,
            mass: line_prefix(&vals, last),
            volume: line_prefix(&w, last),
            last,
        };
        let c = grid.point(12);
        for r in [0.3, 0.6, 1.1] {
            let (m, v) = sums.ball(&c, r * r);
            let mut bm = 0.0;
            let mut bv = 0.0;
            for i in 0..grid.len() {
                let p = grid.point(i);
                let d2: f64 = p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
                if d2 <= r * r {
                    bm += vals[i];
                    bv += w[i];
                }
            }
            assert!((m - bm).abs() < 1e-12 && (v - bv).abs() < 1e-12);
        }
    }

    #[test]
    fn sample_windows() {
        let t = default_t_samples();
        assert_eq!(t.len(), 33);
        assert!(check_samples(&t).is_ok());
        assert!(check_samples(&[1.0, 2.0]).is_err());
    }
}
