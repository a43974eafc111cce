use serde::{Deserialize, Serialize};

use super::fit::{fit_loglog, LineFit};
use super::thresholds::INCONCLUSIVE_RESIDUAL;
use crate::hermite::hermite_1d;
use crate::{Error, Result};

pub const GLOBAL_TARGET: f64 = -1.0 / 6.0;
pub const COMPACT_TARGET: f64 = -0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub fit: LineFit,
    pub target: f64,
    pub inconclusive: bool,
}

impl SlopeFit {
    fn new(ks: &[usize], values: &[f64], target: f64) -> Result<Self> {
        let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let fit = fit_loglog(&xs, values)?;
        Ok(Self {
            fit,
            target,
            inconclusive: fit.residual > INCONCLUSIVE_RESIDUAL,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct N1Diagnostic {
    pub levels: Vec<usize>,
    /// `sup_x h_k(x)²`
    pub global: Vec<f64>,
    /// `sup_{x ∈ B} h_k(x)²`
    pub compact: Vec<f64>,
    pub window: (f64, f64),
    pub global_fit: SlopeFit,
    pub compact_fit: SlopeFit,
}

/// About `count` distinct levels spaced logarithmically on `[kmin, kmax]`.
pub fn log_levels(kmin: usize, kmax: usize, count: usize) -> Vec<usize> {
    let lo = kmin.max(1) as f64;
    let hi = kmax.max(kmin.max(1)) as f64;
    let mut out: Vec<usize> = (0..count.max(2))
        .map(|i| (lo * (hi / lo).powf(i as f64 / (count.max(2) - 1) as f64)).round() as usize)
        .collect();
    out.dedup();
    out
}

/// Golden-section maximisation of `h_k²` on `[a, b]`, assumed unimodal there.
fn refine(k: usize, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |x: f64| hermite_1d(k, x).powi(2);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

/// Sampled scan of `[a, b]` at `per_wave` points per local wavelength
/// `π/√(2k+1)`, refined around the best sample.
fn scan(k: usize, a: f64, b: f64, per_wave: f64) -> f64 {
    let step = std::f64::consts::PI / (2.0 * k as f64 + 1.0).sqrt() / per_wave;
    let m = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / m as f64;
    let (best, _) = (0..=m)
        .map(|i| {
            let x = a + i as f64 * h;
            (x, hermite_1d(k, x).powi(2))
        })
        .fold((a, -1.0), |acc, (x, v)| if v > acc.1 { (x, v) } else { acc });
    refine(k, (best - h).max(a), (best + h).min(b))
}

/// `sup_x h_k(x)²`. By symmetry only `x ≥ 0` is searched, over a window of
/// a few Airy widths `(2k+1)^{-1/6}` around the turning point `√(2k+1)`,
/// where the outermost and largest oscillation sits.
pub fn global_sup(k: usize) -> f64 {
    let turn = (2.0 * k as f64 + 1.0).sqrt();
    let w = (2.0 * k as f64 + 1.0).powf(-1.0 / 6.0);
    scan(k, (turn - 8.0 * w).max(0.0), turn + 2.0 * w, 32.0)
}

/// `sup_{x ∈ [a, b]} h_k(x)²`.
pub fn compact_sup(k: usize, window: (f64, f64)) -> f64 {
    scan(k, window.0, window.1, 32.0)
}

/// Slopes of `log sup h_k²` against `log k`, globally and on `window`.
/// Level 0 carries no asymptotics and is dropped.
pub fn n1_diagnostic(levels: &[usize], window: (f64, f64)) -> Result<N1Diagnostic> {
    if !(window.0 < window.1) || !window.0.is_finite() || !window.1.is_finite() {
        return Err(Error::Domain(format!("empty window [{}, {}]", window.0, window.1)));
    }
    let levels: Vec<usize> = levels.iter().copied().filter(|&k| k > 0).collect();
    let global: Vec<f64> = levels.iter().map(|&k| global_sup(k)).collect();
    let compact: Vec<f64> = levels.iter().map(|&k| compact_sup(k, window)).collect();
    Ok(N1Diagnostic {
        global_fit: SlopeFit::new(&levels, &global, GLOBAL_TARGET)?,
        compact_fit: SlopeFit::new(&levels, &compact, COMPACT_TARGET)?,
        levels,
        global,
        compact,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels_match_dense_scan() {
        for k in [1, 2, 5, 12] {
            let dense = (0..40001)
                .map(|i| hermite_1d(k, -10.0 + i as f64 * 5e-4).powi(2))
                .fold(0.0, f64::max);
            assert!((global_sup(k) - dense).abs() < 1e-6 * dense, "k = {k}");
        }
    }

    #[test]
    fn level_zero_dropped() {
        let d = n1_diagnostic(&[0, 4, 8, 16], (-1.0, 1.0)).unwrap();
        assert_eq!(d.levels, vec![4, 8, 16]);
    }

    #[test]
    fn log_levels_are_increasing() {
        let l = log_levels(100, 2000, 12);
        assert_eq!(l.first(), Some(&100));
        assert_eq!(l.last(), Some(&2000));
        assert!(l.windows(2).all(|w| w[0] < w[1]));
    }
}
