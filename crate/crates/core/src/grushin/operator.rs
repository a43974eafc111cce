use rayon::prelude::*;

use super::field::{inverse_t_transform, t_transform, FrequencyDecomposition, SpaceTimeField};
use crate::hermite::stencil::{periodic_second_difference, second_difference};
use crate::hermite::SampledFieldRn;
use crate::multiplier::{level_weights, FiberExpansion, MultiplierSpec};
use crate::{Error, Result, C64};

/// Slices whose norm is below this fraction of the largest slice are treated
/// as zero, so that round-off in far frequencies never has to be certified.
pub const NEGLIGIBLE_FIBER: f64 = 1e-13;

/// What a fiberwise operation did with each frequency.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiberReport {
    pub applied: Vec<i64>,
    pub negligible: Vec<i64>,
    pub zero_mode_norm: f64,
}

fn reference_norm(ds: &[&FrequencyDecomposition]) -> f64 {
    ds.iter()
        .flat_map(|d| {
            d.fibers()
                .iter()
                .map(|f| f.field.l2_norm())
                .chain(std::iter::once(d.zero_mode().l2_norm()))
        })
        .fold(0.0, f64::max)
}

/// Which slices of a set of decompositions need work; the others are zeroed.
fn triage(ds: &mut [&mut FrequencyDecomposition]) -> FiberReport {
    let reference = reference_norm(&ds.iter().map(|d| &**d).collect::<Vec<_>>());
    let cut = NEGLIGIBLE_FIBER * reference;
    let mut report = FiberReport {
        zero_mode_norm: ds.iter().map(|d| d.zero_mode().l2_norm()).fold(0.0, f64::max),
        ..Default::default()
    };
    let count = ds[0].fibers().len();
    for i in 0..count {
        let k = ds[0].fibers()[i].k;
        let live = ds.iter().any(|d| d.fibers()[i].field.l2_norm() > cut);
        if live {
            report.applied.push(k);
        } else {
            report.negligible.push(k);
            for d in ds.iter_mut() {
                let f = &mut d.fibers_mut()[i].field;
                *f = SampledFieldRn::zeros(f.grid().clone());
            }
        }
    }
    report
}

fn zero_mode_is_negligible(report: &FiberReport, ds: &[&FrequencyDecomposition]) -> bool {
    report.zero_mode_norm <= NEGLIGIBLE_FIBER * reference_norm(ds)
}

/// `m(G) f` together with the per-frequency bookkeeping.
pub fn apply_m_g_with_report(spec: &MultiplierSpec, f: &SpaceTimeField, k: usize) -> Result<(SpaceTimeField, FiberReport)> {
    let mut d = t_transform(f);
    let report = triage(&mut [&mut d]);
    if spec.singular_at_zero() && !zero_mode_is_negligible(&report, &[&d]) {
        return Err(Error::ZeroMode(format!(
            "{} is singular at 0 but the λ = 0 slice has norm {:.3e}",
            spec.label, report.zero_mode_norm
        )));
    }
    let live: Vec<usize> = (0..d.fibers().len())
        .filter(|&i| report.applied.contains(&d.fibers()[i].k))
        .collect();
    let results: Vec<Result<SampledFieldRn>> = live
        .par_iter()
        .map(|&i| {
            let fib = &d.fibers()[i];
            FiberExpansion::new(&fib.field, fib.lambda, k)?.apply_spec(spec)
        })
        .collect();
    for (&i, r) in live.iter().zip(results) {
        d.fibers_mut()[i].field = r?;
    }
    Ok((inverse_t_transform(&d), report))
}

/// `m(G) f = (1/2π) ∫ e^{-iλt} m(H(λ)) f^λ dλ` on the discrete frequencies.
/// The `λ = 0` slice is carried unchanged when `m` is finite at 0.
pub fn apply_m_g(spec: &MultiplierSpec, f: &SpaceTimeField, k: usize) -> Result<SpaceTimeField> {
    apply_m_g_with_report(spec, f, k).map(|(g, _)| g)
}

/// `G f` through the eigenvalues `(2k+n)|λ|`.
pub fn apply_g_spectral(f: &SpaceTimeField, k: usize) -> Result<SpaceTimeField> {
    apply_m_g(&MultiplierSpec::power(1.0), f, k)
}

/// `G f = -Δ_x f - |x|² ∂_t² f` by eighth-order differences, zero outside the
/// box in `x` and periodic in `t`.
pub fn apply_g_direct(f: &SpaceTimeField) -> Result<SpaceTimeField> {
    let grid = f.x_grid();
    let dx = grid
        .spacing()
        .ok_or_else(|| Error::Shape("the direct method needs a uniform grid with equal steps".into()))?;
    let nt = f.t_grid().len();
    let mut dims = grid.shape();
    dims.push(nt);
    let mut out = vec![C64::new(0.0, 0.0); f.values().len()];
    for a in 0..grid.dim() {
        let part = second_difference(f.values(), &dims, a, dx);
        for (o, p) in out.iter_mut().zip(part) {
            *o -= p;
        }
    }
    let dt = f.t_grid().step();
    out.par_chunks_mut(nt)
        .zip(f.values().par_chunks(nt))
        .enumerate()
        .for_each(|(i, (o, row))| {
            let r2: f64 = grid.point(i).iter().map(|x| x * x).sum();
            for (o, d) in o.iter_mut().zip(periodic_second_difference(row, dt)) {
                *o -= d * r2;
            }
        });
    Ok(SpaceTimeField::from_parts(grid.clone(), f.t_grid(), out))
}

fn eigenvalues(lambda: f64, n: usize, k: usize) -> Vec<f64> {
    (0..=k).map(|j| (2 * j + n) as f64 * lambda.abs()).collect()
}

fn wave_weights(lambda: f64, n: usize, k: usize, s: f64) -> [Vec<C64>; 3] {
    let nu = eigenvalues(lambda, n, k);
    let cos = nu.iter().map(|v| C64::new((s * v.sqrt()).cos(), 0.0)).collect();
    let sinc = nu.iter().map(|v| C64::new((s * v.sqrt()).sin() / v.sqrt(), 0.0)).collect();
    let msin = nu.iter().map(|v| C64::new(-v.sqrt() * (s * v.sqrt()).sin(), 0.0)).collect();
    [cos, sinc, msin]
}

fn require_no_zero_mode(report: &FiberReport, ds: &[&FrequencyDecomposition]) -> Result<()> {
    if zero_mode_is_negligible(report, ds) {
        Ok(())
    } else {
        Err(Error::ZeroMode(format!(
            "the wave propagator needs zero mean in t; λ = 0 slice has norm {:.3e}",
            report.zero_mode_norm
        )))
    }
}

/// `u = sin(s√G)/√G f` and `u_s = cos(s√G) f`.
pub fn wave_propagate(f: &SpaceTimeField, s: f64, k: usize) -> Result<(SpaceTimeField, SpaceTimeField)> {
    let u0 = SpaceTimeField::zeros(f.x_grid().clone(), f.t_grid());
    wave_step(&u0, f, s, k)
}

/// Advances a state `(u, u_s)` by `s` through the addition formulas
/// `u' = cos(s√G) u + sin(s√G)/√G u_s`, `u_s' = -√G sin(s√G) u + cos(s√G) u_s`.
pub fn wave_step(u: &SpaceTimeField, us: &SpaceTimeField, s: f64, k: usize) -> Result<(SpaceTimeField, SpaceTimeField)> {
    u.check_same(us)?;
    let mut du = t_transform(u);
    let mut dv = t_transform(us);
    let report = triage(&mut [&mut du, &mut dv]);
    require_no_zero_mode(&report, &[&du, &dv])?;
    let n = u.x_grid().dim();
    let live: Vec<usize> = (0..du.fibers().len())
        .filter(|&i| report.applied.contains(&du.fibers()[i].k))
        .collect();
    let results: Vec<Result<(Vec<C64>, Vec<C64>)>> = live
        .par_iter()
        .map(|&i| {
            let (a, b) = (&du.fibers()[i], &dv.fibers()[i]);
            let [cos, sinc, msin] = wave_weights(a.lambda, n, k, s);
            let eu = FiberExpansion::new(&a.field, a.lambda, k)?;
            let ev = FiberExpansion::with_transform(eu.transform().clone(), b.field.values())?;
            let add = |x: Vec<C64>, y: Vec<C64>| x.into_iter().zip(y).map(|(x, y)| x + y).collect();
            Ok((
                add(eu.apply(&cos), ev.apply(&sinc)),
                add(eu.apply(&msin), ev.apply(&cos)),
            ))
        })
        .collect();
    for (&i, r) in live.iter().zip(results) {
        let (a, b) = r?;
        let g = du.x_grid().clone();
        du.fibers_mut()[i].field = SampledFieldRn::from_parts(g.clone(), a);
        dv.fibers_mut()[i].field = SampledFieldRn::from_parts(g, b);
    }
    Ok((inverse_t_transform(&du), inverse_t_transform(&dv)))
}

/// `‖u_s‖² + ‖G^{1/2} u‖²` from the fiberwise spectral coefficients.
pub fn wave_energy(u: &SpaceTimeField, us: &SpaceTimeField, k: usize) -> Result<f64> {
    u.check_same(us)?;
    let mut du = t_transform(u);
    let mut dv = t_transform(us);
    let report = triage(&mut [&mut du, &mut dv]);
    let n = u.x_grid().dim();
    let live: Vec<usize> = (0..du.fibers().len())
        .filter(|&i| report.applied.contains(&du.fibers()[i].k))
        .collect();
    let parts: Vec<Result<f64>> = live
        .par_iter()
        .map(|&i| {
            let (a, b) = (&du.fibers()[i], &dv.fibers()[i]);
            let root: Vec<C64> = eigenvalues(a.lambda, n, k)
                .iter()
                .map(|v| C64::new(v.sqrt(), 0.0))
                .collect();
            let ones = vec![C64::new(1.0, 0.0); k + 1];
            let eu = FiberExpansion::new(&a.field, a.lambda, k)?;
            let ev = FiberExpansion::with_transform(eu.transform().clone(), b.field.values())?;
            Ok(ev.spectral_norm_sqr(&ones) + eu.spectral_norm_sqr(&root))
        })
        .collect();
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total / u.t_grid().period())
}

/// Weights `m((2k+n)|λ|)` on every applied slice; exposed for per-eigenvalue checks.
pub fn fiber_weights(spec: &MultiplierSpec, d: &FrequencyDecomposition, k: usize) -> Result<Vec<(i64, Vec<C64>)>> {
    let n = d.x_grid().dim();
    d.fibers()
        .iter()
        .map(|f| Ok((f.k, level_weights(spec, f.lambda, n, k)?)))
        .collect()
}
