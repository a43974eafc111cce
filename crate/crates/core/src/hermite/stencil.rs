//! Eighth-order central differences on uniform grids. Samples outside the
//! box are taken to be zero.

use super::grid::SampledFieldRn;
use crate::{Error, Result, C64};

const FIRST: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const SECOND_CENTER: f64 = -205.0 / 72.0;
const SECOND: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

fn stencil(
    values: &[C64],
    dims: &[usize],
    axis: usize,
    center: f64,
    coeffs: &[f64; 4],
    odd: bool,
    scale: f64,
) -> Vec<C64> {
    let d = dims[axis];
    let inner: usize = dims[axis + 1..].iter().product();
    let mut out = vec![C64::new(0.0, 0.0); values.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let i = (flat / inner) % d;
        let mut acc = values[flat] * center;
        for (s, &c) in coeffs.iter().enumerate() {
            let step = s + 1;
            let plus = if i + step < d { values[flat + step * inner] } else { C64::new(0.0, 0.0) };
            let minus = if i >= step { values[flat - step * inner] } else { C64::new(0.0, 0.0) };
            acc += if odd { (plus - minus) * c } else { (plus + minus) * c };
        }
        *o = acc * scale;
    }
    out
}

fn spacing(f: &SampledFieldRn) -> Result<f64> {
    f.grid()
        .spacing()
        .ok_or_else(|| Error::Shape("finite differences need a uniform grid with equal steps".into()))
}

/// Second difference along one axis of a row-major array, zero outside.
pub(crate) fn second_difference(values: &[C64], dims: &[usize], axis: usize, dx: f64) -> Vec<C64> {
    stencil(values, dims, axis, SECOND_CENTER, &SECOND, false, 1.0 / (dx * dx))
}

/// Second difference of one periodic sequence.
pub(crate) fn periodic_second_difference(row: &[C64], dt: f64) -> Vec<C64> {
    let n = row.len();
    (0..n)
        .map(|i| {
            let mut acc = row[i] * SECOND_CENTER;
            for (s, &c) in SECOND.iter().enumerate() {
                let step = s + 1;
                acc += (row[(i + step) % n] + row[(i + n * step - step) % n]) * c;
            }
            acc / (dt * dt)
        })
        .collect()
}

/// `∂_{x_axis} f`
pub fn derivative(f: &SampledFieldRn, axis: usize) -> Result<Vec<C64>> {
    let dx = spacing(f)?;
    Ok(stencil(f.values(), &f.grid().shape(), axis, 0.0, &FIRST, true, 1.0 / dx))
}

/// `Δ f`
pub fn laplacian(f: &SampledFieldRn) -> Result<Vec<C64>> {
    let dx = spacing(f)?;
    let dims = f.grid().shape();
    let mut out = vec![C64::new(0.0, 0.0); f.values().len()];
    for a in 0..dims.len() {
        let part = stencil(f.values(), &dims, a, SECOND_CENTER, &SECOND, false, 1.0 / (dx * dx));
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    Ok(out)
}

/// `(-Δ + λ²|x|²) f`
pub fn oscillator(f: &SampledFieldRn, lambda: f64) -> Result<Vec<C64>> {
    let lap = laplacian(f)?;
    let grid = f.grid();
    Ok(lap
        .iter()
        .zip(f.values())
        .enumerate()
        .map(|(i, (l, v))| {
            let r2: f64 = grid.point(i).iter().map(|x| x * x).sum();
            -l + v * (lambda * lambda * r2)
        })
        .collect())
}

/// `(-∂_{x_j} + c·x_j) f` on the grid.
pub fn raising_on_grid(f: &SampledFieldRn, axis: usize, c: f64) -> Result<Vec<C64>> {
    let d = derivative(f, axis)?;
    let grid = f.grid();
    Ok(d
        .iter()
        .zip(f.values())
        .enumerate()
        .map(|(i, (dv, v))| -dv + v * (c * grid.point(i)[axis]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::grid::GridSpec;
    use std::sync::Arc;

    #[test]
    fn gaussian_derivatives() {
        let grid = Arc::new(GridSpec::uniform_spacing(1, 8.0, 0.1).unwrap());
        let f = SampledFieldRn::from_fn(grid.clone(), |x| C64::new((-x[0] * x[0]).exp(), 0.0));
        let d = derivative(&f, 0).unwrap();
        let l = laplacian(&f).unwrap();
        for (i, x) in grid.axis(0).nodes().iter().enumerate() {
            let g = (-x * x).exp();
            assert!((d[i].re + 2.0 * x * g).abs() < 1e-6);
            assert!((l[i].re - (4.0 * x * x - 2.0) * g).abs() < 1e-6);
        }
    }
}
