use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::hermite::{GridSpec, SampledFieldRn};
use crate::{Error, Result, C64};

/// Uniform periodic grid `t_j = jT/N` on `[0, T)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    period: f64,
    count: usize,
}

impl TimeGrid {
    pub fn new(period: f64, count: usize) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Domain(format!("period must be positive, got {period}")));
        }
        if count < 2 || !count.is_multiple_of(2) {
            return Err(Error::Domain(format!("t-grid needs an even node count, got {count}")));
        }
        Ok(Self { period, count })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        self.period / self.count as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.step()
    }

    /// Wave numbers `k = -N/2, ..., N/2 - 1`.
    pub fn wave_numbers(&self) -> std::ops::Range<i64> {
        let h = (self.count / 2) as i64;
        -h..h
    }

    /// `λ_k = 2πk/T`
    pub fn frequency(&self, k: i64) -> f64 {
        2.0 * PI * k as f64 / self.period
    }

    fn slot(&self, k: i64) -> usize {
        k.rem_euclid(self.count as i64) as usize
    }
}

/// Samples `f(x, t)` stored row-major with `t` varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    x_grid: Arc<GridSpec>,
    t_grid: TimeGrid,
    values: Vec<C64>,
}

impl SpaceTimeField {
    pub fn new(x_grid: Arc<GridSpec>, t_grid: TimeGrid, values: Vec<C64>) -> Result<Self> {
        let needed = x_grid.len() * t_grid.len();
        if values.len() != needed {
            return Err(Error::Length {
                needed,
                have: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("field samples must be finite".into()));
        }
        Ok(Self { x_grid, t_grid, values })
    }

    pub fn zeros(x_grid: Arc<GridSpec>, t_grid: TimeGrid) -> Self {
        let len = x_grid.len() * t_grid.len();
        Self {
            x_grid,
            t_grid,
            values: vec![C64::new(0.0, 0.0); len],
        }
    }

    pub fn from_fn<F: Fn(&[f64], f64) -> C64>(x_grid: Arc<GridSpec>, t_grid: TimeGrid, f: F) -> Self {
        let mut values = Vec::with_capacity(x_grid.len() * t_grid.len());
        for i in 0..x_grid.len() {
            let x = x_grid.point(i);
            values.extend((0..t_grid.len()).map(|j| f(&x, t_grid.node(j))));
        }
        Self { x_grid, t_grid, values }
    }

    pub(crate) fn from_parts(x_grid: Arc<GridSpec>, t_grid: TimeGrid, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), x_grid.len() * t_grid.len());
        Self { x_grid, t_grid, values }
    }

    pub fn x_grid(&self) -> &Arc<GridSpec> {
        &self.x_grid
    }

    pub fn t_grid(&self) -> TimeGrid {
        self.t_grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, x: usize, t: usize) -> C64 {
        self.values[x * self.t_grid.len() + t]
    }

    /// `L²(ℝ^{n+1})` norm by grid quadrature in `x` and the rectangle rule in `t`.
    pub fn l2_norm(&self) -> f64 {
        let w = self.x_grid.weights();
        let nt = self.t_grid.len();
        let s: f64 = self
            .values
            .chunks(nt)
            .zip(&w)
            .map(|(row, w)| w * row.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum();
        (s * self.t_grid.step()).sqrt()
    }

    /// `L^p(ℝ^{n+1})` norm with the same quadrature as [`Self::l2_norm`].
    pub fn lp_norm(&self, p: f64) -> f64 {
        let w = self.x_grid.weights();
        let nt = self.t_grid.len();
        let s: f64 = self
            .values
            .chunks(nt)
            .zip(&w)
            .map(|(row, w)| w * row.iter().map(|v| v.norm().powf(p)).sum::<f64>())
            .sum();
        (s * self.t_grid.step()).powf(1.0 / p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self::from_parts(self.x_grid.clone(), self.t_grid, values))
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self::from_parts(
            self.x_grid.clone(),
            self.t_grid,
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self.t_grid != other.t_grid || *self.x_grid != *other.x_grid {
            return Err(Error::Shape("fields live on different grids".into()));
        }
        Ok(())
    }
}

/// One nonzero frequency slice `f^λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    pub k: i64,
    pub lambda: f64,
    pub field: SampledFieldRn,
}

/// The slices `f^λ(x) = ∫ f(x,t) e^{iλt} dt` on the discrete frequencies, with
/// the `λ = 0` slice kept apart.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyDecomposition {
    x_grid: Arc<GridSpec>,
    t_grid: TimeGrid,
    fibers: Vec<Fiber>,
    zero_mode: SampledFieldRn,
}

impl FrequencyDecomposition {
    pub fn x_grid(&self) -> &Arc<GridSpec> {
        &self.x_grid
    }

    pub fn t_grid(&self) -> TimeGrid {
        self.t_grid
    }

    /// Nonzero frequencies in increasing `k`.
    pub fn fibers(&self) -> &[Fiber] {
        &self.fibers
    }

    pub fn fibers_mut(&mut self) -> &mut [Fiber] {
        &mut self.fibers
    }

    pub fn fiber(&self, k: i64) -> Option<&Fiber> {
        self.fibers.iter().find(|f| f.k == k)
    }

    pub fn zero_mode(&self) -> &SampledFieldRn {
        &self.zero_mode
    }

    pub fn zero_mode_mut(&mut self) -> &mut SampledFieldRn {
        &mut self.zero_mode
    }

    /// `(1/T) Σ_k ‖f^{λ_k}‖²`, the discrete Plancherel side of `‖f‖²`.
    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self
            .fibers
            .iter()
            .map(|f| f.field.l2_norm().powi(2))
            .sum::<f64>()
            + self.zero_mode.l2_norm().powi(2);
        s / self.t_grid.period()
    }
}

/// `f^λ_k(x) = (T/N) Σ_j f(x, t_j) e^{iλ_k t_j}` for every `k`.
pub fn t_transform(f: &SpaceTimeField) -> FrequencyDecomposition {
    let nt = f.t_grid.len();
    let mut rows = f.values.clone();
    let fft = FftPlanner::new().plan_fft(nt, FftDirection::Inverse);
    let scale = f.t_grid.step();
    rows.par_chunks_mut(nt).for_each(|row| {
        fft.process(row);
        for v in row.iter_mut() {
            *v *= scale;
        }
    });
    let slice = |k: i64| {
        let s = f.t_grid.slot(k);
        let values = rows.chunks(nt).map(|row| row[s]).collect();
        SampledFieldRn::from_parts(f.x_grid.clone(), values)
    };
    let fibers = f
        .t_grid
        .wave_numbers()
        .filter(|&k| k != 0)
        .map(|k| Fiber {
            k,
            lambda: f.t_grid.frequency(k),
            field: slice(k),
        })
        .collect();
    FrequencyDecomposition {
        x_grid: f.x_grid.clone(),
        t_grid: f.t_grid,
        fibers,
        zero_mode: slice(0),
    }
}

/// `f(x, t_j) = (1/T) Σ_k f^λ_k(x) e^{-iλ_k t_j}`
pub fn inverse_t_transform(d: &FrequencyDecomposition) -> SpaceTimeField {
    let nt = d.t_grid.len();
    let nx = d.x_grid.len();
    let mut rows = vec![C64::new(0.0, 0.0); nx * nt];
    let mut place = |k: i64, field: &SampledFieldRn| {
        let s = d.t_grid.slot(k);
        for (i, v) in field.values().iter().enumerate() {
            rows[i * nt + s] = *v;
        }
    };
    place(0, &d.zero_mode);
    for f in &d.fibers {
        place(f.k, &f.field);
    }
    let fft = FftPlanner::new().plan_fft(nt, FftDirection::Forward);
    let scale = 1.0 / d.t_grid.period();
    rows.par_chunks_mut(nt).for_each(|row| {
        fft.process(row);
        for v in row.iter_mut() {
            *v *= scale;
        }
    });
    SpaceTimeField::from_parts(d.x_grid.clone(), d.t_grid, rows)
}

impl FrequencyDecomposition {
    /// A decomposition with every slice zero.
    pub fn zeros(x_grid: Arc<GridSpec>, t_grid: TimeGrid) -> Self {
        let fibers = t_grid
            .wave_numbers()
            .filter(|&k| k != 0)
            .map(|k| Fiber {
                k,
                lambda: t_grid.frequency(k),
                field: SampledFieldRn::zeros(x_grid.clone()),
            })
            .collect();
        Self {
            zero_mode: SampledFieldRn::zeros(x_grid.clone()),
            x_grid,
            t_grid,
            fibers,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Arc<GridSpec>, TimeGrid) {
        (
            Arc::new(GridSpec::uniform(1, 2.0, 5).unwrap()),
            TimeGrid::new(2.0 * PI, 8).unwrap(),
        )
    }

    #[test]
    fn single_frequency() {
        let (x, t) = setup();
        let f = SpaceTimeField::from_fn(x, t, |x, s| C64::new(1.0 + x[0], 0.0) * C64::from_polar(1.0, -2.0 * s));
        let d = t_transform(&f);
        for fib in d.fibers() {
            let m = fib.field.max_abs();
            if fib.k == 2 {
                let want = 2.0 * PI * 3.0;
                assert!((m - want).abs() < 1e-12, "{m}");
            } else {
                assert!(m < 1e-12);
            }
        }
        assert!(d.zero_mode().max_abs() < 1e-12);
    }

    #[test]
    fn round_trip_and_conjugate_symmetry() {
        let (x, t) = setup();
        let f = SpaceTimeField::from_fn(x, t, |x, s| C64::new((x[0] * 3.0 + s).sin() + s.cos().powi(3), 0.0));
        let d = t_transform(&f);
        let back = inverse_t_transform(&d);
        assert!(back.difference(&f).unwrap().max_abs() < 1e-12);
        for fib in d.fibers().iter().filter(|f| f.k > 0 && f.k < 4) {
            let neg = d.fiber(-fib.k).unwrap();
            for (a, b) in fib.field.values().iter().zip(neg.field.values()) {
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
        let plancherel = d.norm_sqr().sqrt();
        assert!((plancherel - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn odd_count_rejected() {
        assert!(TimeGrid::new(1.0, 7).is_err());
        assert!(TimeGrid::new(0.0, 8).is_err());
    }
}
