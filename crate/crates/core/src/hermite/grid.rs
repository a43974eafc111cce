use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::functions::{hermite_1d, scaled_hermite_table};
use crate::{Error, Result, C64};

/// Default per-axis tolerance of the scaled Gram test.
pub const DEFAULT_GRAM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AxisRule {
    /// Uniform nodes with trapezoid weights; spectrally accurate for the
    /// rapidly decaying integrands met here.
    Trapezoid,
    GaussHermite,
}

/// One-dimensional quadrature axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rule: AxisRule,
}

impl Axis {
    /// `count` equispaced nodes on `[-half_width, half_width]`. The count
    /// must be odd so that `0` is a node and dilation by two is exact
    /// subsampling.
    pub fn uniform(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::Shape(format!("half-width must be positive, got {half_width}")));
        }
        if count < 3 || count.is_multiple_of(2) {
            return Err(Error::Shape(format!("uniform axis needs an odd count ≥ 3, got {count}")));
        }
        let m = (count / 2) as f64;
        let dx = half_width / m;
        let nodes: Vec<f64> = (0..count)
            .map(|i| (i as f64 - m) / m * half_width)
            .collect();
        let mut weights = vec![dx; count];
        weights[0] *= 0.5;
        weights[count - 1] *= 0.5;
        Ok(Self {
            nodes,
            weights,
            rule: AxisRule::Trapezoid,
        })
    }

    /// Gauss–Hermite nodes with weights for plain Lebesgue measure, so that
    /// `Σ w_i f(x_i) ≈ ∫ f`. Exact for `h_j h_k` with `j + k < 2·count`.
    pub fn gauss_hermite(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Shape("Gauss–Hermite axis needs at least one node".into()));
        }
        // Golub–Welsch for the starting values, Newton on h_count to polish.
        let jacobi = DMatrix::from_fn(count, count, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let nf = count as f64;
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let h = hermite_1d(count, *x);
                let d = (2.0 * nf).sqrt() * hermite_1d(count - 1, *x) - *x * h;
                if d != 0.0 {
                    *x -= h / d;
                }
            }
        }
        let weights = nodes
            .iter()
            .map(|&x| {
                let h = hermite_1d(count - 1, x);
                1.0 / (nf * h * h)
            })
            .collect();
        Ok(Self {
            nodes,
            weights,
            rule: AxisRule::GaussHermite,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rule(&self) -> AxisRule {
        self.rule
    }

    pub fn half_width(&self) -> f64 {
        self.nodes[self.len() - 1].max(-self.nodes[0])
    }

    /// Node spacing of a uniform axis.
    pub fn spacing(&self) -> Option<f64> {
        match self.rule {
            AxisRule::Trapezoid => Some(self.weights[1]),
            AxisRule::GaussHermite => None,
        }
    }

    /// `max |G_jk - δ_jk|` for the Gram matrix of the scaled functions
    /// `h_k^λ`, `j, k ≤ level`.
    pub fn gram_defect(&self, level: usize, scale: f64) -> f64 {
        let tables: Vec<Vec<f64>> = self
            .nodes
            .iter()
            .map(|&x| scaled_hermite_table(level, scale, x))
            .collect();
        let mut worst = 0.0f64;
        for j in 0..=level {
            for k in j..=level {
                let g: f64 = tables
                    .iter()
                    .zip(&self.weights)
                    .map(|(t, w)| w * t[j] * t[k])
                    .sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// Tensor-product quadrature grid on a box in `R^n`. Flat indices are
/// row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
}

/// Passed scaled Gram test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCertificate {
    pub level: usize,
    pub scale: f64,
    /// Bound on the entrywise Gram defect of the full tensor system.
    pub defect: f64,
    pub tolerance: f64,
}

impl GridSpec {
    pub fn from_axes(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Shape("grid needs at least one axis".into()));
        }
        Ok(Self { axes })
    }

    pub fn uniform(n: usize, half_width: f64, count: usize) -> Result<Self> {
        let axis = Axis::uniform(half_width, count)?;
        Self::from_axes(vec![axis; n])
    }

    /// Uniform grid with spacing `dx`; `half_width / dx` must be an integer.
    pub fn uniform_spacing(n: usize, half_width: f64, dx: f64) -> Result<Self> {
        let m = half_width / dx;
        if !(dx > 0.0) || (m - m.round()).abs() > 1e-9 || m.round() < 1.0 {
            return Err(Error::Shape(format!(
                "half-width {half_width} is not a multiple of the spacing {dx}"
            )));
        }
        Self::uniform(n, half_width, 2 * m.round() as usize + 1)
    }

    pub fn gauss_hermite(n: usize, count: usize) -> Result<Self> {
        let axis = Axis::gauss_hermite(count)?;
        Self::from_axes(vec![axis; n])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, a: usize) -> &Axis {
        &self.axes[a]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn half_width(&self) -> f64 {
        self.axes.iter().map(Axis::half_width).fold(0.0, f64::max)
    }

    /// Common spacing when every axis is uniform with the same step.
    pub fn spacing(&self) -> Option<f64> {
        let d = self.axes[0].spacing()?;
        self.axes
            .iter()
            .all(|a| a.spacing() == Some(d))
            .then_some(d)
    }

    /// Per-axis indices of a flat index.
    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            let len = self.axes[a].len();
            out[a] = flat % len;
            flat /= len;
        }
        out
    }

    pub fn flat(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&c, a)| acc * a.len() + c)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.coords(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&c, a)| a.nodes[c])
            .collect()
    }

    pub fn weight(&self, flat: usize) -> f64 {
        self.coords(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&c, a)| a.weights[c])
            .product()
    }

    /// All node weights in flat order.
    pub fn weights(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        for axis in &self.axes {
            out = out
                .iter()
                .flat_map(|&w| axis.weights.iter().map(move |v| w * v))
                .collect();
        }
        out
    }

    /// All nodes in flat order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Entrywise defect bound `Π(1 + d_a) - 1` of the tensor Gram matrix.
    pub fn gram_defect(&self, level: usize, scale: f64) -> f64 {
        let mut product = 1.0;
        let mut seen: Vec<(&Axis, f64)> = Vec::new();
        for axis in &self.axes {
            let d = match seen.iter().find(|(a, _)| *a == axis) {
                Some((_, d)) => *d,
                None => {
                    let d = axis.gram_defect(level, scale);
                    seen.push((axis, d));
                    d
                }
            };
            product *= 1.0 + d;
        }
        product - 1.0
    }

    pub fn certify(&self, level: usize, scale: f64, tolerance: f64) -> Result<GridCertificate> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::ZeroFrequency);
        }
        let defect = self.gram_defect(level, scale);
        if !(defect <= tolerance) {
            return Err(Error::Certificate {
                level,
                scale,
                defect,
                tolerance,
            });
        }
        Ok(GridCertificate {
            level,
            scale,
            defect,
            tolerance,
        })
    }

    /// Short human-readable description used in experiment records.
    pub fn signature(&self) -> String {
        let a = &self.axes[0];
        let rule = match a.rule {
            AxisRule::Trapezoid => "uniform",
            AxisRule::GaussHermite => "gauss-hermite",
        };
        let uniform = self.axes.iter().all(|b| b == a);
        if uniform {
            format!("{rule}:n={}:nodes={}:L={}", self.dim(), a.len(), a.half_width())
        } else {
            let shape: Vec<String> = self.shape().iter().map(|s| s.to_string()).collect();
            format!("{rule}:n={}:nodes={}:L={}", self.dim(), shape.join("x"), self.half_width())
        }
    }
}

/// Complex samples on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFieldRn {
    grid: Arc<GridSpec>,
    values: Vec<C64>,
}

impl SampledFieldRn {
    pub fn new(grid: Arc<GridSpec>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Length {
                needed: grid.len(),
                have: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("field samples must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<GridSpec>) -> Self {
        let len = grid.len();
        Self {
            grid,
            values: vec![C64::new(0.0, 0.0); len],
        }
    }

    pub fn from_fn<F: Fn(&[f64]) -> C64>(grid: Arc<GridSpec>, f: F) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, values }
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_parts(grid: Arc<GridSpec>, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    /// `∫ |f|^p` by the grid quadrature, then the `p`-th root.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let w = self.grid.weights();
        let s: f64 = self
            .values
            .iter()
            .zip(&w)
            .map(|(v, w)| w * v.norm().powf(p))
            .sum();
        s.powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.weights();
        self.values
            .iter()
            .zip(&w)
            .map(|(v, w)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `∫ f · conj(g)`
    pub fn inner(&self, other: &Self) -> C64 {
        let w = self.grid.weights();
        self.values
            .iter()
            .zip(&other.values)
            .zip(&w)
            .map(|((a, b), w)| a * b.conj() * *w)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `self - other`, sample by sample.
    pub fn difference(&self, other: &Self) -> Self {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::from_parts(self.grid.clone(), values)
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self::from_parts(self.grid.clone(), self.values.iter().map(|v| v * c).collect())
    }

    pub fn abs_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_axis_shape() {
        let a = Axis::uniform(2.0, 5).unwrap();
        assert_eq!(a.nodes(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(a.weights(), &[0.5, 1.0, 1.0, 1.0, 0.5]);
        assert!(Axis::uniform(2.0, 4).is_err());
        assert!(GridSpec::uniform_spacing(1, 1.0, 0.3).is_err());
        assert_eq!(GridSpec::uniform_spacing(2, 1.0, 0.25).unwrap().len(), 81);
    }

    #[test]
    fn gauss_hermite_is_exact_at_unit_scale() {
        let a = Axis::gauss_hermite(40).unwrap();
        assert!(a.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(a.weights().iter().all(|&w| w > 0.0));
        assert!(a.gram_defect(32, 1.0) < 1e-12, "{}", a.gram_defect(32, 1.0));
    }

    #[test]
    fn certificate_refuses_coarse_grids() {
        let g = GridSpec::uniform(1, 6.0, 25).unwrap();
        assert!(g.certify(4, 1.0, 1e-9).is_ok());
        assert!(matches!(g.certify(30, 1.0, 1e-9), Err(Error::Certificate { .. })));
        assert!(matches!(g.certify(4, 0.0, 1e-9), Err(Error::ZeroFrequency)));
    }

    #[test]
    fn flat_indexing_round_trips() {
        let g = GridSpec::from_axes(vec![
            Axis::uniform(1.0, 3).unwrap(),
            Axis::uniform(1.0, 5).unwrap(),
        ])
        .unwrap();
        for i in 0..g.len() {
            assert_eq!(g.flat(&g.coords(i)), i);
        }
        assert_eq!(g.point(5 + 1), vec![0.0, -0.5]);
        assert_eq!(g.weights().len(), 15);
    }
}
