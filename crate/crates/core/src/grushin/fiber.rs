//! Operators on a single frequency slice built from the raising operators
//! `A_j(λ) = -∂_{x_j} + |λ| x_j` and their adjoints `A_j(λ)^* = ∂_{x_j} + |λ| x_j`.
//!
//! On the scaled system `A_j(λ) Φ_μ^λ = |λ|^{1/2} (2μ_j+2)^{1/2} Φ_{μ+e_j}^λ`.

use crate::hermite::{lowering_apply, raising_apply, HermiteBasis, Raising, SampledFieldRn, ScaledTransform};
use crate::multiplier::{FiberExpansion, MultiplierSpec};
use crate::specfun::quadrature::gauss_legendre_unit;
use crate::specfun::{m_alpha, BesselOrder};
use crate::{Error, Result, C64};

/// Gauss nodes for the `s`-integrals.
pub const S_NODES: usize = 16;
/// Largest change allowed when the `s`-rule is doubled.
pub const S_DOUBLING_TOLERANCE: f64 = 1e-8;

/// Coefficients of `f` on the box of a level-`K+2` transform, with the part
/// above level `K` removed, rearranged into basis order.
struct RaisingFrame {
    transform: ScaledTransform,
    basis: HermiteBasis,
    coeffs: Vec<C64>,
}

impl RaisingFrame {
    fn new(f: &SampledFieldRn, lambda: f64, k: usize) -> Result<Self> {
        if lambda == 0.0 {
            return Err(Error::ZeroFrequency);
        }
        let transform = ScaledTransform::new(f.grid(), lambda, k + 2)?;
        let basis = HermiteBasis::new(f.grid().dim(), k, 2)?;
        let boxed = transform.analyze(f.values());
        let coeffs = (0..basis.len())
            .map(|i| {
                let mu = basis.index(i);
                if mu.order() > k {
                    C64::new(0.0, 0.0)
                } else {
                    boxed[transform.box_index(mu).expect("box holds level K+2")]
                }
            })
            .collect();
        Ok(Self { transform, basis, coeffs })
    }

    fn level(&self, i: usize) -> usize {
        self.basis.level_of(i)
    }

    fn synthesize(&self, coeffs: &[C64]) -> SampledFieldRn {
        let mut boxed = vec![C64::new(0.0, 0.0); self.transform.box_len()];
        for (i, c) in coeffs.iter().enumerate() {
            boxed[self.transform.box_index(self.basis.index(i)).expect("box holds level K+2")] += c;
        }
        SampledFieldRn::new(self.transform.grid().clone(), self.transform.synthesize(&boxed))
            .expect("synthesis of finite coefficients is finite")
    }

    fn weighted(&self, w: impl Fn(usize) -> C64) -> Vec<C64> {
        self.coeffs.iter().enumerate().map(|(i, c)| c * w(self.level(i))).collect()
    }
}

/// `∫_0^1 g(s) ds` by the `S_NODES` rule, certified against twice the nodes.
fn certified_unit_integral(g: impl Fn(f64) -> Result<C64>) -> Result<C64> {
    let rule = |count: usize| -> Result<C64> {
        let (x, w) = gauss_legendre_unit(count);
        x.iter().zip(&w).try_fold(C64::new(0.0, 0.0), |acc, (x, w)| Ok(acc + g(*x)? * *w))
    };
    let coarse = rule(S_NODES)?;
    let fine = rule(2 * S_NODES)?;
    if (coarse - fine).norm() > S_DOUBLING_TOLERANCE * fine.norm().max(1.0) {
        return Err(Error::DivergentQuadrature(format!(
            "s-integral changes by {:.3e} when the rule is doubled",
            (coarse - fine).norm()
        )));
    }
    Ok(coarse)
}

/// The pieces of `λ d/dλ m_α(H(λ)) f`.
#[derive(Clone, Debug)]
pub struct DerivativeTerms {
    /// `H(λ) m_α'(H(λ)) f = -½ H(λ) m_{α+1}(H(λ)) f`
    pub exact: SampledFieldRn,
    /// `½ Σ_j A_j(λ)² ∫_0^1 m_α'(H(λ) + 4s|λ|) ds f`
    pub raised: SampledFieldRn,
    /// `½ Σ_j A_j(λ)^{*2} ∫_0^1 m_α'(H(λ) - 4s|λ|) ds f`
    pub lowered: SampledFieldRn,
}

impl DerivativeTerms {
    pub fn total(&self) -> SampledFieldRn {
        let values = self
            .exact
            .values()
            .iter()
            .zip(self.raised.values())
            .zip(self.lowered.values())
            .map(|((a, b), c)| a + b + c)
            .collect();
        SampledFieldRn::new(self.exact.grid().clone(), values).expect("sum of finite fields")
    }
}

/// `λ d/dλ m_α(H(λ)) f` split along `λ H'(λ) = H(λ) + ½ Σ_j (A_j(λ)² + A_j(λ)^{*2})`.
///
/// `A_j²` moves level `k` to `k+2`, where the eigenvalue is larger by `4|λ|`,
/// so its matrix elements carry the divided difference
/// `∫_0^1 m_α'((2k+n)|λ| + 4s|λ|) ds`; `A_j^{*2}` is the mirror image.
pub fn derivative_terms(order: BesselOrder, lambda: f64, f: &SampledFieldRn, k: usize) -> Result<DerivativeTerms> {
    let frame = RaisingFrame::new(f, lambda, k)?;
    let n = f.grid().dim();
    let l = lambda.abs();
    let up = order.shifted(1.0);
    let mprime = |u: f64| -> Result<C64> { Ok(m_alpha(up, u)? * -0.5) };
    let energy = |level: usize| (2 * level + n) as f64 * l;

    let mut exact_w = Vec::with_capacity(k + 1);
    let mut plus = Vec::with_capacity(k + 1);
    let mut minus = Vec::with_capacity(k + 1);
    for level in 0..=k {
        let e = energy(level);
        exact_w.push(mprime(e)? * e);
        plus.push(certified_unit_integral(|s| mprime(e + 4.0 * s * l))?);
        minus.push(if level >= 2 {
            certified_unit_integral(|s| mprime(e - 4.0 * s * l))?
        } else {
            C64::new(0.0, 0.0)
        });
    }
    let exact = frame.synthesize(&frame.weighted(|lv| exact_w.get(lv).copied().unwrap_or_default()));

    let dp = frame.weighted(|lv| plus.get(lv).copied().unwrap_or_default());
    let dm = frame.weighted(|lv| minus.get(lv).copied().unwrap_or_default());
    let mut raised = vec![C64::new(0.0, 0.0); frame.basis.len()];
    let mut lowered = vec![C64::new(0.0, 0.0); frame.basis.len()];
    for j in 0..n {
        let a2 = raising_apply(Raising::A, j, &raising_apply(Raising::A, j, &dp, &frame.basis)?, &frame.basis)?;
        let s2 = lowering_apply(j, &lowering_apply(j, &dm, &frame.basis)?, &frame.basis)?;
        for (r, v) in raised.iter_mut().zip(a2) {
            *r += v * (0.5 * l);
        }
        for (r, v) in lowered.iter_mut().zip(s2) {
            *r += v * (0.5 * l);
        }
    }
    Ok(DerivativeTerms {
        exact,
        raised: frame.synthesize(&raised),
        lowered: frame.synthesize(&lowered),
    })
}

/// `S_α(λ) f = λ d/dλ m_α(H(λ)) f` from the raising-operator decomposition.
pub fn derivative_family(order: BesselOrder, lambda: f64, f: &SampledFieldRn, k: usize) -> Result<SampledFieldRn> {
    derivative_terms(order, lambda, f, k).map(|t| t.total())
}

/// `λ [m_α(H(λ+h)) - m_α(H(λ-h))] f / 2h`
pub fn derivative_family_fd(order: BesselOrder, lambda: f64, f: &SampledFieldRn, k: usize, h: f64) -> Result<SampledFieldRn> {
    if lambda == 0.0 {
        return Err(Error::ZeroFrequency);
    }
    if !(h > 0.0 && h < lambda.abs()) {
        return Err(Error::Domain(format!("step {h} must lie in (0, |λ|)")));
    }
    let spec = MultiplierSpec::bessel(order);
    let a = FiberExpansion::new(f, lambda + h, k)?.apply_spec(&spec)?;
    let b = FiberExpansion::new(f, lambda - h, k)?.apply_spec(&spec)?;
    let c = lambda / (2.0 * h);
    let values = a.values().iter().zip(b.values()).map(|(a, b)| (a - b) * c).collect();
    SampledFieldRn::new(f.grid().clone(), values)
}

/// `A_j(λ)² H(λ)^{-1} f` on levels `≤ K` of `f`.
pub fn czo_block(j: usize, lambda: f64, f: &SampledFieldRn, k: usize) -> Result<SampledFieldRn> {
    let frame = RaisingFrame::new(f, lambda, k)?;
    let n = f.grid().dim();
    let l = lambda.abs();
    let inv = frame.weighted(|lv| C64::new(1.0 / ((2 * lv + n) as f64 * l), 0.0));
    let out = raising_apply(Raising::A, j, &raising_apply(Raising::A, j, &inv, &frame.basis)?, &frame.basis)?;
    Ok(frame.synthesize(&out.iter().map(|c| c * l).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{scaled_phi, GridSpec, MultiIndex};
    use std::sync::Arc;

    fn phi_field(grid: &Arc<GridSpec>, mu: &[usize], lambda: f64) -> SampledFieldRn {
        let mu = MultiIndex::new(mu.to_vec()).unwrap();
        SampledFieldRn::from_fn(grid.clone(), |x| C64::new(scaled_phi(&mu, lambda, x).unwrap(), 0.0))
    }

    #[test]
    fn czo_on_ground_state() {
        let grid = Arc::new(GridSpec::uniform_spacing(1, 10.0, 0.1).unwrap());
        for lambda in [0.5, -2.0] {
            let f = phi_field(&grid, &[0], lambda);
            let g = czo_block(0, lambda, &f, 4).unwrap();
            let want = phi_field(&grid, &[2], lambda).scaled(C64::new(8f64.sqrt(), 0.0));
            assert!(g.difference(&want).max_abs() < 1e-9);
        }
    }

    #[test]
    fn exact_term_on_eigenfunction() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 8.0, 0.125).unwrap());
        let order = BesselOrder::real(3.0);
        let f = phi_field(&grid, &[1, 0], 1.0);
        let t = derivative_terms(order, 1.0, &f, 6).unwrap();
        let e = 4.0;
        let c = m_alpha(order.shifted(1.0), e).unwrap() * (-0.5 * e);
        assert!(t.exact.difference(&f.scaled(c)).max_abs() < 1e-9);
    }

    #[test]
    fn divided_difference_matches_quadrature() {
        let order = BesselOrder::real(2.0);
        let (e, l) = (6.0, 1.5);
        let q = certified_unit_integral(|s| Ok(m_alpha(order.shifted(1.0), e + 4.0 * s * l)? * -0.5)).unwrap();
        let dd = (m_alpha(order, e + 4.0 * l).unwrap() - m_alpha(order, e).unwrap()) / (4.0 * l);
        assert!((q - dd).norm() < 1e-12);
    }

    #[test]
    fn raising_formula_matches_finite_difference() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 9.0, 0.1).unwrap());
        let f = SampledFieldRn::from_fn(grid.clone(), |x| {
            let mu0 = MultiIndex::new(vec![1, 1]).unwrap();
            let mu1 = MultiIndex::new(vec![0, 3]).unwrap();
            C64::new(scaled_phi(&mu0, 1.0, x).unwrap(), 0.5 * scaled_phi(&mu1, 1.0, x).unwrap())
        });
        let order = BesselOrder::real(3.0);
        let b = derivative_family(order, 1.0, &f, 10).unwrap();
        let a = derivative_family_fd(order, 1.0, &f, 10, 1e-3).unwrap();
        let rel = a.difference(&b).l2_norm() / b.l2_norm();
        assert!(rel < 1e-4, "{rel}");
    }
}
