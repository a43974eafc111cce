//! Finite differences of level sequences and the closure identity
//! `(x-y)^β M_ψ = Σ C_{γ,μ} (B-A)^γ Δ^{|μ|} M_ψ`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::{HermiteBasis, MultiIndex};
use super::raising::KernelExpansion;
use crate::specfun::quadrature::gauss_legendre_unit;
use crate::{Error, Result};

/// `Δ^k ψ` on `[0, len - k)`.
pub fn forward_difference(psi: &[f64], k: usize) -> Result<Vec<f64>> {
    if psi.len() <= k {
        return Err(Error::Length {
            needed: k + 1,
            have: psi.len(),
        });
    }
    let mut cur = psi.to_vec();
    for _ in 0..k {
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok(cur)
}

/// `∫_0^1 ψ'(N + s) ds` by 16-point Gauss–Legendre.
pub fn mean_value_difference<F: Fn(f64) -> f64>(derivative: F, at: f64) -> f64 {
    let (x, w) = gauss_legendre_unit(16);
    x.iter().zip(&w).map(|(s, w)| w * derivative(at + s)).sum()
}

/// One term `(B-A)^γ Δ^{|μ|} M_ψ` of the closure identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureTerm {
    pub gamma: MultiIndex,
    pub mu: MultiIndex,
}

/// Index pairs with `2μ_j - γ_j = β_j`, `μ_j ≤ β_j`, `γ_j ≥ 0`.
pub fn closure_terms(beta: &MultiIndex) -> Vec<ClosureTerm> {
    let mut out = Vec::new();
    let n = beta.dim();
    let mut mu = vec![0usize; n];
    loop {
        let gamma: Option<Vec<usize>> = (0..n)
            .map(|j| (2 * mu[j]).checked_sub(beta.get(j)))
            .collect();
        if let Some(g) = gamma {
            out.push(ClosureTerm {
                gamma: MultiIndex::new(g).expect("n ≥ 1"),
                mu: MultiIndex::new(mu.clone()).expect("n ≥ 1"),
            });
        }
        // odometer over 0 ≤ μ_j ≤ β_j
        let mut j = n;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if mu[j] < beta.get(j) {
                mu[j] += 1;
                break;
            }
            mu[j] = 0;
        }
    }
}

/// `ψ` cut at `K` and zero-extended, so that `M_{Δ^k ψ}` lives on the same
/// levels as `M_ψ` and the identity holds without truncation error.
fn differenced(psi: &[f64], k: usize, top: usize) -> Result<Vec<f64>> {
    if psi.len() <= top {
        return Err(Error::Length {
            needed: top + 1,
            have: psi.len(),
        });
    }
    let mut ext = psi[..=top].to_vec();
    ext.resize(top + 1 + k, 0.0);
    forward_difference(&ext, k)
}

fn term_kernel<'a>(basis: &'a HermiteBasis, psi: &[f64], term: &ClosureTerm) -> Result<KernelExpansion<'a>> {
    let d = differenced(psi, term.mu.order(), basis.max_level())?;
    let mut k = KernelExpansion::diagonal(basis, &d)?;
    for (j, &g) in term.gamma.entries().iter().enumerate() {
        for _ in 0..g {
            k = k.b_minus_a(j)?;
        }
    }
    Ok(k)
}

fn left_side(beta: &MultiIndex, m: f64, x: &[f64], y: &[f64]) -> f64 {
    beta.entries()
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&b, (xa, ya))| (xa - ya).powi(b as i32))
        .product::<f64>()
        * m
}

/// Constants `C_{γ,μ}` for one `β`, fitted once and then frozen.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClosureConstants {
    pub beta: MultiIndex,
    pub terms: Vec<ClosureTerm>,
    pub constants: Vec<f64>,
}

impl ClosureConstants {
    /// Least-squares fit of the constants on one reference `ψ` over the
    /// sample pairs.
    pub fn fit(
        beta: &MultiIndex,
        psi: &[f64],
        samples: &[(Vec<f64>, Vec<f64>)],
        basis: &HermiteBasis,
    ) -> Result<Self> {
        check_reserve(beta, basis)?;
        let terms = closure_terms(beta);
        let kernels = terms
            .iter()
            .map(|t| term_kernel(basis, psi, t))
            .collect::<Result<Vec<_>>>()?;
        let base = KernelExpansion::diagonal(basis, psi)?;
        let rows = samples.len();
        let cols = terms.len();
        let mut a = DMatrix::zeros(rows, cols);
        let mut b = DVector::zeros(rows);
        for (r, (x, y)) in samples.iter().enumerate() {
            for (c, k) in kernels.iter().enumerate() {
                a[(r, c)] = k.evaluate(x, y);
            }
            b[r] = left_side(beta, base.evaluate(x, y), x, y);
        }
        let svd = a.svd(true, true);
        let top = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10 * top.max(f64::MIN_POSITIVE))
            .count();
        if rank < cols || rows < cols {
            return Err(Error::UnresolvedConstants { rank, columns: cols });
        }
        let sol = svd
            .solve(&b, 1e-10 * top)
            .map_err(|_| Error::UnresolvedConstants { rank, columns: cols })?;
        Ok(Self {
            beta: beta.clone(),
            terms,
            constants: sol.iter().copied().collect(),
        })
    }

    /// `max |(x-y)^β M_ψ - Σ C (B-A)^γ Δ^{|μ|} M_ψ|` over the samples.
    pub fn residual(&self, psi: &[f64], samples: &[(Vec<f64>, Vec<f64>)], basis: &HermiteBasis) -> Result<f64> {
        check_reserve(&self.beta, basis)?;
        let base = KernelExpansion::diagonal(basis, psi)?;
        let mut combo = KernelExpansion::zero(basis);
        for (t, c) in self.terms.iter().zip(&self.constants) {
            combo = combo.combine(&term_kernel(basis, psi, t)?, *c);
        }
        let mut worst = 0.0f64;
        for (x, y) in samples {
            let lhs = left_side(&self.beta, base.evaluate(x, y), x, y);
            worst = worst.max((lhs - combo.evaluate(x, y)).abs());
        }
        Ok(worst)
    }
}

fn check_reserve(beta: &MultiIndex, basis: &HermiteBasis) -> Result<()> {
    if beta.dim() != basis.dim() {
        return Err(Error::Shape("β and basis dimensions differ".into()));
    }
    if basis.reserve() < beta.order() {
        return Err(Error::ReserveExceeded {
            level: basis.max_level() + beta.order(),
            max: basis.total_level(),
        });
    }
    Ok(())
}

/// Fits the constants on `psi` and reports the residual on the same data.
pub fn closure_residual(
    beta: &MultiIndex,
    psi: &[f64],
    samples: &[(Vec<f64>, Vec<f64>)],
    basis: &HermiteBasis,
) -> Result<f64> {
    ClosureConstants::fit(beta, psi, samples, basis)?.residual(psi, samples, basis)
}
