use std::collections::BTreeMap;

use super::basis::HermiteBasis;
use super::functions::hermite_table;
use crate::{Error, Result, C64};

/// Which variable a raising operator acts on: `A_j = -∂_{x_j} + x_j` on the
/// first, `B_j = -∂_{y_j} + y_j` on the second. On one-variable expansions
/// both act the same way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Raising {
    A,
    B,
}

fn reserve_error(level: usize, basis: &HermiteBasis) -> Error {
    Error::ReserveExceeded {
        level,
        max: basis.total_level(),
    }
}

/// Applies `A_j` (or `B_j`) to coefficients indexed by basis position:
/// `c_μ Φ_μ ↦ c_μ (2μ_j + 2)^{1/2} Φ_{μ+e_j}`.
pub fn raising_apply(_kind: Raising, j: usize, coeffs: &[C64], basis: &HermiteBasis) -> Result<Vec<C64>> {
    check(j, coeffs, basis)?;
    let mut out = vec![C64::new(0.0, 0.0); basis.len()];
    for (i, c) in coeffs.iter().enumerate() {
        if *c == C64::new(0.0, 0.0) {
            continue;
        }
        let mu = basis.index(i);
        let target = mu.raised(j);
        let pos = basis
            .position(&target)
            .ok_or_else(|| reserve_error(target.order(), basis))?;
        out[pos] += c * (2.0 * mu.get(j) as f64 + 2.0).sqrt();
    }
    Ok(out)
}

/// Adjoint `A_j^* = ∂_{x_j} + x_j`: `Φ_μ ↦ (2μ_j)^{1/2} Φ_{μ-e_j}`.
pub fn lowering_apply(j: usize, coeffs: &[C64], basis: &HermiteBasis) -> Result<Vec<C64>> {
    check(j, coeffs, basis)?;
    let mut out = vec![C64::new(0.0, 0.0); basis.len()];
    for (i, c) in coeffs.iter().enumerate() {
        let mu = basis.index(i);
        if let Some(target) = mu.lowered(j) {
            let pos = basis.position(&target).expect("lower levels are always enumerated");
            out[pos] += c * (2.0 * mu.get(j) as f64).sqrt();
        }
    }
    Ok(out)
}

fn check(j: usize, coeffs: &[C64], basis: &HermiteBasis) -> Result<()> {
    if j >= basis.dim() {
        return Err(Error::Shape(format!("axis {j} out of range for n = {}", basis.dim())));
    }
    if coeffs.len() != basis.len() {
        return Err(Error::Length {
            needed: basis.len(),
            have: coeffs.len(),
        });
    }
    Ok(())
}

/// Two-variable kernel `Σ c_{μν} Φ_μ(x) Φ_ν(y)` with indices into a basis.
#[derive(Clone, Debug)]
pub struct KernelExpansion<'a> {
    basis: &'a HermiteBasis,
    terms: BTreeMap<(usize, usize), f64>,
}

impl<'a> KernelExpansion<'a> {
    /// `M_ψ = Σ_{|μ| ≤ K} ψ(|μ|) Φ_μ(x) Φ_μ(y)`
    pub fn diagonal(basis: &'a HermiteBasis, psi: &[f64]) -> Result<Self> {
        let k = basis.max_level();
        if psi.len() <= k {
            return Err(Error::Length {
                needed: k + 1,
                have: psi.len(),
            });
        }
        let terms = (0..basis.count_through(k))
            .filter(|&i| psi[basis.level_of(i)] != 0.0)
            .map(|i| ((i, i), psi[basis.level_of(i)]))
            .collect();
        Ok(Self { basis, terms })
    }

    pub fn zero(basis: &'a HermiteBasis) -> Self {
        Self {
            basis,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(&self) -> &HermiteBasis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn raise(&self, kind: Raising, j: usize) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (&(mu, nu), &c) in &self.terms {
            let moved = match kind {
                Raising::A => mu,
                Raising::B => nu,
            };
            let idx = self.basis.index(moved);
            let target = idx.raised(j);
            let pos = self
                .basis
                .position(&target)
                .ok_or_else(|| reserve_error(target.order(), self.basis))?;
            let key = match kind {
                Raising::A => (pos, nu),
                Raising::B => (mu, pos),
            };
            *terms.entry(key).or_insert(0.0) += c * (2.0 * idx.get(j) as f64 + 2.0).sqrt();
        }
        Ok(Self {
            basis: self.basis,
            terms,
        })
    }

    /// `(B_j - A_j) K`
    pub fn b_minus_a(&self, j: usize) -> Result<Self> {
        let b = self.raise(Raising::B, j)?;
        let a = self.raise(Raising::A, j)?;
        Ok(b.combine(&a, -1.0))
    }

    /// `self + c · other`
    pub fn combine(&self, other: &Self, c: f64) -> Self {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            *terms.entry(*k).or_insert(0.0) += c * v;
        }
        Self {
            basis: self.basis,
            terms,
        }
    }

    pub fn evaluate(&self, x: &[f64], y: &[f64]) -> f64 {
        let top = self.basis.total_level();
        let tx: Vec<Vec<f64>> = x.iter().map(|&v| hermite_table(top, v)).collect();
        let ty: Vec<Vec<f64>> = y.iter().map(|&v| hermite_table(top, v)).collect();
        let factor = |i: usize, t: &[Vec<f64>]| -> f64 {
            self.basis
                .index(i)
                .entries()
                .iter()
                .enumerate()
                .map(|(a, &m)| t[a][m])
                .product()
        };
        self.terms
            .iter()
            .map(|(&(mu, nu), &c)| c * factor(mu, &tx) * factor(nu, &ty))
            .sum()
    }
}
