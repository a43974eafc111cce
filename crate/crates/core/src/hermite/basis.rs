use std::collections::HashMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Multi-index `μ ∈ N^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("multi-index needs n ≥ 1 entries".into()));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n.max(1)])
    }

    /// Coordinate vector `e_j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n.max(1)];
        v[j] += 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|μ| = Σ μ_j`
    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, j: usize) -> usize {
        self.0[j]
    }

    /// `μ + e_j`
    pub fn raised(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v[j] += 1;
        Self(v)
    }

    /// `μ - e_j`, if nonnegative.
    pub fn lowered(&self, j: usize) -> Option<Self> {
        let mut v = self.0.clone();
        v[j] = v[j].checked_sub(1)?;
        Some(Self(v))
    }

    /// All `μ` with `|μ| = level` in lexicographic order.
    pub fn of_level(n: usize, level: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur = vec![0; n];
        fill(&mut cur, 0, level, &mut out);
        out
    }
}

fn fill(cur: &mut Vec<usize>, pos: usize, remaining: usize, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill(cur, pos + 1, remaining - v, out);
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Truncated Hermite system `{Φ_μ : |μ| ≤ K + reserve}`.
///
/// Indices are ordered by level, lexicographically within a level. The
/// reserve levels exist so that raising steps applied to data supported on
/// levels `≤ K` stay inside the enumeration.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    dim: usize,
    max_level: usize,
    reserve: usize,
    indices: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    level_start: Vec<usize>,
}

impl HermiteBasis {
    pub fn new(dim: usize, max_level: usize, reserve: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("basis dimension must be ≥ 1".into()));
        }
        let total = max_level + reserve;
        let mut indices = Vec::new();
        let mut level_start = Vec::with_capacity(total + 2);
        for k in 0..=total {
            level_start.push(indices.len());
            indices.extend(MultiIndex::of_level(dim, k));
        }
        level_start.push(indices.len());
        let lookup = indices
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Ok(Self {
            dim,
            max_level,
            reserve,
            indices,
            lookup,
            level_start,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Working truncation `K`.
    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn reserve(&self) -> usize {
        self.reserve
    }

    /// `K + reserve`, the highest level enumerated.
    pub fn total_level(&self) -> usize {
        self.max_level + self.reserve
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, mu: &MultiIndex) -> Option<usize> {
        self.lookup.get(mu).copied()
    }

    /// Positions of the indices with `|μ| = level`.
    pub fn level_range(&self, level: usize) -> Result<Range<usize>> {
        if level > self.total_level() {
            return Err(Error::LevelOutOfRange {
                level,
                max: self.total_level(),
            });
        }
        Ok(self.level_start[level]..self.level_start[level + 1])
    }

    /// Number of indices with `|μ| ≤ level`.
    pub fn count_through(&self, level: usize) -> usize {
        self.level_start[(level + 1).min(self.level_start.len() - 1)]
    }

    pub fn level_of(&self, i: usize) -> usize {
        self.indices[i].order()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn enumeration_is_total_and_duplicate_free() {
        for n in 1..=3 {
            let b = HermiteBasis::new(n, 6, 2).unwrap();
            let set: HashSet<_> = b.indices().iter().cloned().collect();
            assert_eq!(set.len(), b.len());
            // number of μ with |μ| ≤ L in n variables is C(L+n, n)
            let l = b.total_level();
            let expected = (1..=n).fold(1usize, |acc, i| acc * (l + i) / i);
            assert_eq!(b.len(), expected, "n = {n}");
            for (i, m) in b.indices().iter().enumerate() {
                assert_eq!(b.position(m), Some(i));
            }
        }
    }

    #[test]
    fn levels_are_contiguous() {
        let b = HermiteBasis::new(2, 5, 1).unwrap();
        for k in 0..=6 {
            for i in b.level_range(k).unwrap() {
                assert_eq!(b.level_of(i), k);
            }
        }
        assert!(b.level_range(7).is_err());
    }

    #[test]
    fn index_arithmetic() {
        let m = MultiIndex::new(vec![2, 0]).unwrap();
        assert_eq!(m.raised(1).entries(), &[2, 1]);
        assert!(m.lowered(1).is_none());
        assert_eq!(m.lowered(0).unwrap().order(), 1);
        assert!(MultiIndex::new(vec![]).is_err());
    }
}
