use serde::{Deserialize, Serialize};

use super::fit::{fit_loglog, LineFit};
use super::thresholds::INCONCLUSIVE_RESIDUAL;
use crate::multiplier::{parseval_l2, parseval_tail_bound, KernelFamily, KernelProfile};
use crate::specfun::BesselOrder;
use crate::{Error, Result};

/// Fewest radii with `r > t` a decay fit accepts.
pub const MIN_DECAY_RADII: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    L2,
    Sup,
}

/// `-(2 Re α + 1)` for the annulus `L²` integral, `-(Re α + 1/2)` for the
/// annulus supremum.
pub fn target_slope(order: BesselOrder, regime: Regime) -> f64 {
    match regime {
        Regime::L2 => -(2.0 * order.re + 1.0),
        Regime::Sup => -(order.re + 0.5),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub regime: Regime,
    pub fit: LineFit,
    pub target: f64,
    pub inconclusive: bool,
    /// Radii skipped because the annulus held no mass on the grid.
    pub skipped: usize,
}

/// Least-squares slope of `log(t^n · value)` against `log(1 + r/t)` over the
/// radii with `r > t`, pooled across profiles.
pub fn decay_fit(profiles: &[KernelProfile], regime: Regime) -> Result<DecayFit> {
    let first = profiles
        .first()
        .ok_or_else(|| Error::InsufficientRange("no profiles".into()))?;
    if profiles.iter().any(|p| p.order != first.order || p.family != first.family) {
        return Err(Error::Domain("profiles mix orders or kernel families".into()));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut skipped = 0;
    for p in profiles {
        let values = match regime {
            Regime::L2 => &p.l2,
            Regime::Sup => &p.sup,
        };
        let norm = p.t.powi(p.n as i32);
        for (&r, &v) in p.radii.iter().zip(values) {
            if r <= p.t {
                continue;
            }
            if v > 0.0 {
                xs.push(1.0 + r / p.t);
                ys.push(v * norm);
            } else {
                skipped += 1;
            }
        }
    }
    if xs.len() < MIN_DECAY_RADII {
        return Err(Error::InsufficientRange(format!(
            "{} radii with r > t, need {MIN_DECAY_RADII}",
            xs.len()
        )));
    }
    let fit = fit_loglog(&xs, &ys)?;
    Ok(DecayFit {
        regime,
        target: target_slope(first.order, regime),
        inconclusive: fit.residual > INCONCLUSIVE_RESIDUAL,
        fit,
        skipped,
    })
}

/// Relative size of the certified tail below which a small-`t` value is kept.
pub const SMALL_RT_TAIL: f64 = 0.05;
/// Largest truncation the adaptive small-`t` computation will try.
pub const SMALL_RT_MAX_LEVEL: usize = 1 << 21;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallRtEntry {
    pub t: f64,
    pub truncation: usize,
    /// `t^n Σ_{k ≤ K} |m_α(t²(2k+n))|² Φ_k(x,x)`
    pub normalized: f64,
    /// Certified bound on the omitted tail, also multiplied by `t^n`.
    pub tail_bound: f64,
    pub masked: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallRtReport {
    pub entries: Vec<SmallRtEntry>,
    pub sup: f64,
    /// `(max - min)/max` over the unmasked entries.
    pub drift: f64,
}

/// `t^n ∫ |K_t^α(x,y)|² dy` by orthogonality for each `t`. With
/// `truncation = None` the level count is doubled until the tail bound is
/// below `SMALL_RT_TAIL` of the value; with a fixed truncation, entries whose
/// tail bound is too large are masked out of the supremum.
pub fn small_rt_check(order: BesselOrder, ts: &[f64], x: &[f64], truncation: Option<usize>) -> Result<SmallRtReport> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Shape("empty base point".into()));
    }
    let mut entries = Vec::with_capacity(ts.len());
    for &t in ts {
        let norm = t.powi(n as i32);
        let mut k = truncation.unwrap_or_else(|| ((16.0 / (t * t)).ceil() as usize).clamp(32, SMALL_RT_MAX_LEVEL));
        let (value, tail) = loop {
            let v = parseval_l2(KernelFamily::Plain, order, t, x, k)? * norm;
            let b = parseval_tail_bound(KernelFamily::Plain, order, t, n, k)? * norm;
            if truncation.is_some() || b <= SMALL_RT_TAIL * v || 2 * k > SMALL_RT_MAX_LEVEL {
                break (v, b);
            }
            k *= 2;
        };
        entries.push(SmallRtEntry {
            t,
            truncation: k,
            normalized: value,
            tail_bound: tail,
            masked: !(tail <= SMALL_RT_TAIL * value),
        });
    }
    let kept: Vec<f64> = entries.iter().filter(|e| !e.masked).map(|e| e.normalized).collect();
    let sup = kept.iter().copied().fold(0.0, f64::max);
    let min = kept.iter().copied().fold(f64::INFINITY, f64::min);
    let drift = if kept.is_empty() { f64::NAN } else { (sup - min) / sup };
    Ok(SmallRtReport { entries, sup, drift })
}

/// `G(t) = Σ_{k ∈ ℤ} (2^k/t)^{n/2} (1 + 2^k/t)^{-Re α - 1/2}`, the dyadic
/// block sum controlling the maximal function; `2^k` runs over `|k| ≤ 600`.
pub fn dyadic_block_sum(alpha_re: f64, n: usize, t: f64) -> f64 {
    let h = n as f64 / 2.0;
    if alpha_re + 0.5 <= h {
        return f64::INFINITY;
    }
    (-600..=600)
        .map(|k| {
            let q = 2f64.powi(k) / t;
            q.powf(h) * (1.0 + q).powf(-alpha_re - 0.5)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(regime_exp: f64) -> KernelProfile {
        let t = 0.5;
        let radii: Vec<f64> = (0..7).map(|i| t * 2f64.powi(i)).collect();
        let vals: Vec<f64> = radii.iter().map(|r| 4.0 * (1.0 + r / t).powf(regime_exp)).collect();
        KernelProfile {
            order: BesselOrder::real(1.0),
            family: KernelFamily::Plain,
            t,
            x: vec![0.0, 0.0],
            n: 2,
            truncation: 0,
            radii,
            l2: vals.clone(),
            sup: vals,
        }
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let f = decay_fit(&[synthetic(-3.0)], Regime::L2).unwrap();
        assert!((f.fit.slope + 3.0).abs() < 1e-12);
        assert_eq!(f.target, -3.0);
        assert!(!f.inconclusive);
    }

    #[test]
    fn too_few_radii() {
        let mut p = synthetic(-3.0);
        p.radii.truncate(4);
        p.l2.truncate(4);
        assert!(matches!(decay_fit(&[p], Regime::L2), Err(Error::InsufficientRange(_))));
    }

    #[test]
    fn block_sum_is_dyadically_periodic() {
        for t in [1.0, 1.3, 1.9] {
            let a = dyadic_block_sum(1.0, 2, t);
            let b = dyadic_block_sum(1.0, 2, 2.0 * t);
            assert!((a - b).abs() < 1e-12 * a);
        }
        assert!(dyadic_block_sum(0.4, 2, 1.0).is_infinite());
    }
}
