//! Regime thresholds on `Re α` and `p`, kept in one place so that every
//! report can state which estimate it exercises.

use serde::{Deserialize, Serialize};

/// Slopes fitted with a larger RMS residual are reported as inconclusive.
pub const INCONCLUSIVE_RESIDUAL: f64 = 0.1;

/// Kernel decay and the `M_2` maximal bound: `Re α > (n-1)/2`.
pub fn l2_regime(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

/// The `M` maximal bound: `Re α > n - 1/2`.
pub fn sup_regime(n: usize) -> f64 {
    n as f64 - 0.5
}

/// The energy family against `M_2`, and the derivative family: `Re α > (n+1)/2`.
pub fn energy_l2_regime(n: usize) -> f64 {
    (n as f64 + 1.0) / 2.0
}

/// The energy family against `M`: `Re α > n + 1/2`.
pub fn energy_sup_regime(n: usize) -> f64 {
    n as f64 + 0.5
}

/// `L^p` boundedness of the Bessel multiplier of `G` for every `1 < p < ∞`:
/// `Re α > (n+1)/2`.
pub fn lp_all_regime(n: usize) -> f64 {
    (n as f64 + 1.0) / 2.0
}

/// Half-width of the proven window `|1/p - 1/2| < 1/(n+2)` for the wave
/// propagator.
pub fn proven_window(n: usize) -> f64 {
    1.0 / (n as f64 + 2.0)
}

/// Half-width of the conjectured window `|1/p - 1/2| < 1/n`.
pub fn conjectured_window(n: usize) -> f64 {
    1.0 / n as f64
}

/// Where `p` sits relative to a window of half-width `w` around `1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowPosition {
    Inside,
    Boundary,
    Outside,
}

pub fn window_position(p: f64, w: f64) -> WindowPosition {
    let d = (1.0 / p - 0.5).abs();
    if (d - w).abs() <= 1e-12 {
        WindowPosition::Boundary
    } else if d < w {
        WindowPosition::Inside
    } else {
        WindowPosition::Outside
    }
}

/// One line per threshold, stating whether `Re α` clears it.
pub fn regime_notes(n: usize, alpha_re: f64) -> Vec<String> {
    let rows = [
        ("kernel decay, T* ≤ C M_2", l2_regime(n)),
        ("T* ≤ C M", sup_regime(n)),
        ("energy maximal ≤ C M_2, derivative family", energy_l2_regime(n)),
        ("energy maximal ≤ C M", energy_sup_regime(n)),
    ];
    rows.iter()
        .map(|(what, th)| {
            let side = if alpha_re > *th { "above" } else { "not above" };
            format!("Re α = {alpha_re} is {side} {th} ({what})")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows() {
        assert_eq!(window_position(4.0, proven_window(2)), WindowPosition::Boundary);
        assert_eq!(window_position(3.0, proven_window(2)), WindowPosition::Inside);
        assert_eq!(window_position(8.0, proven_window(2)), WindowPosition::Outside);
        assert_eq!(window_position(2.0, conjectured_window(3)), WindowPosition::Inside);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(l2_regime(2), 0.5);
        assert_eq!(sup_regime(2), 1.5);
        assert_eq!(energy_l2_regime(2), 1.5);
        assert_eq!(energy_sup_regime(2), 2.5);
        assert_eq!(regime_notes(2, 1.0).len(), 4);
    }
}
