//! Quadrature rules used by the special functions and the calculus layers.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::C64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let n = count;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(count: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(count);
    (
        x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

/// One node of the tanh–sinh rule on `[-1, 1]`.
///
/// Endpoint distances are carried as logarithms so that integrands with
/// algebraic endpoint factors `(1-x)^a (1+x)^b` can be formed without
/// cancellation or underflow.
#[derive(Clone, Copy, Debug)]
pub struct DeNode {
    pub x: f64,
    /// `ln(1 - x)`
    pub ln_one_minus: f64,
    /// `ln(1 + x)`
    pub ln_one_plus: f64,
    /// `ln(π/2 · cosh τ)`; the full Jacobian is
    /// `exp(ln_jacobian + ln_one_minus + ln_one_plus)`.
    pub ln_jacobian: f64,
}

/// Node set of the double-exponential rule with `count` points on
/// `τ ∈ [-tau_max, tau_max]`, together with the step.
pub fn tanh_sinh_nodes(tau_max: f64, count: usize) -> (Vec<DeNode>, f64) {
    let count = count.max(3);
    let h = 2.0 * tau_max / (count - 1) as f64;
    let nodes = (0..count)
        .map(|j| {
            let tau = -tau_max + j as f64 * h;
            de_node(tau)
        })
        .collect();
    (nodes, h)
}

fn de_node(tau: f64) -> DeNode {
    let u = PI * tau.sinh();
    let a = u.abs();
    // ln(1 ± tanh(a/2)) for a ≥ 0
    let l1p = (-a).exp().ln_1p();
    let ln_small = LN_2 - a - l1p; // ln(1 - tanh(a/2))
    let ln_large = LN_2 - l1p; // ln(1 + tanh(a/2))
    let x = (0.5 * u).tanh();
    let (ln_one_minus, ln_one_plus) = if u >= 0.0 {
        (ln_small, ln_large)
    } else {
        (ln_large, ln_small)
    };
    DeNode {
        x,
        ln_one_minus,
        ln_one_plus,
        ln_jacobian: (FRAC_PI_2 * tau.cosh()).ln(),
    }
}

/// `h · Σ f(node)`; `f` must include the Jacobian factor.
pub fn tanh_sinh<F: FnMut(&DeNode) -> C64>(tau_max: f64, count: usize, mut f: F) -> C64 {
    let (nodes, h) = tanh_sinh_nodes(tau_max, count);
    let mut acc = C64::new(0.0, 0.0);
    for node in &nodes {
        acc += f(node);
    }
    acc * h
}

/// Half-width of the `τ` window needed for an integrand whose endpoint
/// factor decays like `exp(-decay · π sinh τ)`.
pub fn tau_window(decay: f64) -> f64 {
    let d = decay.max(1e-3);
    (48.0 / (d * PI)).asinh() + 0.25
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        for p in 0..16 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "degree {p}: {q} vs {exact}");
        }
    }

    #[test]
    fn legendre_odd_count_is_symmetric() {
        let (x, w) = gauss_legendre(7);
        assert_eq!(x[3], 0.0);
        for i in 0..7 {
            assert!((x[i] + x[6 - i]).abs() < 1e-15);
            assert!((w[i] - w[6 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // ∫_{-1}^{1} (1 - x²)^{-1/2} dx = π
        let v = tanh_sinh(tau_window(0.5), 121, |n| {
            C64::new((n.ln_jacobian + 0.5 * (n.ln_one_minus + n.ln_one_plus)).exp(), 0.0)
        });
        assert!((v.re - PI).abs() < 1e-12, "{}", v.re);
    }

    #[test]
    fn tanh_sinh_node_complements_are_accurate() {
        let (nodes, _) = tanh_sinh_nodes(4.0, 41);
        for n in nodes {
            assert!((n.ln_one_minus.exp() - (1.0 - n.x)).abs() < 1e-15);
            assert!((n.ln_one_plus.exp() - (1.0 + n.x)).abs() < 1e-15);
        }
    }
}
