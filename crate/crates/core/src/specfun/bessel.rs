use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use serde::{Deserialize, Serialize};

use super::dd::{CDd, Dd};
use super::gamma::complex_gamma;
use super::quadrature::{tanh_sinh, tau_window};
use crate::{Error, Result, C64};

/// Order `α` of a Bessel function; complex in general.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselOrder {
    pub re: f64,
    pub im: f64,
}

impl BesselOrder {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn value(self) -> C64 {
        C64::new(self.re, self.im)
    }

    pub fn is_real(self) -> bool {
        self.im == 0.0
    }

    /// `α + k`
    pub fn shifted(self, k: f64) -> Self {
        Self::new(self.re + k, self.im)
    }

    /// Whether the Poisson integral representation applies (`Re α > -1/2`).
    pub fn poisson_admissible(self) -> bool {
        self.re > -0.5
    }

    /// Splits `α = β + δ + iγ` with the given `β`; requires `β > -1/2` and
    /// `δ = Re α - β > 0`.
    pub fn lift_decomposition(self, beta: f64) -> Result<(f64, C64)> {
        if beta <= -0.5 {
            return Err(Error::Domain(format!("base order β = {beta} must exceed -1/2")));
        }
        let delta = self.re - beta;
        if delta <= 0.0 {
            return Err(Error::Domain(format!(
                "Re α = {} must exceed the base order {beta}",
                self.re
            )));
        }
        Ok((beta, C64::new(delta, self.im)))
    }

    fn norm(self) -> f64 {
        self.value().norm()
    }
}

impl std::fmt::Display for BesselOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{:+}i", self.re, self.im)
        }
    }
}

/// Largest argument evaluated by the ascending series.
pub fn series_limit(order: BesselOrder) -> f64 {
    12f64.max(2.0 * order.norm())
}

fn checked(v: C64, what: &str) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(what.to_string()))
    }
}

/// `Σ_k q^k / (k! (α+1)_k)`, the hypergeometric core of the ascending series.
///
/// Summed in double-double: for `q = -t²/4` the terms peak near `e^t` times
/// the result, which would cost all of double precision by `t ≈ 36`.
fn series_core(alpha: C64, q: Dd, peak: f64) -> Result<C64> {
    let mut term = CDd::one();
    let mut sum = term;
    let mut k = 1usize;
    loop {
        let kf = Dd::new(k as f64);
        // k (α + k)
        let d = CDd::new((Dd::new(alpha.re) + kf) * kf, Dd::new(alpha.im) * kf);
        term = term.mul(d.recip_scaled(q));
        sum = sum.add(term);
        if k as f64 > peak && term.abs_approx() <= 1e-33 * sum.abs_approx() {
            return Ok(sum.to_c64());
        }
        if k > 4000 || !term.re.hi.is_finite() {
            return Err(Error::Overflow("ascending Bessel series failed to converge".into()));
        }
        k += 1;
    }
}

fn gamma_of_order_plus_one(alpha: C64) -> Result<C64> {
    complex_gamma(alpha + 1.0).map_err(|e| match e {
        Error::Pole { .. } => Error::Domain(format!("Γ(α+1) has a pole at α = {alpha}")),
        other => other,
    })
}

/// `J_α(t)` from the ascending power series.
pub fn bessel_j_series(order: BesselOrder, t: f64) -> Result<C64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("argument t = {t} must be finite and ≥ 0")));
    }
    if t == 0.0 {
        return value_at_zero(order);
    }
    let alpha = order.value();
    let pre = (alpha * (0.5 * t).ln()).exp() / gamma_of_order_plus_one(alpha)?;
    let core = series_core(alpha, (Dd::new(t) * Dd::new(t)) * Dd::new(-0.25), 0.5 * t)?;
    checked(pre * core, "J_α(t) series")
}

fn value_at_zero(order: BesselOrder) -> Result<C64> {
    if order.re == 0.0 && order.im == 0.0 {
        Ok(C64::new(1.0, 0.0))
    } else if order.re > 0.0 {
        Ok(C64::new(0.0, 0.0))
    } else {
        Err(Error::Domain(format!("J_α(0) is unbounded for α = {order}")))
    }
}

/// Hankel asymptotic expansion for real order. Returns `None` when the
/// series does not reach double precision before its terms start growing.
pub fn bessel_j_asymptotic(order: BesselOrder, t: f64) -> Option<f64> {
    if !order.is_real() || t <= 0.0 {
        return None;
    }
    let a = order.re;
    let mu = 4.0 * a * a;
    let mut term = 1.0f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut last = f64::INFINITY;
    let mut k = 1usize;
    loop {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * t);
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k.is_multiple_of(2) {
            p += sign * term;
        } else {
            q += sign * term;
        }
        let mag = term.abs();
        if mag < 1e-17 {
            break;
        }
        if mag > last || k > 60 {
            return None;
        }
        last = mag;
        k += 1;
    }
    let chi = t - (0.5 * a + 0.25) * PI;
    Some((2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin()))
}

/// `J_α(t)` for `t ≥ 0`.
///
/// The ascending series is used up to [`series_limit`], the Hankel expansion
/// beyond it for real orders where it converges to double precision, and the
/// Poisson integral otherwise.
pub fn bessel_j(order: BesselOrder, t: f64) -> Result<C64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("argument t = {t} must be finite and ≥ 0")));
    }
    if !order.re.is_finite() || !order.im.is_finite() {
        return Err(Error::Domain("order must be finite".into()));
    }
    if t <= series_limit(order) {
        return bessel_j_series(order, t);
    }
    if let Some(v) = bessel_j_asymptotic(order, t) {
        return Ok(C64::new(v, 0.0));
    }
    if order.poisson_admissible() {
        return poisson_bessel(order, t, poisson_nodes(order, t));
    }
    Err(Error::Domain(format!(
        "no evaluation path for α = {order} at t = {t} (Re α ≤ -1/2)"
    )))
}

/// Step for the double-exponential rule given the oscillation rate `t` and the
/// complex endpoint exponent `decay + i·twist`.
fn de_step(t: f64, decay: f64, twist: f64) -> f64 {
    let strip = if twist == 0.0 {
        FRAC_PI_2
    } else {
        (decay / twist.abs()).atan().min(FRAC_PI_2)
    };
    (1.0f64 / 16.0).min(strip / 8.0).min(1.0 / (8.0 + 1.5 * t))
}

/// Node count used by [`bessel_j`] for the Poisson route at `(order, t)`.
pub fn poisson_nodes(order: BesselOrder, t: f64) -> usize {
    let decay = order.re + 0.5;
    let h = de_step(t, decay, order.im);
    let tau = tau_window(decay);
    (2.0 * tau / h).ceil() as usize + 1
}

/// `J_α(t)` by quadrature of the Poisson integral
/// `(t/2)^α / (Γ(α+1/2) Γ(1/2)) ∫_{-1}^{1} e^{its} (1-s²)^{α-1/2} ds`.
///
/// The endpoint factor is absorbed into the weight of a tanh–sinh rule with
/// `nodes` points, which converges exponentially for any complex exponent
/// with `Re α > -1/2`.
pub fn poisson_bessel(order: BesselOrder, t: f64, nodes: usize) -> Result<C64> {
    if !order.poisson_admissible() {
        return Err(Error::Domain(format!(
            "Poisson representation needs Re α > -1/2, got α = {order}"
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("argument t = {t} must be finite and ≥ 0")));
    }
    if nodes < 3 {
        return Err(Error::Domain("Poisson quadrature needs at least 3 nodes".into()));
    }
    let alpha = order.value();
    let expo = alpha + 0.5;
    let integral = tanh_sinh(tau_window(order.re + 0.5), nodes, |n| {
        let ln_w = n.ln_jacobian + expo * (n.ln_one_minus + n.ln_one_plus);
        ln_w.exp() * (t * n.x).cos()
    });
    let norm = complex_gamma(alpha + 0.5)? * PI.sqrt();
    if t == 0.0 {
        return match value_at_zero(order)? {
            v if v.re == 1.0 => checked(integral / norm, "Poisson J_0(0)"),
            v => Ok(v),
        };
    }
    let pre = (alpha * (0.5 * t).ln()).exp();
    checked(pre * integral / norm, "Poisson J_α(t)")
}

/// `m_α(u) = J_α(√u) / (√u)^α`, with `m_α(0) = 2^{-α}/Γ(α+1)`.
pub fn m_alpha(order: BesselOrder, u: f64) -> Result<C64> {
    if !(u >= 0.0) || !u.is_finite() {
        return Err(Error::Domain(format!("m_α needs u ≥ 0, got {u}")));
    }
    let alpha = order.value();
    let s = u.sqrt();
    if s <= series_limit(order) {
        let pre = (-alpha * LN_2).exp() / gamma_of_order_plus_one(alpha)?;
        let core = if u == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            series_core(alpha, Dd::new(-0.25 * u), 0.5 * s)?
        };
        return checked(pre * core, "m_α series");
    }
    let j = bessel_j(order, s)?;
    checked(j * (-alpha * s.ln()).exp(), "m_α")
}

/// `|D_h m_α(u) + m_{α+1}(u)/2|` with `D_h` the central difference.
pub fn m_alpha_prime_residual(order: BesselOrder, u: f64, h: f64) -> Result<f64> {
    if !(h > 0.0 && u > h) {
        return Err(Error::Domain(format!("need u > h > 0, got u = {u}, h = {h}")));
    }
    let d = (m_alpha(order, u + h)? - m_alpha(order, u - h)?) / (2.0 * h);
    Ok((d + 0.5 * m_alpha(order.shifted(1.0), u)?).norm())
}

/// Raises the order by `shift = δ + iγ`:
/// `(2^{1-shift}/Γ(shift)) ∫_0^1 m_β(s²t²) (1-s²)^{shift-1} s^{2β+1} ds`,
/// which equals `m_{β+shift}(t²)`.
pub fn order_lift(beta: f64, shift: C64, t: f64) -> Result<C64> {
    if !(shift.re > 0.0) {
        return Err(Error::DivergentQuadrature(format!(
            "order lift needs Re(shift) > 0, got {shift}"
        )));
    }
    if beta <= -0.5 {
        return Err(Error::Domain(format!("base order β = {beta} must exceed -1/2")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("argument t = {t} must be finite and ≥ 0")));
    }
    let base = BesselOrder::real(beta);
    let left = 2.0 * beta + 2.0;
    let decay = shift.re.min(left);
    let h = de_step(t, shift.re, shift.im).min(de_step(t, left, 0.0));
    let tau = tau_window(decay);
    let count = (2.0 * tau / h).ceil() as usize + 1;

    // s = (1 + x)/2 on [0, 1]
    let mut failure = None;
    let integral = tanh_sinh(tau, count, |n| {
        let ln_s = n.ln_one_plus - LN_2;
        let ln_one_minus_s = n.ln_one_minus - LN_2;
        let s = 0.5 * (1.0 + n.x);
        let ln_one_plus_s = (1.0 + s).ln();
        let ln_jac = n.ln_jacobian + n.ln_one_minus + n.ln_one_plus - LN_2;
        let ln_w = (shift - 1.0) * (ln_one_minus_s + ln_one_plus_s) + (2.0 * beta + 1.0) * ln_s + ln_jac;
        let w = ln_w.exp();
        if w.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        match m_alpha(base, s * s * t * t) {
            Ok(m) => m * w,
            Err(e) => {
                failure.get_or_insert(e);
                C64::new(0.0, 0.0)
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let pre = (C64::new(1.0, 0.0) - shift).scale(LN_2).exp() / complex_gamma(shift)?;
    checked(pre * integral, "order lift")
}

/// Measured bound `sup_u |m_α(u)|` over a dyadic sample of `[0, u_max]`,
/// with the growth exponent `b < π` used for the admissibility certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleConstant {
    pub value: f64,
    pub order: BesselOrder,
    pub bound_exponent: f64,
}

impl AdmissibleConstant {
    pub fn measure(order: BesselOrder, u_max: f64, bound_exponent: f64) -> Result<Self> {
        if !(bound_exponent < PI) {
            return Err(Error::Domain(format!("growth exponent {bound_exponent} must be < π")));
        }
        let mut sup = m_alpha(order, 0.0)?.norm();
        // eight samples per octave from 2^-20 up to u_max
        let top = (u_max.log2() * 8.0).ceil() as i32;
        for j in -160..=top {
            let u = 2f64.powf(j as f64 / 8.0).min(u_max);
            sup = sup.max(m_alpha(order, u)?.norm());
        }
        Ok(Self {
            value: sup,
            order,
            bound_exponent,
        })
    }

    /// `exp(-b |Im α|) · log(c(α))`, which must stay bounded over the
    /// sampled orders for the family to be admissible.
    pub fn growth_certificate(&self) -> f64 {
        (-self.bound_exponent * self.order.im.abs()).exp() * self.value.ln()
    }

    pub fn covers(&self, v: f64) -> bool {
        v <= self.value * (1.0 + 1e-12)
    }
}

/// `√(2/(πt)) sin t`, the closed form of `J_{1/2}`.
pub fn half_integer_j(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        (2.0 / (PI * t)).sqrt() * t.sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(BesselOrder::real(0.0), 0.0).unwrap(), C64::new(1.0, 0.0));
        assert!(bessel_j(BesselOrder::real(0.5), PI).unwrap().norm() < 1e-15);
        assert!(m_alpha(BesselOrder::real(0.5), PI * PI).unwrap().norm() < 1e-15);
        let m = m_alpha(BesselOrder::real(1.0), 0.0).unwrap();
        assert!((m.re - 0.5).abs() < 1e-15 && m.im == 0.0);
    }

    #[test]
    fn half_integer_closed_form_across_methods() {
        let a = BesselOrder::real(0.5);
        for i in 1..=500 {
            let t = 0.1 * i as f64;
            let j = bessel_j(a, t).unwrap();
            assert!((j.re - half_integer_j(t)).abs() < 1e-10, "t = {t}");
        }
        let u = 2.0f64;
        let expect = (2.0 / PI).sqrt() * u.sqrt().sin() / u.sqrt();
        assert!((m_alpha(a, u).unwrap().re - expect).abs() < 1e-14);
    }

    #[test]
    fn asymptotic_and_poisson_agree_beyond_series_range() {
        for a in [0.0, 1.0, 2.5, 4.0] {
            let order = BesselOrder::real(a);
            for t in [14.0, 20.0, 35.0] {
                let p = poisson_bessel(order, t, poisson_nodes(order, t)).unwrap();
                if let Some(h) = bessel_j_asymptotic(order, t) {
                    assert!((p.re - h).abs() < 1e-11, "α={a}, t={t}: {} vs {h}", p.re);
                }
                // the ascending series loses ~e^t/t digits to cancellation
                if t < 25.0 {
                    let s = bessel_j_series(order, t).unwrap();
                    assert!((p - s).norm() < 1e-6, "α={a}, t={t}");
                }
            }
        }
    }

    #[test]
    fn poisson_rejects_inadmissible_orders() {
        assert!(matches!(
            poisson_bessel(BesselOrder::new(-0.5, 1.0), 1.0, 64),
            Err(Error::Domain(_))
        ));
        assert!(poisson_bessel(BesselOrder::real(0.0), 0.0, 64).unwrap().re - 1.0 < 1e-14);
    }

    #[test]
    fn order_lift_matches_direct_evaluation() {
        let v = order_lift(0.5, C64::new(1.0, 0.0), 2.0).unwrap();
        let d = m_alpha(BesselOrder::real(1.5), 4.0).unwrap();
        assert!((v - d).norm() < 1e-12, "{v} vs {d}");
        let z = order_lift(0.0, C64::new(1.0, 0.0), 0.0).unwrap();
        assert!((z - C64::new(0.5, 0.0)).norm() < 1e-13);
        assert!(matches!(
            order_lift(0.5, C64::new(0.0, 1.0), 1.0),
            Err(Error::DivergentQuadrature(_))
        ));
    }

    #[test]
    fn derivative_identity_residual_is_second_order() {
        let order = BesselOrder::real(1.0);
        let r1 = m_alpha_prime_residual(order, 4.0, 1e-2).unwrap();
        let r2 = m_alpha_prime_residual(order, 4.0, 5e-3).unwrap();
        assert!(r1 / r2 > 3.5 && r1 / r2 < 4.5, "ratio {}", r1 / r2);
        assert!(m_alpha_prime_residual(order, 4.0, 1e-4).unwrap() < 1e-6);
        assert!(m_alpha_prime_residual(BesselOrder::real(0.0), 2e-5, 1e-5).unwrap() < 1e-6);
        assert!(m_alpha_prime_residual(order, 1e-5, 1e-4).is_err());
    }

    #[test]
    fn admissible_constant_bounds_samples() {
        let c = AdmissibleConstant::measure(BesselOrder::new(1.0, 0.5), 1e4, 3.0).unwrap();
        assert!(c.value.is_finite() && c.value > 0.0);
        for u in [0.0, 0.3, 17.0, 900.0] {
            assert!(c.covers(m_alpha(c.order, u).unwrap().norm()));
        }
        assert!(c.growth_certificate().is_finite());
    }
}
