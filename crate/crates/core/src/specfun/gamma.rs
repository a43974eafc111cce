use std::f64::consts::PI;

use crate::{Error, Result, C64};

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const STIRLING_RADIUS: f64 = 15.0;

/// `ln Γ(z)` from the Stirling series, valid for `|z| ≥ 15`, `Re z > 0`.
fn ln_gamma_stirling(z: C64) -> C64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = C64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + half_ln_2pi + series
}

/// `sin(πz)` with the real part reduced exactly before scaling by π.
pub(crate) fn sin_pi(z: C64) -> C64 {
    let r = z.re - 2.0 * (0.5 * z.re).round();
    let (s, c) = (PI * r).sin_cos();
    let y = PI * z.im;
    C64::new(s * y.cosh(), c * y.sinh())
}

/// Gamma function for complex arguments.
///
/// Uses upward recurrence into the Stirling region for `Re z ≥ 1/2` and the
/// reflection formula otherwise. Nonpositive integers are poles.
pub fn complex_gamma(z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("Γ({z}) of a non-finite argument")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    let g = if z.re < 0.5 {
        let s = sin_pi(z);
        let g1 = gamma_right(C64::new(1.0, 0.0) - z);
        C64::new(PI, 0.0) / (s * g1)
    } else {
        gamma_right(z)
    };
    if !g.re.is_finite() || !g.im.is_finite() {
        return Err(Error::Overflow(format!("Γ({z}) exceeds the f64 range")));
    }
    Ok(g)
}

fn gamma_right(z: C64) -> C64 {
    let mut shifted = z;
    let mut product = C64::new(1.0, 0.0);
    while shifted.norm() < STIRLING_RADIUS {
        product *= shifted;
        shifted += 1.0;
    }
    ln_gamma_stirling(shifted).exp() / product
}

/// `1/Γ(z)`, entire: zero at the poles of Γ.
pub fn reciprocal_gamma(z: C64) -> Result<C64> {
    match complex_gamma(z) {
        Ok(g) => Ok(g.inv()),
        Err(Error::Pole { .. }) => Ok(C64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert!(rel(complex_gamma(C64::new(1.0, 0.0)).unwrap(), C64::new(1.0, 0.0)) < 1e-14);
        let sqrt_pi = PI.sqrt();
        assert!(rel(complex_gamma(C64::new(0.5, 0.0)).unwrap(), C64::new(sqrt_pi, 0.0)) < 1e-14);
        let mut fact = 1.0;
        for n in 1..25 {
            let g = complex_gamma(C64::new(n as f64, 0.0)).unwrap();
            assert!(rel(g, C64::new(fact, 0.0)) < 1e-13, "Γ({n})");
            fact *= n as f64;
        }
    }

    #[test]
    fn poles_are_reported() {
        for n in 0..5 {
            assert!(matches!(
                complex_gamma(C64::new(-(n as f64), 0.0)),
                Err(Error::Pole { .. })
            ));
        }
        assert_eq!(reciprocal_gamma(C64::new(-3.0, 0.0)).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn modulus_on_the_line_re_one_half() {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        for y in [0.3, 1.0, 4.0, 12.0, 29.0] {
            let g = complex_gamma(C64::new(0.5, y)).unwrap();
            let exact = PI / (PI * y).cosh();
            assert!((g.norm_sqr() / exact - 1.0).abs() < 1e-12, "y={y}");
        }
    }

    #[test]
    fn reflection_consistency_in_left_half_plane() {
        for z in [C64::new(-3.7, 0.4), C64::new(-9.2, 2.0), C64::new(-0.5, -6.0)] {
            let lhs = complex_gamma(z).unwrap() * complex_gamma(C64::new(1.0, 0.0) - z).unwrap();
            let rhs = C64::new(PI, 0.0) / sin_pi(z);
            assert!(rel(lhs, rhs) < 1e-12);
        }
    }
}
