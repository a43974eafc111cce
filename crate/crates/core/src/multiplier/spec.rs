use serde::{Deserialize, Serialize};

use crate::specfun::{m_alpha, BesselOrder};
use crate::{Error, Result, C64};

/// Scalar symbol `u ↦ m(u)` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Symbol {
    /// `m_α(u)`
    Bessel { order: BesselOrder },
    /// `u · m_{α+1}(u)`
    BesselEnergy { order: BesselOrder },
    /// Values prescribed on a finite set of arguments.
    Tabulated { points: Vec<(f64, C64)> },
    Identity,
    /// `u^p`
    Power { exponent: f64 },
    /// `sin(s√u)/√u`
    WaveSine { s: f64 },
    /// `cos(s√u)`
    WaveCosine { s: f64 },
}

/// A symbol together with an argument scale `c`, evaluating to `m(c·u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub symbol: Symbol,
    #[serde(default = "unit_scale")]
    pub scale: f64,
    #[serde(default)]
    pub label: String,
}

fn unit_scale() -> f64 {
    1.0
}

const TABLE_MATCH: f64 = 1e-12;

impl MultiplierSpec {
    pub fn new(symbol: Symbol) -> Self {
        Self {
            symbol,
            scale: 1.0,
            label: String::new(),
        }
    }

    pub fn bessel(order: BesselOrder) -> Self {
        Self::new(Symbol::Bessel { order }).labelled(format!("m_{order}"))
    }

    pub fn bessel_energy(order: BesselOrder) -> Self {
        Self::new(Symbol::BesselEnergy { order }).labelled(format!("u·m_{}", order.shifted(1.0)))
    }

    pub fn identity() -> Self {
        Self::new(Symbol::Identity).labelled("1")
    }

    pub fn power(exponent: f64) -> Self {
        Self::new(Symbol::Power { exponent }).labelled(format!("u^{exponent}"))
    }

    pub fn wave_sine(s: f64) -> Self {
        Self::new(Symbol::WaveSine { s }).labelled(format!("sin({s}√u)/√u"))
    }

    pub fn wave_cosine(s: f64) -> Self {
        Self::new(Symbol::WaveCosine { s }).labelled(format!("cos({s}√u)"))
    }

    /// Tabulated symbol; the points are sorted by argument.
    pub fn tabulated(mut points: Vec<(f64, C64)>) -> Result<Self> {
        if points.iter().any(|(u, v)| !u.is_finite() || *u < 0.0 || !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("tabulated symbol needs finite values at finite u ≥ 0".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::new(Symbol::Tabulated { points }).labelled("table"))
    }

    /// `u ↦ m(c·u)`
    pub fn with_scale(mut self, c: f64) -> Self {
        self.scale *= c;
        self
    }

    pub fn labelled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Whether the symbol has no finite value at `u = 0`.
    pub fn singular_at_zero(&self) -> bool {
        matches!(self.symbol, Symbol::Power { exponent } if exponent < 0.0)
    }

    pub fn eval(&self, u: f64) -> Result<C64> {
        if !(u >= 0.0) || !u.is_finite() {
            return Err(Error::Domain(format!("symbol argument must be finite and ≥ 0, got {u}")));
        }
        let v = self.scale * u;
        let one = C64::new(1.0, 0.0);
        match &self.symbol {
            Symbol::Bessel { order } => m_alpha(*order, v),
            Symbol::BesselEnergy { order } => Ok(m_alpha(order.shifted(1.0), v)? * v),
            Symbol::Identity => Ok(one),
            Symbol::Power { exponent } => {
                if v == 0.0 && *exponent < 0.0 {
                    Err(Error::Domain(format!("u^{exponent} is singular at 0")))
                } else {
                    Ok(C64::new(v.powf(*exponent), 0.0))
                }
            }
            Symbol::WaveSine { s } => {
                let r = v.sqrt();
                Ok(C64::new(if r == 0.0 { *s } else { (s * r).sin() / r }, 0.0))
            }
            Symbol::WaveCosine { s } => Ok(C64::new((s * v.sqrt()).cos(), 0.0)),
            Symbol::Tabulated { points } => {
                let i = points.partition_point(|(p, _)| *p < v * (1.0 - TABLE_MATCH));
                match points.get(i) {
                    Some((p, val)) if (p - v).abs() <= TABLE_MATCH * v.max(1.0) => Ok(*val),
                    _ => Err(Error::Domain(format!("tabulated symbol has no value at u = {v}"))),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simple_symbols() {
        assert_eq!(MultiplierSpec::identity().eval(3.0).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(MultiplierSpec::power(1.0).eval(3.5).unwrap().re, 3.5);
        assert!(MultiplierSpec::power(-1.0).eval(0.0).is_err());
        assert!(MultiplierSpec::power(-1.0).singular_at_zero());
        assert_eq!(MultiplierSpec::wave_sine(2.0).eval(0.0).unwrap().re, 2.0);
        let w = MultiplierSpec::wave_sine(1.0).eval(PI * PI).unwrap().re;
        assert!(w.abs() < 1e-15);
    }

    #[test]
    fn scale_and_table() {
        let s = MultiplierSpec::power(1.0).with_scale(4.0);
        assert_eq!(s.eval(2.0).unwrap().re, 8.0);
        let t = MultiplierSpec::tabulated(vec![(2.0, C64::new(5.0, 1.0)), (1.0, C64::new(3.0, 0.0))]).unwrap();
        assert_eq!(t.eval(1.0).unwrap().re, 3.0);
        assert_eq!(t.eval(2.0).unwrap().im, 1.0);
        assert!(t.eval(1.5).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let spec = MultiplierSpec::bessel_energy(BesselOrder::new(2.0, 0.5)).with_scale(0.25);
        let json = serde_json::to_string(&spec).unwrap();
        let back: MultiplierSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);
    }
}
