use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::hermite::{scaled_phi, GridSpec, MultiIndex, SampledFieldRn, ScaledTransform};
use crate::{Error, Result, C64};

/// How the test functions of a battery are drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// Complex Gaussian coefficients on the levels `≤ max_level` of the
    /// system at `scale`.
    BandLimited { max_level: usize, scale: f64 },
    /// A smooth compactly supported bump of radius in `[width, 2·width]`
    /// centred in the inner half of the box, with a random phase.
    Bump { width: f64 },
    /// A single `Φ_μ^λ` with `|μ| ≤ max_level`, at the member's own `λ`.
    Eigenfunction { max_level: usize },
}

/// How the frequencies `λ_j` are drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum FrequencyLaw {
    Fixed { lambda: f64 },
    /// `|λ|` log-uniform on `[min, max]` with a random sign.
    LogUniform { min: f64, max: f64 },
}

/// A reproducible family of `(λ_j, f_j)`. Member `j` depends only on the
/// seed and `j`, so growing `count` extends a battery without changing it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomBattery {
    pub seed: u64,
    pub count: usize,
    pub generator: Generator,
    pub frequencies: FrequencyLaw,
}

/// Stream reserved for member `j`; other consumers use streams above `u32::MAX`.
fn member_rng(seed: u64, j: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j as u64);
    rng
}

/// A generator on stream `stream` of `seed`, for draws outside batteries.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A seed for an independent battery, drawn from stream `u32::MAX + 1 + label`
/// of `seed`, so that every battery of a run follows from the one run seed.
pub fn derived_seed(seed: u64, label: u64) -> u64 {
    stream_rng(seed, (1u64 << 32) + (1u64 << 31) + label).gen()
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

fn bump(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

impl RandomBattery {
    pub fn new(seed: u64, count: usize, generator: Generator, frequencies: FrequencyLaw) -> Self {
        Self {
            seed,
            count,
            generator,
            frequencies,
        }
    }

    pub fn with_count(&self, count: usize) -> Self {
        Self { count, ..self.clone() }
    }

    pub fn lambda(&self, j: usize) -> f64 {
        let mut rng = member_rng(self.seed, j);
        match self.frequencies {
            FrequencyLaw::Fixed { lambda } => lambda,
            FrequencyLaw::LogUniform { min, max } => {
                let u: f64 = rng.gen();
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                sign * (min.ln() + u * (max.ln() - min.ln())).exp()
            }
        }
    }

    /// Member `j` on `grid`.
    pub fn member(&self, j: usize, grid: &Arc<GridSpec>) -> Result<(f64, SampledFieldRn)> {
        let lambda = self.lambda(j);
        let mut rng = member_rng(self.seed, j);
        // skip the draws used for λ
        let _: f64 = rng.gen();
        let _: bool = rng.gen();
        let n = grid.dim();
        let field = match &self.generator {
            Generator::BandLimited { max_level, scale } => {
                let tr = ScaledTransform::new(grid, *scale, *max_level)?;
                let coeffs: Vec<C64> = tr
                    .box_levels()
                    .iter()
                    .map(|&l| {
                        let g = gaussian(&mut rng);
                        if l <= *max_level {
                            g
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    })
                    .collect();
                SampledFieldRn::new(grid.clone(), tr.synthesize(&coeffs))?
            }
            Generator::Bump { width } => {
                let half = grid.half_width() / 2.0;
                let centre: Vec<f64> = (0..n).map(|_| rng.gen_range(-half..=half)).collect();
                let radius = width * (1.0 + rng.gen::<f64>());
                let phase = C64::from_polar(1.0, 2.0 * PI * rng.gen::<f64>());
                SampledFieldRn::from_fn(grid.clone(), |x| {
                    let r2: f64 = x.iter().zip(&centre).map(|(a, b)| (a - b) * (a - b)).sum();
                    phase * bump(r2.sqrt() / radius)
                })
            }
            Generator::Eigenfunction { max_level } => {
                let mut mu = vec![0usize; n];
                let level = rng.gen_range(0..=*max_level);
                for _ in 0..level {
                    mu[rng.gen_range(0..n)] += 1;
                }
                let mu = MultiIndex::new(mu)?;
                let values = grid
                    .points()
                    .iter()
                    .map(|x| scaled_phi(&mu, lambda, x).map(|v| C64::new(v, 0.0)))
                    .collect::<Result<Vec<_>>>()?;
                SampledFieldRn::new(grid.clone(), values)?
            }
        };
        if field.max_abs() == 0.0 {
            return Err(Error::Domain(format!("battery member {j} vanishes on the grid")));
        }
        Ok((lambda, field))
    }

    pub fn members(&self, grid: &Arc<GridSpec>) -> Result<Vec<(f64, SampledFieldRn)>> {
        (0..self.count).map(|j| self.member(j, grid)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_extensible() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 6.0, 0.25).unwrap());
        let b = RandomBattery::new(
            11,
            3,
            Generator::BandLimited { max_level: 4, scale: 1.0 },
            FrequencyLaw::LogUniform { min: 0.5, max: 4.0 },
        );
        let a = b.members(&grid).unwrap();
        let c = b.with_count(5).members(&grid).unwrap();
        assert_eq!(a[..], c[..3]);
        assert_eq!(a, b.members(&grid).unwrap());
        for (l, _) in &c {
            assert!((0.5..=4.0).contains(&l.abs()));
        }
        let other = RandomBattery { seed: 12, ..b };
        assert_ne!(other.members(&grid).unwrap()[0], a[0]);
    }

    #[test]
    fn bumps_are_compact() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 4.0, 0.25).unwrap());
        let b = RandomBattery::new(3, 4, Generator::Bump { width: 0.5 }, FrequencyLaw::Fixed { lambda: 1.0 });
        for (_, f) in b.members(&grid).unwrap() {
            let edge = f.values()[0].norm();
            assert_eq!(edge, 0.0);
            assert!(f.max_abs() > 0.0);
        }
    }
}
