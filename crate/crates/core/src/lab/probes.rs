use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::battery::{stream_rng, RandomBattery};
use super::thresholds::{conjectured_window, proven_window, window_position, WindowPosition};
use crate::grushin::{derivative_family, derivative_family_fd, inverse_t_transform, t_transform, FrequencyDecomposition, SpaceTimeField, TimeGrid};
use crate::hermite::{GridSpec, SampledFieldRn, ScaledTransform};
use crate::multiplier::{hl_maximal, maximal_energy, maximal_t, weighted_l2_test, FiberExpansion, MultiplierSpec};
use crate::specfun::{m_alpha, BesselOrder};
use crate::{Error, Result, C64};

/// `‖(Σ_j |g_j|²)^{1/2}‖_p / ‖(Σ_j |f_j|²)^{1/2}‖_p` on a common grid.
pub fn square_function_ratio(outputs: &[SampledFieldRn], inputs: &[SampledFieldRn], p: f64) -> Result<f64> {
    let sq = |fs: &[SampledFieldRn]| -> Result<SampledFieldRn> {
        let first = fs.first().ok_or_else(|| Error::InsufficientRange("empty family".into()))?;
        let mut acc = vec![0.0f64; first.values().len()];
        for f in fs {
            if f.grid() != first.grid() && **f.grid() != **first.grid() {
                return Err(Error::Shape("family members live on different grids".into()));
            }
            for (a, v) in acc.iter_mut().zip(f.values()) {
                *a += v.norm_sqr();
            }
        }
        SampledFieldRn::new(first.grid().clone(), acc.into_iter().map(|a| C64::new(a.sqrt(), 0.0)).collect())
    };
    let den = sq(inputs)?.lp_norm(p);
    if !(den > 0.0) {
        return Err(Error::DegenerateRatio);
    }
    Ok(sq(outputs)?.lp_norm(p) / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RBoundMeasurement {
    pub p: f64,
    pub members: usize,
    pub ratio: f64,
    /// `max_j sup_{k ≤ K} |symbol((2k+n)|λ_j|)|` for the operator probed.
    pub scalar_bound: f64,
}

/// `P_{≤K}(λ_j) f_j` for every member, so that inputs live on the truncated space.
fn projected_members(battery: &RandomBattery, grid: &Arc<GridSpec>, k: usize) -> Result<Vec<(f64, FiberExpansion)>> {
    battery
        .members(grid)?
        .into_iter()
        .map(|(l, f)| Ok((l, FiberExpansion::new(&f, l, k)?)))
        .collect()
}

fn ones(k: usize) -> Vec<C64> {
    vec![C64::new(1.0, 0.0); k + 1]
}

/// The square-function ratio for `T_α(λ_j) = m_α(H(λ_j))` over the battery.
pub fn rbound_probe(order: BesselOrder, battery: &RandomBattery, grid: &Arc<GridSpec>, p: f64, k: usize) -> Result<RBoundMeasurement> {
    let n = grid.dim();
    let spec = MultiplierSpec::bessel(order);
    let members = projected_members(battery, grid, k)?;
    let mut inputs = Vec::with_capacity(members.len());
    let mut outputs = Vec::with_capacity(members.len());
    let mut bound = 0.0f64;
    for (l, e) in &members {
        inputs.push(SampledFieldRn::new(grid.clone(), e.apply(&ones(k)))?);
        outputs.push(e.apply_spec(&spec)?);
        for j in 0..=k {
            bound = bound.max(m_alpha(order, (2 * j + n) as f64 * l.abs())?.norm());
        }
    }
    Ok(RBoundMeasurement {
        p,
        members: members.len(),
        ratio: square_function_ratio(&outputs, &inputs, p)?,
        scalar_bound: bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RBoundFamilies {
    pub p: f64,
    /// Members per family.
    pub size: usize,
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    pub scalar_bound: f64,
}

/// [`rbound_probe`] over consecutive families of `size` members: family `i`
/// holds members `i·size .. (i+1)·size`, so a longer battery only adds
/// families and the maximum can be watched as it grows.
pub fn rbound_families(
    order: BesselOrder,
    battery: &RandomBattery,
    size: usize,
    grid: &Arc<GridSpec>,
    p: f64,
    k: usize,
) -> Result<RBoundFamilies> {
    if size == 0 || battery.count < size {
        return Err(Error::InsufficientRange(format!(
            "{} members cannot form families of {size}",
            battery.count
        )));
    }
    let n = grid.dim();
    let spec = MultiplierSpec::bessel(order);
    let pairs: Vec<Result<(SampledFieldRn, SampledFieldRn, f64)>> = (0..battery.count - battery.count % size)
        .into_par_iter()
        .map(|j| {
            let (l, f) = battery.member(j, grid)?;
            let e = FiberExpansion::new(&f, l, k)?;
            let mut bound = 0.0f64;
            for level in 0..=k {
                bound = bound.max(m_alpha(order, (2 * level + n) as f64 * l.abs())?.norm());
            }
            Ok((SampledFieldRn::new(grid.clone(), e.apply(&ones(k)))?, e.apply_spec(&spec)?, bound))
        })
        .collect();
    let mut inputs = Vec::with_capacity(pairs.len());
    let mut outputs = Vec::with_capacity(pairs.len());
    let mut scalar_bound = 0.0f64;
    for r in pairs {
        let (i, o, b) = r?;
        inputs.push(i);
        outputs.push(o);
        scalar_bound = scalar_bound.max(b);
    }
    let ratios = inputs
        .chunks(size)
        .zip(outputs.chunks(size))
        .map(|(i, o)| square_function_ratio(o, i, p))
        .collect::<Result<Vec<f64>>>()?;
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    Ok(RBoundFamilies {
        p,
        size,
        ratios,
        max_ratio,
        scalar_bound,
    })
}

/// How `S_α(λ) = λ d/dλ T_α(λ)` is evaluated inside a probe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum DerivativeMethod {
    Raising,
    FiniteDifference { h: f64 },
}

/// The square-function ratio for `S_α(λ_j)`.
pub fn rbound_derivative_probe(
    order: BesselOrder,
    battery: &RandomBattery,
    grid: &Arc<GridSpec>,
    p: f64,
    k: usize,
    method: DerivativeMethod,
) -> Result<RBoundMeasurement> {
    let n = grid.dim();
    let members = projected_members(battery, grid, k)?;
    let mut inputs = Vec::with_capacity(members.len());
    let mut outputs = Vec::with_capacity(members.len());
    let mut bound = 0.0f64;
    for (l, e) in &members {
        let f = SampledFieldRn::new(grid.clone(), e.apply(&ones(k)))?;
        let s = match method {
            DerivativeMethod::Raising => derivative_family(order, *l, &f, k)?,
            // two extra levels hold the O(h) leakage of the moved projections
            DerivativeMethod::FiniteDifference { h } => derivative_family_fd(order, *l, &f, k + 2, h)?,
        };
        for j in 0..=k {
            let u = (2 * j + n) as f64 * l.abs();
            bound = bound.max((m_alpha(order.shifted(1.0), u)? * (0.5 * u)).norm());
        }
        inputs.push(f);
        outputs.push(s);
    }
    Ok(RBoundMeasurement {
        p,
        members: members.len(),
        ratio: square_function_ratio(&outputs, &inputs, p)?,
        scalar_bound: bound,
    })
}

/// `max_j ∫|T_α(λ_j) f_j|²|φ_j| / ∫|f_j|² Mφ_j` with `λ_j` taken from the
/// weight battery, so redrawing that battery redraws both `φ` and `λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedBattery {
    pub ratios: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub constant: f64,
}

pub fn weighted_battery(
    order: BesselOrder,
    fields: &RandomBattery,
    weights: &RandomBattery,
    grid: &Arc<GridSpec>,
    k: usize,
) -> Result<WeightedBattery> {
    let count = fields.count.min(weights.count);
    let pairs: Vec<Result<(f64, f64)>> = (0..count)
        .into_par_iter()
        .map(|j| {
            let (_, f) = fields.member(j, grid)?;
            let (lambda, phi) = weights.member(j, grid)?;
            Ok((lambda, weighted_l2_test(order, lambda, &f, &phi, k)?))
        })
        .collect();
    let mut ratios = Vec::with_capacity(count);
    let mut lambdas = Vec::with_capacity(count);
    for r in pairs {
        let (l, q) = r?;
        lambdas.push(l);
        ratios.push(q);
    }
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(WeightedBattery { ratios, lambdas, constant })
}

/// Which maximal domination a battery measures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximalKind {
    /// `T_α^* f` against `M_p f`
    Plain,
    /// `sup_t |t²H m_{α+1}(t²H) f|` against `M_p f`
    Energy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalRatio {
    pub kind: MaximalKind,
    pub hl_exponent: f64,
    pub per_member: Vec<f64>,
    pub max_ratio: f64,
}

/// `max_x (maximal f)(x) / M_p f(x)` for every battery member.
pub fn maximal_ratio_battery(
    kind: MaximalKind,
    order: BesselOrder,
    hl_exponent: f64,
    battery: &RandomBattery,
    grid: &Arc<GridSpec>,
    ts: &[f64],
    k: usize,
) -> Result<MaximalRatio> {
    let mut per_member = Vec::with_capacity(battery.count);
    for j in 0..battery.count {
        let (_, f) = battery.member(j, grid)?;
        let top = match kind {
            MaximalKind::Plain => maximal_t(order, &f, ts, k)?,
            MaximalKind::Energy => maximal_energy(order, &f, ts, k)?,
        };
        let hl = hl_maximal(&f, hl_exponent)?;
        let r = top
            .values()
            .iter()
            .zip(hl.values())
            .filter(|(_, m)| m.re > 0.0)
            .map(|(a, m)| a.re / m.re)
            .fold(0.0, f64::max);
        per_member.push(r);
    }
    let max_ratio = per_member.iter().copied().fold(0.0, f64::max);
    Ok(MaximalRatio {
        kind,
        hl_exponent,
        per_member,
        max_ratio,
    })
}

/// Space-time setting of the `L^p` probe.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSetup {
    pub x_grid: Arc<GridSpec>,
    pub t_grid: TimeGrid,
    /// Frequencies `0 < |k| ≤ band` span the truncated space.
    pub band: usize,
    pub seed: u64,
    pub battery_size: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpEstimate {
    pub p: f64,
    pub truncation: usize,
    /// Running maximum of the battery ratios, one entry per member.
    pub running_max: Vec<f64>,
    /// Best ratio after the dual-map iteration started from the battery maximiser.
    pub refined: f64,
    pub proven_window: WindowPosition,
    pub conjectured_window: WindowPosition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpReport {
    pub n: usize,
    pub estimates: Vec<LpEstimate>,
    pub statement: String,
}

/// `P sin(√G)/√G P` where `P` keeps the frequencies `0 < |k| ≤ band` and
/// the levels `≤ K` of each.
struct TruncatedPropagator {
    band: usize,
    k: usize,
}

impl TruncatedPropagator {
    fn restrict(&self, d: &mut FrequencyDecomposition) {
        for fib in d.fibers_mut() {
            if fib.k.unsigned_abs() as usize > self.band {
                fib.field = SampledFieldRn::zeros(fib.field.grid().clone());
            }
        }
        let g = d.zero_mode().grid().clone();
        *d.zero_mode_mut() = SampledFieldRn::zeros(g);
    }

    fn apply(&self, f: &SpaceTimeField) -> Result<SpaceTimeField> {
        let mut d = t_transform(f);
        self.restrict(&mut d);
        let n = f.x_grid().dim();
        let k = self.k;
        let band = self.band;
        let out: Vec<Result<(usize, SampledFieldRn)>> = d
            .fibers()
            .par_iter()
            .enumerate()
            .filter(|(_, fib)| fib.k.unsigned_abs() as usize <= band)
            .map(|(i, fib)| {
                let e = FiberExpansion::new(&fib.field, fib.lambda, k)?;
                let w: Vec<C64> = (0..=k)
                    .map(|j| {
                        let nu = ((2 * j + n) as f64 * fib.lambda.abs()).sqrt();
                        C64::new(nu.sin() / nu, 0.0)
                    })
                    .collect();
                Ok((i, SampledFieldRn::new(fib.field.grid().clone(), e.apply(&w))?))
            })
            .collect();
        for r in out {
            let (i, g) = r?;
            d.fibers_mut()[i].field = g;
        }
        Ok(inverse_t_transform(&d))
    }

    /// A random element of the truncated space on stream `stream`.
    fn random(&self, setup: &LpSetup, stream: u64) -> Result<SpaceTimeField> {
        let mut rng = stream_rng(setup.seed, stream);
        let mut d = FrequencyDecomposition::zeros(setup.x_grid.clone(), setup.t_grid);
        for fib in d.fibers_mut() {
            if fib.k.unsigned_abs() as usize > self.band {
                continue;
            }
            let tr = ScaledTransform::new(&setup.x_grid, fib.lambda, self.k)?;
            let coeffs: Vec<C64> = tr
                .box_levels()
                .iter()
                .map(|&l| {
                    use rand::Rng;
                    let re: f64 = rng.sample(rand_distr::StandardNormal);
                    let im: f64 = rng.sample(rand_distr::StandardNormal);
                    if l <= self.k {
                        C64::new(re, im)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                })
                .collect();
            fib.field = SampledFieldRn::new(setup.x_grid.clone(), tr.synthesize(&coeffs))?;
        }
        Ok(inverse_t_transform(&d))
    }
}

/// `|z|^{q-2} z`, the duality map of `L^q` up to normalisation.
fn duality(f: &SpaceTimeField, q: f64) -> SpaceTimeField {
    let values = f
        .values()
        .iter()
        .map(|z| {
            let a = z.norm();
            if a == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                z * a.powf(q - 2.0)
            }
        })
        .collect();
    SpaceTimeField::new(f.x_grid().clone(), f.t_grid(), values).expect("finite input stays finite")
}

/// Lower estimates of `‖sin(√G)/√G‖_{p→p}` on truncated spaces. Bounded
/// sequences in `K` are consistent with boundedness on `L^p`; they do not
/// prove it.
pub fn lp_probe(ps: &[f64], ks: &[usize], setup: &LpSetup) -> Result<LpReport> {
    let n = setup.x_grid.dim();
    let mut estimates = Vec::new();
    for &p in ps {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p must lie in (1, ∞), got {p}")));
        }
        for &k in ks {
            let op = TruncatedPropagator { band: setup.band, k };
            let mut running = Vec::with_capacity(setup.battery_size);
            let mut best = 0.0f64;
            let mut best_f = None;
            for j in 0..setup.battery_size {
                let f = op.random(setup, (1u64 << 32) + j as u64)?;
                let r = op.apply(&f)?.lp_norm(p) / f.lp_norm(p);
                if r > best {
                    best = r;
                    best_f = Some(f);
                }
                running.push(best);
            }
            let mut refined = best;
            if let Some(mut x) = best_f {
                let q = p / (p - 1.0);
                for _ in 0..setup.iterations {
                    let y = op.apply(&x)?;
                    let z = op.apply(&duality(&y, p))?;
                    let next = duality(&z, q);
                    let norm = next.lp_norm(p);
                    if !(norm > 0.0) {
                        break;
                    }
                    x = next.scaled(C64::new(1.0 / norm, 0.0));
                    refined = refined.max(op.apply(&x)?.lp_norm(p));
                }
            }
            estimates.push(LpEstimate {
                p,
                truncation: k,
                running_max: running,
                refined,
                proven_window: window_position(p, proven_window(n)),
                conjectured_window: window_position(p, conjectured_window(n)),
            });
        }
    }
    Ok(LpReport {
        n,
        estimates,
        statement: format!(
            "estimates are lower bounds on truncated spaces; sequences bounded in K are consistent with, \
             not proof of, L^p boundedness of sin(√G)/√G (proven window |1/p - 1/2| < 1/{}, conjectured < 1/{})",
            n + 2,
            n
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::battery::{FrequencyLaw, Generator};

    #[test]
    fn identical_members_collapse() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 7.0, 0.25).unwrap());
        let one = RandomBattery::new(5, 1, Generator::BandLimited { max_level: 3, scale: 1.0 }, FrequencyLaw::Fixed { lambda: 1.0 });
        let order = BesselOrder::real(1.0);
        let single = rbound_probe(order, &one, &grid, 4.0, 6).unwrap();
        let (l, f) = one.member(0, &grid).unwrap();
        let e = FiberExpansion::new(&f, l, 6).unwrap();
        let pf = SampledFieldRn::new(grid.clone(), e.apply(&ones(6))).unwrap();
        let tf = e.apply_spec(&MultiplierSpec::bessel(order)).unwrap();
        let many = square_function_ratio(&[tf.clone(), tf.clone(), tf], &[pf.clone(), pf.clone(), pf], 4.0).unwrap();
        assert!((single.ratio - many).abs() < 1e-12 * many);
    }

    #[test]
    fn p2_ratio_below_scalar_bound() {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 8.0, 0.2).unwrap());
        let b = RandomBattery::new(9, 4, Generator::Bump { width: 0.8 }, FrequencyLaw::LogUniform { min: 1.0, max: 2.0 });
        let m = rbound_probe(BesselOrder::real(1.0), &b, &grid, 2.0, 10).unwrap();
        assert!(m.ratio <= m.scalar_bound + 1e-6, "{} {}", m.ratio, m.scalar_bound);
    }

    #[test]
    fn lp_probe_at_two_is_contractive() {
        let setup = LpSetup {
            x_grid: Arc::new(GridSpec::uniform_spacing(1, 8.0, 0.2).unwrap()),
            t_grid: TimeGrid::new(2.0 * std::f64::consts::PI, 8).unwrap(),
            band: 2,
            seed: 1,
            battery_size: 3,
            iterations: 2,
        };
        let r = lp_probe(&[2.0, 4.0], &[6], &setup).unwrap();
        let e2 = &r.estimates[0];
        assert!(e2.refined <= 1.0 + 1e-6);
        assert!(e2.running_max.windows(2).all(|w| w[1] >= w[0]));
        // n = 1: |1/4 - 1/2| = 1/4 < 1/3
        assert_eq!(r.estimates[1].proven_window, WindowPosition::Inside);
    }
}
