//! Experiment dispatch behind the `grushin` binary.

use std::path::{Component, Path, PathBuf};

use anyhow::{bail, Context};
use grushin_core::config::{Experiment, RunConfig};
use grushin_core::grushin::{
    apply_m_g_with_report, inverse_t_transform, read_field, wave_energy, wave_propagate, write_field, FieldContainer,
    FrequencyDecomposition, SpaceTimeField,
};
use grushin_core::lab::thresholds::regime_notes;
use grushin_core::lab::{
    append_jsonl, decay_fit, derived_seed, log_levels, lp_probe, maximal_ratio_battery, n1_diagnostic,
    rbound_derivative_probe, rbound_families, rbound_probe, weighted_battery, write_csv, DerivativeMethod, ExperimentRecord,
    FitSummary, FrequencyLaw, Generator, LpSetup, RandomBattery,
};
use grushin_core::multiplier::{default_t_samples, kernel_profile, MultiplierSpec};
use grushin_core::selftest::run_selftest;

pub const RECORDS_FILE: &str = "records.jsonl";
pub const ERRORS_FILE: &str = "errors.jsonl";

/// Where a run writes when neither the command line nor the configuration
/// names a directory and `GRUSHIN_OUT` is unset.
pub const DEFAULT_OUT: &str = "grushin-out";

/// Members per family in the family-wise square-function probe.
pub const FAMILY_SIZE: usize = 4;

/// Resolves `path` inside `out`, refusing anything that would escape it.
pub fn confined(out: &Path, path: &Path) -> anyhow::Result<PathBuf> {
    if path.is_absolute() {
        if path.starts_with(out) && !path.components().any(|c| c == Component::ParentDir) {
            return Ok(path.to_path_buf());
        }
        bail!("{} lies outside the output directory {}", path.display(), out.display());
    }
    if path.components().any(|c| !matches!(c, Component::Normal(_) | Component::CurDir)) {
        bail!("{} must stay inside the output directory", path.display());
    }
    Ok(out.join(path))
}

fn base_record(cfg: &RunConfig, kind: &str) -> anyhow::Result<ExperimentRecord> {
    Ok(ExperimentRecord::new(kind, cfg.n, (cfg.alpha.re, cfg.alpha.im), cfg.seed)
        .with_grid(cfg.x_grid()?.signature(), cfg.truncation))
}

/// Runs the configured experiment in the current worker pool and returns its
/// records, without writing them.
pub fn execute(cfg: &RunConfig, out: &Path) -> anyhow::Result<Vec<ExperimentRecord>> {
    let order = cfg.order();
    let k = cfg.truncation;
    let name = cfg.experiment.name();
    let mut rec = base_record(cfg, name)?;
    match &cfg.experiment {
        Experiment::Selftest => {
            let report = run_selftest(None);
            for c in &report.checks {
                rec.measure(&c.name, c.defect);
            }
            rec.measure("failed", report.failures().len() as f64);
            rec.notes = report.render().lines().map(str::to_string).collect();
            if !report.passed() {
                bail!("selftest failed: {}", report.failures().join(", "));
            }
        }
        Experiment::Transform { input, output, t } => {
            let c = read_field(&confined(out, input)?).with_context(|| format!("reading {}", input.display()))?;
            let spec = MultiplierSpec::bessel(order).with_scale(t * t);
            let (g, report) = apply_m_g_with_report(&spec, &c.field, k)?;
            rec = rec.param("t", *t);
            rec.measure("input_l2", c.field.l2_norm());
            rec.measure("output_l2", g.l2_norm());
            rec.measure("negligible_fibers", report.negligible.len() as f64);
            write_field(&confined(out, output)?, &FieldContainer { field: g, truncation: k })?;
        }
        Experiment::Propagate { input, output, s } => {
            let c = read_field(&confined(out, input)?).with_context(|| format!("reading {}", input.display()))?;
            let zero = SpaceTimeField::zeros(c.field.x_grid().clone(), c.field.t_grid());
            let e0 = wave_energy(&zero, &c.field, k)?;
            let (u, us) = wave_propagate(&c.field, *s, k)?;
            let e1 = wave_energy(&u, &us, k)?;
            rec = rec.param("s", *s);
            rec.measure("energy", e0);
            rec.measure("energy_drift", (e1 - e0).abs() / e0);
            write_field(&confined(out, output)?, &FieldContainer { field: u, truncation: k })?;
        }
        Experiment::KernelScan { t, family } => {
            let grid = cfg.x_grid()?;
            let radii: Vec<f64> = (0..=10).map(|j| t * 2f64.powf(j as f64 / 2.0)).collect();
            let p = kernel_profile(*family, order, *t, &vec![0.0; cfg.n], &radii, &grid, k)?;
            rec = rec.param("t", *t);
            rec.notes.push(format!("family {family:?}"));
            for (i, r) in p.radii.iter().enumerate() {
                rec.sample("r", *r, p.l2[i]);
            }
            for (i, r) in p.radii.iter().enumerate() {
                rec.sample("r_sup", *r, p.sup[i]);
            }
        }
        Experiment::Decay { t, regime } => {
            let grid = cfg.x_grid()?;
            let radii: Vec<f64> = (2..=10).map(|j| t * 2f64.powf(j as f64 / 2.0)).collect();
            let family = grushin_core::multiplier::KernelFamily::Plain;
            let p = kernel_profile(family, order, *t, &vec![0.0; cfg.n], &radii, &grid, k)?;
            let fit = decay_fit(std::slice::from_ref(&p), *regime)?;
            rec = rec.param("t", *t);
            let values = match regime {
                grushin_core::lab::Regime::L2 => &p.l2,
                grushin_core::lab::Regime::Sup => &p.sup,
            };
            for (r, v) in p.radii.iter().zip(values) {
                rec.sample("r", *r, *v);
            }
            rec.fits.push(FitSummary::new(format!("{regime:?}").to_lowercase(), &fit.fit, Some(fit.target)));
            rec.notes = regime_notes(cfg.n, cfg.alpha.re);
        }
        Experiment::Maximal { family, hl_exponent, count } => {
            let grid = cfg.x_grid()?;
            let battery = RandomBattery::new(cfg.seed, *count, Generator::Bump { width: 1.0 }, FrequencyLaw::Fixed { lambda: 1.0 });
            let m = maximal_ratio_battery(*family, order, *hl_exponent, &battery, &grid, &default_t_samples(), k)?;
            rec = rec.param("hl_exponent", *hl_exponent).param("count", *count as f64);
            rec.notes.push(format!("family {family:?}"));
            for (j, r) in m.per_member.iter().enumerate() {
                rec.sample("member", j as f64, *r);
            }
            rec.measure("max_ratio", m.max_ratio);
        }
        Experiment::Weighted { count } => {
            let grid = cfg.x_grid()?;
            let fields = RandomBattery::new(
                cfg.seed,
                *count,
                Generator::BandLimited { max_level: 6, scale: 1.0 },
                FrequencyLaw::Fixed { lambda: 1.0 },
            );
            let weights = RandomBattery::new(
                derived_seed(cfg.seed, 0),
                *count,
                Generator::Bump { width: 3.0 },
                FrequencyLaw::LogUniform { min: 0.5, max: 4.0 },
            );
            let w = weighted_battery(order, &fields, &weights, &grid, k)?;
            rec = rec.param("count", *count as f64);
            for (l, r) in w.lambdas.iter().zip(&w.ratios) {
                rec.sample("lambda", *l, *r);
            }
            rec.measure("constant", w.constant);
        }
        Experiment::Rbound { p, count, lambda_min, lambda_max } => {
            let grid = cfg.x_grid()?;
            let battery = RandomBattery::new(
                cfg.seed,
                *count,
                Generator::Bump { width: 1.0 },
                FrequencyLaw::LogUniform { min: *lambda_min, max: *lambda_max },
            );
            let m = rbound_probe(order, &battery, &grid, *p, k)?;
            rec = rec.param("p", *p).param("count", *count as f64);
            rec.measure("ratio", m.ratio);
            rec.measure("scalar_bound", m.scalar_bound);
            if *count >= 2 * FAMILY_SIZE {
                let f = rbound_families(order, &battery, FAMILY_SIZE, &grid, *p, k)?;
                for (j, r) in f.ratios.iter().enumerate() {
                    rec.sample("family", j as f64, *r);
                }
                rec.measure("family_max_ratio", f.max_ratio);
            }
        }
        Experiment::RboundDeriv { p, count, lambda_min, lambda_max, h } => {
            let grid = cfg.x_grid()?;
            let battery = RandomBattery::new(
                cfg.seed,
                *count,
                Generator::Bump { width: 1.0 },
                FrequencyLaw::LogUniform { min: *lambda_min, max: *lambda_max },
            );
            let a = rbound_derivative_probe(order, &battery, &grid, *p, k, DerivativeMethod::FiniteDifference { h: *h })?;
            let b = rbound_derivative_probe(order, &battery, &grid, *p, k, DerivativeMethod::Raising)?;
            rec = rec.param("p", *p).param("count", *count as f64).param("h", *h);
            rec.measure("ratio_fd", a.ratio);
            rec.measure("ratio_raising", b.ratio);
            rec.measure("method_agreement", (a.ratio - b.ratio).abs() / b.ratio);
            rec.measure("scalar_bound", b.scalar_bound);
        }
        Experiment::LpProbe { ps, truncations, band, count, iterations } => {
            let setup = LpSetup {
                x_grid: cfg.x_grid()?,
                t_grid: cfg.t_grid()?,
                band: *band,
                seed: cfg.seed,
                battery_size: *count,
                iterations: *iterations,
            };
            let report = lp_probe(ps, truncations, &setup)?;
            let mut out = Vec::new();
            for &p in ps {
                let mut r = base_record(cfg, name)?.param("p", p).param("band", *band as f64);
                for e in report.estimates.iter().filter(|e| e.p == p) {
                    r.sample("K", e.truncation as f64, e.refined);
                    r.notes.push(format!(
                        "K = {}: proven window {:?}, conjectured window {:?}",
                        e.truncation, e.proven_window, e.conjectured_window
                    ));
                }
                r.notes.push(report.statement.clone());
                out.push(r);
            }
            return Ok(out);
        }
        Experiment::N1Diag { kmin, kmax, levels, window } => {
            let d = n1_diagnostic(&log_levels(*kmin, *kmax, *levels), (window[0], window[1]))?;
            rec.n = 1;
            rec = rec.param("window_lo", window[0]).param("window_hi", window[1]);
            for (kk, v) in d.levels.iter().zip(&d.global) {
                rec.sample("k", *kk as f64, *v);
            }
            for (kk, v) in d.levels.iter().zip(&d.compact) {
                rec.sample("k_compact", *kk as f64, *v);
            }
            rec.fits.push(FitSummary::new("global", &d.global_fit.fit, Some(d.global_fit.target)));
            rec.fits.push(FitSummary::new("compact", &d.compact_fit.fit, Some(d.compact_fit.target)));
        }
        Experiment::SynthField { output, band, max_level } => {
            let field = synth_field(cfg, *band, *max_level)?;
            rec = rec.param("band", *band as f64).param("max_level", *max_level as f64);
            rec.measure("l2", field.l2_norm());
            write_field(&confined(out, output)?, &FieldContainer { field, truncation: k })?;
        }
    }
    Ok(vec![rec])
}

/// Random data on the fibers `0 < |k| ≤ band`, levels `≤ max_level` of each.
pub fn synth_field(cfg: &RunConfig, band: usize, max_level: usize) -> anyhow::Result<SpaceTimeField> {
    let x_grid = cfg.x_grid()?;
    let mut d = FrequencyDecomposition::zeros(x_grid.clone(), cfg.t_grid()?);
    for (j, fib) in d.fibers_mut().iter_mut().enumerate() {
        if fib.k == 0 || fib.k.unsigned_abs() as usize > band {
            continue;
        }
        let battery = RandomBattery::new(
            cfg.seed,
            j + 1,
            Generator::BandLimited { max_level, scale: fib.lambda.abs() },
            FrequencyLaw::Fixed { lambda: fib.lambda },
        );
        fib.field = battery.member(j, &x_grid)?.1;
    }
    Ok(inverse_t_transform(&d))
}

/// Validates, runs in a pool of `cfg.workers` threads and persists the
/// records under `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> anyhow::Result<Vec<ExperimentRecord>> {
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let records = pool.build()?.install(|| execute(cfg, out))?;
    let stamped: Vec<ExperimentRecord> = records.iter().cloned().map(ExperimentRecord::stamped).collect();
    append_jsonl(&out.join(RECORDS_FILE), &stamped)?;
    write_csv(&out.join(format!("{}.csv", cfg.experiment.name())), &records)?;
    Ok(records)
}

/// The machine-readable form of a failed run.
pub fn error_record(cfg: Option<&RunConfig>, err: &anyhow::Error) -> String {
    let kind = cfg.map(|c| c.experiment.name()).unwrap_or("unknown");
    let chain: Vec<String> = err.chain().map(|e| e.to_string()).collect();
    serde_json::json!({
        "kind": "error",
        "experiment": kind,
        "seed": cfg.map(|c| c.seed),
        "error": chain.first(),
        "causes": &chain[1.min(chain.len())..],
    })
    .to_string()
}
