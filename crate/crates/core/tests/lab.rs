use std::path::PathBuf;
use std::sync::Arc;

use grushin_core::config::{parse_run_config, AlphaConfig, Experiment, GridConfig, RunConfig, TimeConfig};
use grushin_core::grushin::{decode_field, encode_field, ByteOrder};
use grushin_core::hermite::GridSpec;
use grushin_core::lab::{
    append_jsonl, decay_fit, fit_loglog, parse_record_line, rbound_families, rbound_probe, read_jsonl, write_csv,
    ExperimentRecord, FrequencyLaw, Generator, MaximalKind, RandomBattery, Regime,
};
use grushin_core::multiplier::{KernelFamily, KernelProfile};
use grushin_core::selftest::{run_selftest, Fault};
use grushin_core::specfun::BesselOrder;
use proptest::prelude::*;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "empty corpus for {target}");
    out
}

#[test]
fn container_seeds_replay() {
    let mut accepted = 0;
    for (path, bytes) in corpus("field_container") {
        if let Ok(c) = decode_field(&bytes) {
            accepted += 1;
            let again = decode_field(&encode_field(&c, ByteOrder::Little).unwrap()).unwrap();
            assert_eq!(again, c, "{}", path.display());
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn config_seeds_replay() {
    let mut accepted = 0;
    for (path, bytes) in corpus("run_config") {
        let text = String::from_utf8(bytes).unwrap();
        if let Ok(c) = RunConfig::from_toml(&text) {
            accepted += 1;
            let again = c.to_toml().unwrap();
            assert_eq!(RunConfig::from_toml(&again).unwrap(), c, "{}", path.display());
            let _ = parse_run_config(&text);
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn record_seeds_replay() {
    let mut accepted = 0;
    for (_, bytes) in corpus("record_line") {
        let Ok(text) = String::from_utf8(bytes) else { continue };
        if let Ok(r) = parse_record_line(text.trim_end()) {
            accepted += 1;
            let _ = r.csv_rows();
            assert_eq!(parse_record_line(&r.to_json_line().unwrap()).unwrap(), r);
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(parse_run_config("n = 2\n[experiment]\nkind = \"decay\"\nregime = \"l2\"\nbogus = 1\n").is_err());
    assert!(parse_run_config("n = 0\n[experiment]\nkind = \"selftest\"\n").is_err());
    let c = parse_run_config("n = 2\n[grid]\nhalf_width = 10.0\nnodes = 161\n[experiment]\nkind = \"decay\"\nregime = \"sup\"\n").unwrap();
    assert_eq!(c.experiment, Experiment::Decay { t: 0.5, regime: Regime::Sup });
}

#[test]
fn selftest_notices_a_corrupted_table() {
    assert!(run_selftest(None).passed());
    assert_eq!(run_selftest(Some(Fault::CorruptBesselTable)).failures(), vec!["method agreement"]);
}

fn profile(values: Vec<f64>) -> KernelProfile {
    let radii: Vec<f64> = (1..=values.len()).map(|j| 0.5 * 2f64.powi(j as i32)).collect();
    KernelProfile {
        order: BesselOrder::real(1.0),
        family: KernelFamily::Plain,
        t: 0.5,
        x: vec![0.0, 0.0],
        n: 2,
        truncation: 8,
        radii,
        l2: values.clone(),
        sup: values,
    }
}

#[test]
fn clean_power_laws_are_recovered_and_noisy_ones_flagged() {
    let clean: Vec<f64> = (1..=6).map(|j| (1.0 + 2f64.powi(j)).powf(-3.0)).collect();
    let fit = decay_fit(&[profile(clean)], Regime::L2).unwrap();
    assert!((fit.fit.slope + 3.0).abs() < 1e-9 && !fit.inconclusive);
    let noisy: Vec<f64> = (1..=6).map(|j| if j % 2 == 0 { 1e-3 } else { 1.0 }).collect();
    assert!(decay_fit(&[profile(noisy)], Regime::L2).unwrap().inconclusive);
    assert!(decay_fit(&[profile(vec![1.0, 0.5])], Regime::L2).is_err());
}

#[test]
fn loglog_fit_reports_residual() {
    let xs = [1.0, 2.0, 4.0, 8.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
    let f = fit_loglog(&xs, &ys).unwrap();
    assert!((f.slope + 1.5).abs() < 1e-12 && f.residual < 1e-12);
}

#[test]
fn records_persist() {
    let dir = tempfile::tempdir().unwrap();
    let mut r = ExperimentRecord::new("decay", 2, (1.0, 0.0), 7).param("t", 0.5);
    r.sample("r", 1.0, 0.25);
    r.sample("r", 2.0, 0.0625);
    let path = dir.path().join("records.jsonl");
    append_jsonl(&path, &[r.clone()]).unwrap();
    append_jsonl(&path, &[r.clone()]).unwrap();
    assert_eq!(read_jsonl(&path).unwrap(), vec![r.clone(), r.clone()]);
    let csv = dir.path().join("decay.csv");
    write_csv(&csv, &[r]).unwrap();
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 3);
}

fn battery(count: usize) -> RandomBattery {
    RandomBattery::new(11, count, Generator::Bump { width: 1.0 }, FrequencyLaw::LogUniform { min: 1.0, max: 2.0 })
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    let grid = Arc::new(GridSpec::uniform_spacing(2, 8.0, 0.2).unwrap());
    let run = |threads| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            let a = rbound_probe(BesselOrder::real(1.0), &battery(6), &grid, 4.0, 10).unwrap();
            let b = rbound_families(BesselOrder::real(1.0), &battery(8), 2, &grid, 4.0, 10).unwrap();
            (a, b)
        })
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}

#[test]
fn batteries_extend_without_changing() {
    let grid = Arc::new(GridSpec::uniform_spacing(2, 6.0, 0.25).unwrap());
    let short = battery(3).members(&grid).unwrap();
    let long = battery(5).members(&grid).unwrap();
    assert_eq!(short[..], long[..3]);
}

fn any_experiment() -> impl Strategy<Value = Experiment> {
    prop_oneof![
        Just(Experiment::Selftest),
        (0.01f64..4.0, prop::bool::ANY).prop_map(|(t, l2)| Experiment::Decay {
            t,
            regime: if l2 { Regime::L2 } else { Regime::Sup }
        }),
        (1.0f64..2.0, 1usize..20).prop_map(|(hl, count)| Experiment::Maximal {
            family: MaximalKind::Energy,
            hl_exponent: hl,
            count
        }),
        (1.0f64..6.0, 1usize..20, 0.1f64..1.0, 1.0f64..8.0).prop_map(|(p, count, lo, hi)| Experiment::Rbound {
            p,
            count,
            lambda_min: lo,
            lambda_max: hi
        }),
        (prop::collection::vec(1.0f64..8.0, 1..4), prop::collection::vec(1usize..40, 1..4)).prop_map(
            |(ps, truncations)| Experiment::LpProbe { ps, truncations, band: 1, count: 3, iterations: 2 }
        ),
        ("[a-z]{1,8}", -3.0f64..3.0).prop_map(|(name, s)| Experiment::Propagate {
            input: PathBuf::from(format!("{name}.grf")),
            output: PathBuf::from(format!("out/{name}.grf")),
            s
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        n in 1usize..4,
        half_width in 1.0f64..20.0,
        nodes in 3usize..300,
        samples in 1usize..64,
        truncation in 0usize..64,
        re in -0.4f64..6.0,
        im in -5.0f64..5.0,
        seed in 0..=i64::MAX as u64,
        workers in prop::option::of(1usize..16),
        experiment in any_experiment(),
    ) {
        let c = RunConfig {
            n,
            grid: GridConfig { half_width, nodes },
            time: TimeConfig { period: 2.0 * std::f64::consts::PI, samples: 2 * samples },
            truncation,
            alpha: AlphaConfig { re, im },
            seed,
            output: None,
            workers,
            experiment,
        };
        let text = c.to_toml().unwrap();
        prop_assert_eq!(RunConfig::from_toml(&text).unwrap(), c.clone());
        let big = RunConfig { seed: u64::MAX - seed, ..c };
        prop_assert!(big.to_toml().is_err());
    }

    #[test]
    fn records_round_trip(seed in any::<u64>(), values in prop::collection::vec(-1e300f64..1e300, 0..8)) {
        let mut r = ExperimentRecord::new("weighted", 2, (1.0, 0.0), seed);
        for (j, v) in values.iter().enumerate() {
            r.sample("lambda", j as f64, *v);
            r.measure(&format!("m{j}"), *v);
        }
        let line = r.to_json_line().unwrap();
        prop_assert_eq!(parse_record_line(&line).unwrap(), r);
    }
}
