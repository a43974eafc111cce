use std::sync::Arc;

use grushin_core::hermite::{GridSpec, SampledFieldRn};
use grushin_core::multiplier::{
    annulus_l2, annulus_sup, apply_multiplier, hl_maximal, kernel_k, kernel_profile, parseval_l2, weighted_l2_test,
    KernelFamily, MultiplierSpec,
};
use grushin_core::specfun::BesselOrder;
use grushin_core::C64;
use proptest::prelude::*;

fn plane(half_width: f64, dx: f64) -> Arc<GridSpec> {
    Arc::new(GridSpec::uniform_spacing(2, half_width, dx).unwrap())
}

#[test]
fn parseval_matches_the_grid_integral() {
    let grid = plane(12.0, 0.1);
    let x = [0.05, -0.03];
    for (a, t) in [(1.0, 0.5), (2.0, 0.8), (0.5, 0.3)] {
        let order = BesselOrder::real(a);
        let p = kernel_profile(KernelFamily::Plain, order, t, &x, &[0.0], &grid, 20).unwrap();
        let series = parseval_l2(KernelFamily::Plain, order, t, &x, 20).unwrap();
        assert!((p.l2[0] - series).abs() <= 1e-6 * series, "α = {a}, t = {t}");
    }
}

#[test]
fn kernel_reports_insufficient_truncation() {
    let order = BesselOrder::real(1.0);
    let v = kernel_k(order, 0.05, &[0.0, 0.0], &[0.1, 0.0], 10).unwrap();
    assert!(!v.truncation_sufficient);
    let v = kernel_k(BesselOrder::real(6.0), 1.0, &[0.0, 0.0], &[0.1, 0.0], 400).unwrap();
    assert!(v.truncation_sufficient);
}

#[test]
fn annuli_shrink_with_the_radius() {
    let grid = plane(10.0, 0.125);
    let order = BesselOrder::real(1.5);
    let mut last = (f64::INFINITY, f64::INFINITY);
    for r in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let l = annulus_l2(order, 0.7, &[0.3, 0.1], r, &grid, 16).unwrap();
        let s = annulus_sup(order, 0.7, &[0.3, 0.1], r, &grid, 16).unwrap();
        assert!(l <= last.0 && s <= last.1);
        last = (l, s);
    }
}

#[test]
fn maximal_function_of_a_point_mass_decays() {
    let grid = plane(4.0, 0.25);
    let f = SampledFieldRn::from_fn(grid.clone(), |x| C64::new(if x[0] == 0.0 && x[1] == 0.0 { 1.0 } else { 0.0 }, 0.0));
    let m = hl_maximal(&f, 1.0).unwrap();
    let centre = grid.len() / 2;
    assert!(m.values()[centre].re > m.values()[0].re);
}

#[test]
fn weighted_ratio_is_finite_and_positive() {
    let grid = plane(10.0, 0.125);
    let f = SampledFieldRn::from_fn(grid.clone(), |x| C64::new((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp(), 0.0));
    let phi = SampledFieldRn::from_fn(grid.clone(), |x| C64::new(1.0 / (1.0 + x[0] * x[0] + x[1] * x[1]), 0.0));
    let r = weighted_l2_test(BesselOrder::real(1.0), 1.5, &f, &phi, 10).unwrap();
    assert!(r.is_finite() && r > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// `m(H(λ)) = δ_λ m(λH) δ_λ^{-1}`: a field on a box of half-width `L`
    /// read as a field on a box of half-width `2L` is its dilate by `1/2`,
    /// so the two applications share their sample arrays.
    #[test]
    fn scale_reduction(a in 0.0f64..3.0, cx in -1.0f64..1.0, cy in -1.0f64..1.0, w in 0.5f64..1.5) {
        let small = plane(6.0, 0.075);
        let large = plane(12.0, 0.15);
        let values: Vec<C64> = small
            .points()
            .iter()
            .map(|x| C64::new((-((x[0] - cx).powi(2) + (x[1] - cy).powi(2)) / (2.0 * w * w)).exp(), x[0]))
            .collect();
        let f = SampledFieldRn::new(small, values.clone()).unwrap();
        let g = SampledFieldRn::new(large, values).unwrap();
        let spec = MultiplierSpec::bessel(BesselOrder::real(a));
        let direct = apply_multiplier(&spec, 4.0, &f, 14).unwrap();
        let reduced = apply_multiplier(&spec.clone().with_scale(4.0), 1.0, &g, 14).unwrap();
        let diff: f64 = direct.values().iter().zip(reduced.values()).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        let norm: f64 = direct.values().iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!(diff <= 1e-8 * norm, "{diff} vs {norm}");
    }

    #[test]
    fn annulus_norms_are_monotone(a in 0.5f64..3.0, t in 0.2f64..1.5, r0 in 0.0f64..1.0) {
        let grid = plane(9.0, 0.15);
        let radii: Vec<f64> = (0..6).map(|j| r0 + 0.7 * j as f64).collect();
        let p = kernel_profile(KernelFamily::Plain, BesselOrder::real(a), t, &[0.2, -0.1], &radii, &grid, 12).unwrap();
        prop_assert!(p.l2.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(p.sup.windows(2).all(|w| w[1] <= w[0]));
    }
}
