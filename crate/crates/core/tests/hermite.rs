use std::sync::Arc;

use grushin_core::hermite::{
    apply_projection, hermite_1d, hermite_table, level_kernels, lowering_apply, projection_kernel, raising_apply,
    ClosureConstants, GridSpec, HermiteBasis, MultiIndex, Raising, SampledFieldRn,
};
use grushin_core::C64;
use proptest::prelude::*;

#[test]
fn hermite_examples() {
    let pi = std::f64::consts::PI;
    assert!((hermite_1d(0, 0.0) - pi.powf(-0.25)).abs() < 1e-15);
    assert_eq!(hermite_1d(1, 0.0), 0.0);
    // h_2(x) = π^{-1/4} (2x² - 1)/√2 e^{-x²/2}
    let x = 0.7f64;
    let h2 = pi.powf(-0.25) * (2.0 * x * x - 1.0) / 2f64.sqrt() * (-x * x / 2.0).exp();
    assert!((hermite_1d(2, x) - h2).abs() < 1e-15);
    assert_eq!(hermite_1d(40, 60.0), 0.0);
}

#[test]
fn gram_identity_on_gauss_hermite_nodes() {
    let g = GridSpec::gauss_hermite(2, 64).unwrap();
    assert!(g.gram_defect(32, 1.0) <= 1e-8);
}

#[test]
fn undersized_grids_are_refused() {
    let g = GridSpec::uniform(2, 3.0, 13).unwrap();
    assert!(g.certify(20, 1.0, 1e-9).is_err());
}

#[test]
fn basis_enumeration_is_complete() {
    let b = HermiteBasis::new(3, 5, 2).unwrap();
    let expected: usize = (0..=7).map(|l| MultiIndex::of_level(3, l).len()).sum();
    assert_eq!(b.len(), expected);
    for i in 0..b.len() {
        assert_eq!(b.position(b.index(i)), Some(i));
    }
}

fn gaussian_field(grid: &Arc<GridSpec>, cx: f64, cy: f64, freq: f64) -> SampledFieldRn {
    SampledFieldRn::from_fn(grid.clone(), |x| {
        let r2 = (x[0] - cx).powi(2) + (x[1] - cy).powi(2);
        C64::from_polar((-0.5 * r2).exp(), freq * x[0])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projections_are_orthogonal_idempotents(
        lambda in prop::sample::select(vec![-5.0, -1.0, -0.3, 0.3, 1.0, 5.0]),
        cx in -1.5f64..1.5,
        cy in -1.5f64..1.5,
        freq in -1.0f64..1.0,
        j in 0usize..5,
        k in 0usize..5,
    ) {
        let grid = Arc::new(GridSpec::uniform_spacing(2, 14.0, 0.1).unwrap());
        let f = gaussian_field(&grid, cx, cy, freq);
        let pk = apply_projection(k, lambda, &f).unwrap();
        let pjpk = apply_projection(j, lambda, &pk).unwrap();
        let d = if j == k { pjpk.difference(&pk) } else { pjpk };
        prop_assert!(d.l2_norm() <= 1e-8 * f.l2_norm());
    }

    #[test]
    fn kernels_are_symmetric_and_diagonally_dominated(
        x in prop::collection::vec(-3.0f64..3.0, 2),
        y in prop::collection::vec(-3.0f64..3.0, 2),
    ) {
        let kxy = level_kernels(&x, &y, 30);
        let kyx = level_kernels(&y, &x, 30);
        let kxx = level_kernels(&x, &x, 30);
        let kyy = level_kernels(&y, &y, 30);
        for k in 0..=30 {
            prop_assert!((kxy[k] - kyx[k]).abs() <= 1e-14);
            prop_assert!(kxy[k] * kxy[k] <= kxx[k] * kyy[k] * (1.0 + 1e-12) + 1e-300);
        }
        let basis = HermiteBasis::new(2, 8, 0).unwrap();
        for k in 0..=8 {
            prop_assert!((projection_kernel(k, &x, &y, &basis).unwrap() - kxy[k]).abs() <= 1e-13);
        }
    }

    #[test]
    fn hermite_table_follows_the_recurrence(x in -10.0f64..10.0) {
        let t = hermite_table(50, x);
        for k in 1..50 {
            let next = x * (2.0 / (k as f64 + 1.0)).sqrt() * t[k] - (k as f64 / (k as f64 + 1.0)).sqrt() * t[k - 1];
            prop_assert!((t[k + 1] - next).abs() <= 1e-13);
        }
    }

    #[test]
    fn lowering_is_the_adjoint_of_raising(seed in any::<u64>(), j in 0usize..2) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let basis = HermiteBasis::new(2, 6, 1).unwrap();
        let mut draw = |top: usize| -> Vec<C64> {
            (0..basis.len())
                .map(|i| if basis.level_of(i) <= top { C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) } else { C64::new(0.0, 0.0) })
                .collect()
        };
        let c = draw(6);
        let d = draw(7);
        let inner = |a: &[C64], b: &[C64]| -> C64 { a.iter().zip(b).map(|(x, y)| x * y.conj()).sum() };
        let lhs = inner(&raising_apply(Raising::A, j, &c, &basis).unwrap(), &d);
        let rhs = inner(&c, &lowering_apply(j, &d, &basis).unwrap());
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn closure_constants_do_not_depend_on_psi(
        psi2 in prop::collection::vec(-1.0f64..1.0, 11),
        seed in any::<u64>(),
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let basis = HermiteBasis::new(2, 10, 2).unwrap();
        let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..40)
            .map(|_| {
                let mut p = || vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
                (p(), p())
            })
            .collect();
        let psi1: Vec<f64> = (0..=10).map(|k| (-(k as f64) / 3.0).exp()).collect();
        for level in 0..=2 {
            for beta in MultiIndex::of_level(2, level) {
                let c = ClosureConstants::fit(&beta, &psi1, &samples, &basis).unwrap();
                prop_assert!(c.residual(&psi2, &samples, &basis).unwrap() <= 1e-8);
            }
        }
    }
}
