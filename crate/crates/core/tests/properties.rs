use std::f64::consts::PI;

use paneitz_core::constructions::{cutoff_jet, radial_cutoff_constants, slice_finder};
use paneitz_core::fields::MIN_AXIAL_SAMPLES;
use paneitz_core::geometry::{q_curvature, q_of_conformal};
use paneitz_core::paneitz::{apply_operator, energy, functional};
use paneitz_core::{AxialField, Dimension, GridField, GridSpec, MetricModel, ScalarField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dim(n: i64) -> Dimension {
    Dimension::new(n).unwrap()
}

/// Seeded random field on the 8^5 grid of the flat 5-torus, uniform in [lo, hi).
fn torus_grid(seed: u64, lo: f64, hi: f64) -> (MetricModel, GridField) {
    let n = dim(5);
    let spec = GridSpec::cube(n, 8, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..spec.len()).map(|_| rng.gen_range(lo..hi)).collect();
    (
        MetricModel::cubic_torus(n, 2.0 * PI).unwrap(),
        GridField::new(spec, values).unwrap(),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn laplacian_is_symmetric(a in any::<u64>(), b in any::<u64>()) {
        let (_, f) = torus_grid(a, -1.0, 1.0);
        let (_, g) = torus_grid(b, -1.0, 1.0);
        let lhs = f.dot(&g.laplacian()).unwrap();
        let rhs = f.laplacian().dot(&g).unwrap();
        let scale = f.dot(&f).unwrap().sqrt() * g.laplacian().dot(&g.laplacian()).unwrap().sqrt();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
    }

    #[test]
    fn bilaplacian_form_matches_operator(seed in any::<u64>()) {
        let (model, f) = torus_grid(seed, 0.0, 2.0);
        let u: ScalarField = f.clone().into();
        let pu = apply_operator(&model, &u).unwrap();
        let cell = f.spec().cell_volume();
        let via_operator: f64 = f.values().iter().zip(pu.values()).map(|(a, b)| a * b).sum::<f64>() * cell;
        prop_assert!(rel(via_operator, energy(&model, &u).unwrap()) <= 1e-12);
    }

    #[test]
    fn quotient_is_scale_invariant(seed in any::<u64>(), c in 0.01f64..100.0) {
        let (model, f) = torus_grid(seed, 0.1, 2.0);
        let a = functional(&model, &f.clone().into()).unwrap().quotient;
        let b = functional(&model, &f.map(move |v| c * v).into()).unwrap().quotient;
        prop_assert!(rel(a, b) <= 1e-12);
    }

    #[test]
    fn cylinder_quotient_is_scale_invariant(values in prop::collection::vec(0.1f64..2.0, 16..80), c in 0.01f64..100.0) {
        let model = MetricModel::cylinder(dim(5), 3.0).unwrap();
        let u = AxialField::new(3.0, values).unwrap();
        let a = functional(&model, &u.clone().into()).unwrap().quotient;
        let b = functional(&model, &u.map(|v| c * v).into()).unwrap().quotient;
        prop_assert!(rel(a, b) <= 1e-12);
    }

    #[test]
    fn slice_never_exceeds_mean(values in prop::collection::vec(0.0f64..5.0, MIN_AXIAL_SAMPLES..300)) {
        let d = AxialField::new(7.0, values).unwrap();
        let s = slice_finder(&d).unwrap();
        prop_assert!(s.value <= s.mean * (1.0 + 1e-12));
    }

    #[test]
    fn cutoff_jet_stays_in_range(delta in 1e-3f64..0.3, t in 0.0f64..3.0) {
        let (f, d1, _) = cutoff_jet(delta, t * delta);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!(d1 >= -1e-12);
        if t <= 1.0 { prop_assert_eq!(f, 0.0); }
        if t >= 2.0 { prop_assert_eq!(f, 1.0); }
    }

    #[test]
    fn q_curvature_is_linear_in_lap_and_ric(n in 5i64..65, r in -10.0f64..10.0, ric in 0.0f64..50.0, lap in -5.0f64..5.0) {
        let n = dim(n);
        let base = q_curvature(r, 0.0, 0.0, n);
        let total = q_curvature(r, ric, lap, n);
        let parts = q_curvature(0.0, ric, 0.0, n) + q_curvature(0.0, 0.0, lap, n);
        prop_assert!((total - base - parts).abs() <= 1e-12 * (1.0 + total.abs() + base.abs()));
    }
}

#[test]
fn cutoff_constants_are_scale_free() {
    let (g1, l1) = radial_cutoff_constants(dim(5), 0.2).unwrap();
    let (g2, l2) = radial_cutoff_constants(dim(5), 0.02).unwrap();
    assert!(rel(g1, g2) < 1e-10 && rel(l1, l2) < 1e-10);
    assert!(g1 > 1.0 && l1 > g1);
}

#[test]
fn constant_conformal_factor_has_zero_q() {
    let spec = GridSpec::cube(dim(5), 8, 2.0 * PI).unwrap();
    let u: ScalarField = GridField::constant(&spec, 1.7).into();
    let q = q_of_conformal(&u, dim(5)).unwrap();
    assert!(q.max_abs() == 0.0);
}

#[test]
fn bilaplacian_converges_on_a_smooth_field() {
    let err = |k: usize| {
        let spec = GridSpec::cube(dim(5), k, 2.0 * PI).unwrap();
        let f = GridField::from_fn(&spec, |x| x[0].sin() + (x[1] + x[2]).cos());
        let b = f.bilaplacian();
        let exact = GridField::from_fn(&spec, |x| x[0].sin() + 4.0 * (x[1] + x[2]).cos());
        b.zip_with(&exact, |a, e| a - e).unwrap().max_abs()
    };
    let (e1, e2) = (err(8), err(16));
    let order = (e1 / e2).log2();
    assert!(order > 1.8, "{e1} {e2} {order}");
}
