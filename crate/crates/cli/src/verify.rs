//! The acceptance suite behind `paneitz verify`: nine criteria, each a list
//! of certificates. Determinism (the tenth) compares the hashes of two runs
//! and lives with the caller.

use std::f64::consts::PI;
use std::time::Instant;

use num_rational::Ratio;
use paneitz_core::constructions::{
    bubble_sweep, connected_sum_quotient, cutoff_sweep, cylinder_energy_profile,
    cylinder_positivity, euclidean_bubble_quotient, extend_over_collar, extend_over_collar_numeric,
    slice_finder, sphere_constant_intrinsic, Certificate,
};
use paneitz_core::fields::TrigKind;
use paneitz_core::geometry::q_curvature;
use paneitz_core::paneitz::{covariance_check, covariance_refinement, verify_lower_bound};
use paneitz_core::{Dimension, GridField, GridSpec, MetricModel, ScalarField, TrigField};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::experiments::{
    cutoff_base_field, two_tori_input, BUBBLE_TOLERANCE, CONNECTED_SUM_DELTA,
    CONNECTED_SUM_EPSILON, CUTOFF_GRID_POINTS, CUTOFF_MIN_ORDER, DEFAULT_DELTAS, DEFAULT_EPSILONS,
};
use crate::samples;
use crate::CliError;

pub const COVARIANCE_POINTS: [usize; 3] = [16, 20, 24];
pub const COVARIANCE_BUDGET: usize = 8_000_000;
pub const SELF_ADJOINT_POINTS: [usize; 2] = [8, 12];
pub const RANDOM_FIELDS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub certificates: Vec<Certificate>,
    pub details: serde_json::Value,
    pub passed: bool,
}

impl CriterionResult {
    fn new(
        id: u32,
        title: &str,
        certificates: Vec<Certificate>,
        details: serde_json::Value,
    ) -> Self {
        let passed = !certificates.is_empty() && certificates.iter().all(|c| c.passed);
        CriterionResult {
            id,
            title: title.into(),
            certificates,
            details,
            passed,
        }
    }
}

fn dim(n: i64) -> Dimension {
    Dimension::new(n).expect("suite dimensions are at least 5")
}

fn rel_gap(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Exact rational identities and coefficient signs for 5 ≤ n ≤ 64.
pub fn coefficient_identities() -> CriterionResult {
    let mut failures = Vec::new();
    let one = Ratio::from_integer(1);
    let two = Ratio::from_integer(2);
    let zero = Ratio::from_integer(0);
    for n in 5..=64i64 {
        let d = dim(n);
        let e = d.exponents();
        let c = d.coefficients();
        if e.equation_power + one != e.critical_exponent {
            failures.push(format!("n={n}: (n+4)/(n−4) + 1 ≠ 2n/(n−4)"));
        }
        if e.critical_exponent * e.quotient_power != two {
            failures.push(format!("n={n}: 2n/(n−4)·(n−4)/n ≠ 2"));
        }
        if e.metric_power != e.critical_exponent - Ratio::new(2 * (n - 2), n - 4) {
            failures.push(format!("n={n}: 4/(n−4) ≠ 2n/(n−4) − 2(n−2)/(n−4)"));
        }
        for (name, v) in [
            ("a_n", c.a_n),
            ("ricci_coeff", c.ricci_coeff),
            ("q_lap_coeff", c.q_lap_coeff),
            ("q_scal_coeff", c.q_scal_coeff),
            ("q_ric_coeff", c.q_ric_coeff),
        ] {
            if v <= zero {
                failures.push(format!("n={n}: {name} = {v} is not positive"));
            }
        }
        if q_curvature(0.0, 0.0, 0.0, d) != 0.0 {
            failures.push(format!("n={n}: q_curvature(0, 0, 0) ≠ 0"));
        }
    }
    CriterionResult::new(
        1,
        "coefficient and identity suite",
        vec![Certificate::at_most(
            "exact_identities",
            "identity failures over 5 ≤ n ≤ 64 ≤ 0",
            failures.len() as f64,
            0.0,
        )],
        json!({"dimensions": [5, 64], "failures": failures}),
    )
}

/// Σ f·Δg = Σ Δf·g and Σ f·Δ²f = Σ(Δf)² on seeded random grid fields.
pub fn self_adjointness(seed: u64) -> Result<CriterionResult, CliError> {
    let n = dim(5);
    let mut worst_sym = 0.0f64;
    let mut worst_form = 0.0f64;
    let mut cases = 0;
    for (i, &k) in SELF_ADJOINT_POINTS.iter().enumerate() {
        let spec = GridSpec::cube(n, k, 2.0 * PI)?;
        let mut rng = samples::rng(seed, 20 + i as u64);
        for _ in 0..3 {
            let f = samples::rough_grid(&mut rng, &spec, -1.0, 1.0);
            let g = samples::rough_grid(&mut rng, &spec, -1.0, 1.0);
            let (lf, lg) = (f.laplacian(), g.laplacian());
            let scale = f.dot(&f)?.sqrt() * lg.dot(&lg)?.sqrt();
            worst_sym = worst_sym.max(rel_gap(f.dot(&lg)?, lf.dot(&g)?, scale));
            let form = lf.dot(&lf)?;
            worst_form = worst_form.max(rel_gap(f.dot(&f.bilaplacian())?, form, form));
            cases += 1;
        }
    }
    Ok(CriterionResult::new(
        2,
        "discrete self-adjointness",
        vec![
            Certificate::at_most(
                "laplacian_symmetry",
                "|Σ f·Δg − Σ Δf·g| / (‖f‖‖Δg‖) ≤ 1e-12",
                worst_sym,
                1e-12,
            ),
            Certificate::at_most(
                "bilaplacian_form",
                "|Σ f·Δ²f − Σ(Δf)²| / Σ(Δf)² ≤ 1e-12",
                worst_form,
                1e-12,
            ),
        ],
        json!({"points_per_axis": SELF_ADJOINT_POINTS, "cases": cases}),
    ))
}

/// Constant factors agree to roundoff; a smooth factor converges at order ≥ 1.8.
pub fn conformal_covariance(seed: u64) -> Result<CriterionResult, CliError> {
    let n = dim(5);
    let spec = GridSpec::cube(n, 8, 2.0 * PI)?;
    let mut rng = samples::rng(seed, 30);
    let u = samples::smooth_grid(&mut rng, &spec);
    let mut worst = 0.0f64;
    for c in [0.5, 2.0, 7.0] {
        let r = covariance_check(&GridField::constant(&spec, c), &u, 1e-12)?;
        worst = worst.max(r.relative);
    }
    let sides = vec![2.0 * PI; 5];
    let w =
        TrigField::constant(sides.clone(), 1.0).with_term(0.05, vec![0, 1, 0, 0, 0], TrigKind::Cos);
    let v = TrigField::constant(sides, 1.0)
        .with_term(0.05, vec![1, 0, 0, 0, 0], TrigKind::Sin)
        .with_term(0.05, vec![0, 1, 0, 0, 0], TrigKind::Sin);
    let refinement = covariance_refinement(n, &w, &v, &COVARIANCE_POINTS, COVARIANCE_BUDGET)?;
    let mut certificates = vec![
        Certificate::at_most(
            "constant_factor",
            "relative residual for w ∈ {0.5, 2, 7} ≤ 1e-12",
            worst,
            1e-12,
        ),
        Certificate::at_most(
            "smooth_factor_order",
            "1.8 ≤ fitted order of the residual",
            1.8,
            refinement.fitted_order.unwrap_or(f64::NAN),
        ),
    ];
    for p in refinement.residual.windows(2) {
        certificates.push(Certificate::at_most(
            "smooth_factor_decreasing",
            "residual shrinks under refinement",
            p[1],
            p[0],
        ));
    }
    Ok(CriterionResult::new(
        3,
        "conformal covariance",
        certificates,
        json!({"refinement": refinement}),
    ))
}

/// Euclidean bubble quotient against the intrinsic sphere constant.
pub fn sphere_oracles() -> CriterionResult {
    let mut certificates = Vec::new();
    let mut values = Vec::new();
    for n in [5, 6, 7] {
        let d = dim(n);
        let (a, b) = (euclidean_bubble_quotient(d), sphere_constant_intrinsic(d));
        values.push(json!({"n": n, "euclidean_bubble": a, "intrinsic": b}));
        certificates.push(Certificate::at_most(
            &format!("oracles_agree_n{n}"),
            "|bubble − intrinsic| / intrinsic ≤ 0.5%",
            rel_gap(a, b, b.abs()),
            0.005,
        ));
    }
    CriterionResult::new(
        4,
        "sphere-constant oracles",
        certificates,
        json!({"values": values}),
    )
}

pub fn bubble_upper_bound() -> Result<CriterionResult, CliError> {
    let n = dim(5);
    let host = MetricModel::cubic_torus(n, 2.0 * PI)?;
    let s = bubble_sweep(&host, &DEFAULT_EPSILONS, BUBBLE_TOLERANCE)?;
    let q: Vec<f64> = s.points.iter().map(|p| p.report.quotient).collect();
    let mut certificates = vec![
        Certificate::at_most(
            "oracle_distance",
            "|℘(u_ε_min) − oracle|/oracle ≤ 2%",
            s.final_rel_err.abs(),
            BUBBLE_TOLERANCE,
        ),
        Certificate::at_most(
            "torus_below_sphere",
            "℘(u_ε_min) ≤ λ(S⁵)·1.02",
            *q.last().expect("default sweep is nonempty"),
            s.oracle * (1.0 + BUBBLE_TOLERANCE),
        ),
    ];
    for w in q[q.len() - 3..].windows(2) {
        certificates.push(Certificate::at_most(
            "decreasing_tail",
            "quotient decreases over the last two steps",
            w[1],
            w[0],
        ));
    }
    Ok(CriterionResult::new(
        5,
        "bubble upper bound",
        certificates,
        json!({"sweep": s}),
    ))
}

pub fn lower_bound(seed: u64) -> Result<CriterionResult, CliError> {
    let n = dim(5);
    let torus = MetricModel::cubic_torus(n, 2.0 * PI)?;
    let spec = GridSpec::cube(n, 8, 2.0 * PI)?;
    let mut rng = samples::rng(seed, 60);
    let torus_samples: Vec<ScalarField> = (0..RANDOM_FIELDS)
        .map(|i| {
            if i % 2 == 0 {
                samples::smooth_grid(&mut rng, &spec).into()
            } else {
                samples::rough_grid(&mut rng, &spec, 0.0, 1.0).into()
            }
        })
        .collect();
    let l = 10.0;
    let cylinder = MetricModel::cylinder(n, l)?;
    let cylinder_samples: Vec<ScalarField> = (0..RANDOM_FIELDS)
        .map(|i| {
            if i % 2 == 0 {
                samples::smooth_profile(&mut rng, l, 401, 0.0).into()
            } else {
                samples::rough_profile(&mut rng, l, 401, 0.0, 1.0).into()
            }
        })
        .collect();
    let t = verify_lower_bound(&torus, &torus_samples)?;
    let c = verify_lower_bound(&cylinder, &cylinder_samples)?;
    Ok(CriterionResult::new(
        6,
        "lower bound",
        vec![
            Certificate::at_most(
                "torus_failures",
                "failures over 20 torus fields ≤ 0",
                t.failures as f64,
                0.0,
            ),
            Certificate::at_most(
                "cylinder_failures",
                "failures over 20 cylinder profiles ≤ 0",
                c.failures as f64,
                0.0,
            ),
        ],
        json!({"torus": t, "cylinder": c}),
    ))
}

pub fn cutoff_convergence() -> Result<CriterionResult, CliError> {
    let n = dim(5);
    let model = MetricModel::cubic_torus(n, 2.0 * PI)?;
    let grid = GridSpec::cube(n, CUTOFF_GRID_POINTS, 2.0 * PI)?;
    let u = cutoff_base_field(n, 2.0 * PI);
    let s = cutoff_sweep(&model, &u, &grid, &[PI; 5], &DEFAULT_DELTAS)?;
    let mut certificates = vec![Certificate::at_most(
        "fitted_order",
        "0.7 ≤ fitted order of |℘(f_δ u) − ℘(u)|",
        CUTOFF_MIN_ORDER,
        s.fitted_order.unwrap_or(f64::NAN),
    )];
    for w in s.points.windows(2) {
        certificates.push(Certificate::at_most(
            "decreasing",
            "|℘(f_δ u) − ℘(u)| shrinks with δ",
            w[1].delta_quotient.abs(),
            w[0].delta_quotient.abs(),
        ));
    }
    Ok(CriterionResult::new(
        7,
        "cutoff convergence",
        certificates,
        json!({"sweep": s}),
    ))
}

pub fn connected_sum() -> Result<CriterionResult, CliError> {
    let input = two_tori_input(
        dim(5),
        2.0 * PI,
        CUTOFF_GRID_POINTS,
        CONNECTED_SUM_DELTA,
        CONNECTED_SUM_EPSILON,
    )?;
    let r = connected_sum_quotient(&input)?;
    Ok(CriterionResult::new(
        8,
        "connected-sum certificates",
        r.certificates.clone(),
        json!({"report": r}),
    ))
}

pub fn cylinder_suite(seed: u64) -> Result<CriterionResult, CliError> {
    let mut certificates = Vec::new();
    for n in 5..=10 {
        let p = cylinder_positivity(dim(n));
        certificates.push(Certificate::at_most(
            &format!("positivity_n{n}"),
            "0 < min(Q_cyl, spherical eigenvalue, axial eigenvalue)",
            0.0,
            p.q.min(p.spherical_eigenvalue).min(p.axial_eigenvalue),
        ));
    }
    let mut rng = samples::rng(seed, 90);
    let mut slice_failures = 0usize;
    for _ in 0..100 {
        let d = samples::rough_profile(&mut rng, 10.0, 257, 0.0, 10.0);
        let s = slice_finder(&d)?;
        if s.value > s.mean {
            slice_failures += 1;
        }
    }
    certificates.push(Certificate::at_most(
        "slice_below_mean",
        "failures of min ≤ mean over 100 random densities ≤ 0",
        slice_failures as f64,
        0.0,
    ));
    let mut worst_collar = 0.0f64;
    for n in 5..=10 {
        for f in [0.5, 1.0, 2.0] {
            let (a, b) = (
                extend_over_collar_numeric(dim(n), f, 101)?,
                extend_over_collar(dim(n), f),
            );
            worst_collar = worst_collar.max(rel_gap(a, b, b.abs()));
        }
    }
    certificates.push(Certificate::at_most(
        "collar_closed_form",
        "|quadrature − closed form| / closed form ≤ 1e-12",
        worst_collar,
        1e-12,
    ));
    let mut min_total = f64::INFINITY;
    for i in 0..RANDOM_FIELDS {
        let u = if i % 2 == 0 {
            samples::smooth_profile(&mut rng, 10.0, 201, 0.0)
        } else {
            samples::rough_profile(&mut rng, 10.0, 201, -1.0, 1.0)
        };
        min_total = min_total.min(cylinder_energy_profile(dim(5), 10.0, &u)?.0);
    }
    certificates.push(Certificate::at_most(
        "energy_positive",
        "0 < min total energy over 20 random nonzero profiles",
        0.0,
        min_total,
    ));
    Ok(CriterionResult::new(
        9,
        "cylinder suite",
        certificates,
        json!({"random_slice_failures": slice_failures, "min_total_energy": min_total}),
    ))
}

/// Wall time in seconds per named section.
pub type SectionTimes = Vec<(String, f64)>;

/// Runs criteria 1 to 9 in order, recording wall time per criterion.
pub fn run_suite(seed: u64) -> Result<(Vec<CriterionResult>, SectionTimes), CliError> {
    type Step = Box<dyn Fn(u64) -> Result<CriterionResult, CliError>>;
    let steps: Vec<Step> = vec![
        Box::new(|_| Ok(coefficient_identities())),
        Box::new(self_adjointness),
        Box::new(conformal_covariance),
        Box::new(|_| Ok(sphere_oracles())),
        Box::new(|_| bubble_upper_bound()),
        Box::new(lower_bound),
        Box::new(|_| cutoff_convergence()),
        Box::new(|_| connected_sum()),
        Box::new(cylinder_suite),
    ];
    let mut results = Vec::new();
    let mut timing = Vec::new();
    for step in steps {
        let start = Instant::now();
        let r = step(seed)?;
        timing.push((format!("criterion_{}", r.id), start.elapsed().as_secs_f64()));
        results.push(r);
    }
    Ok((results, timing))
}
