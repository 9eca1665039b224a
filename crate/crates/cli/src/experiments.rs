//! One function per command. Each returns the command's results, its
//! certificates and, for sweeps, a plot-ready table.

use paneitz_core::constructions::{
    bubble_sweep, connected_sum_quotient, cutoff_sweep, cylinder_positivity,
    disjoint_union_constant, extend_over_collar, extend_over_collar_numeric, length_sweep,
    slice_finder, sphere_constant_intrinsic, Certificate, ConnectedSumInput, ConnectedSumSide,
};
use paneitz_core::fields::TrigKind;
use paneitz_core::geometry::{curvature, gradient_tensor_eigenvalues};
use paneitz_core::paneitz::{functional, lower_bound_constants};
use paneitz_core::{Dimension, GridField, MetricModel, ScalarField, TrigField};
use serde_json::json;

use crate::config::{ExperimentConfig, ModelKind};
use crate::report::Table;
use crate::samples;
use crate::CliError;

pub const DEFAULT_EPSILONS: [f64; 5] = [0.4, 0.2, 0.1, 0.05, 0.025];
pub const DEFAULT_DELTAS: [f64; 3] = [0.2, 0.1, 0.05];
pub const DEFAULT_LENGTHS: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
pub const BUBBLE_TOLERANCE: f64 = 0.02;
pub const CUTOFF_MIN_ORDER: f64 = 0.7;
pub const CONNECTED_SUM_EPSILON: f64 = 1.0;
pub const CONNECTED_SUM_DELTA: f64 = 5e-4;
pub const CUTOFF_GRID_POINTS: usize = 12;

pub struct Outcome {
    pub summary: Vec<String>,
    pub results: serde_json::Value,
    pub certificates: Vec<Certificate>,
    pub table: Option<Table>,
}

/// Closed-form Q of the unit sphere, n(n−4)(n²−4)/16.
pub fn sphere_q(n: Dimension) -> f64 {
    let n = n.as_f64();
    n * (n - 4.0) * (n * n - 4.0) / 16.0
}

/// Q of the unit cylinder R × S^{n−1}, n²(n−4)²/16.
pub fn cylinder_q(n: Dimension) -> f64 {
    let n = n.as_f64();
    n * n * (n - 4.0) * (n - 4.0) / 16.0
}

pub fn curvature_report(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let kind = config.model_or(ModelKind::Sphere);
    let model = config.metric_model(kind)?;
    let n = config.dimension;
    let k = curvature(&model)?;
    let (tangent, normal) = gradient_tensor_eigenvalues(&model)?;
    let lb = lower_bound_constants(&model)?;
    let ex = n.exponents();
    let co = n.coefficients();
    let mut summary = vec![
        format!("model = {}", model.digest()),
        format!("R = {}", k.scalar),
    ];
    let (oracle, label) = match kind {
        ModelKind::Sphere => {
            summary.push(format!("Ric eigenvalue = {}", k.ricci_tangent));
            (sphere_q(n), "Q = n(n−4)(n²−4)/16")
        }
        ModelKind::Cylinder => {
            summary.push(format!(
                "Ric eigenvalues = {} (sphere directions), {} (axis)",
                k.ricci_tangent, k.ricci_normal
            ));
            (cylinder_q(n), "Q = n²(n−4)²/16")
        }
        ModelKind::Torus => {
            summary.push(format!("Ric eigenvalue = {}", k.ricci_tangent));
            (0.0, "Q = 0")
        }
    };
    summary.push(format!("|Ric|² = {}", k.ric_norm_sq));
    summary.push(format!("Q = {}", k.q));
    Ok(Outcome {
        summary,
        results: json!({
            "model": model,
            "curvature": k,
            "gradient_tensor": {"tangent": tangent, "normal": normal},
            "lower_bound": lb,
            "exponents": {
                "critical_exponent": ex.critical_exponent.to_string(),
                "metric_power": ex.metric_power.to_string(),
                "equation_power": ex.equation_power.to_string(),
                "quotient_power": ex.quotient_power.to_string(),
            },
            "coefficients": {
                "a_n": co.a_n.to_string(),
                "ricci_coeff": co.ricci_coeff.to_string(),
                "q_lap_coeff": co.q_lap_coeff.to_string(),
                "q_scal_coeff": co.q_scal_coeff.to_string(),
                "q_ric_coeff": co.q_ric_coeff.to_string(),
            },
        }),
        certificates: vec![Certificate::equal(
            "q_closed_form",
            label,
            k.q,
            oracle,
            1e-12,
        )],
        table: None,
    })
}

pub fn functional_report(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let kind = config.model_or(ModelKind::Torus);
    let model = config.metric_model(kind)?;
    let mut rng = samples::rng(config.seed, 0);
    let u: ScalarField = match kind {
        ModelKind::Torus => samples::smooth_grid(&mut rng, &config.torus_grid(8)?).into(),
        ModelKind::Cylinder => {
            let l = config.length_or(10.0);
            samples::smooth_profile(&mut rng, l, config.samples.unwrap_or(401), 0.1).into()
        }
        ModelKind::Sphere => {
            let spec = config.torus_grid(8)?;
            GridField::constant(&spec, 1.0).into()
        }
    };
    let r = functional(&model, &u)?;
    let lb = lower_bound_constants(&model)?;
    Ok(Outcome {
        summary: vec![
            format!("model = {}", model.digest()),
            format!("layout = {} ({})", u.layout_name(), r.grid),
            format!("numerator = {}", r.numerator),
            format!("mass = {}", r.mass),
            format!("quotient = {}", r.quotient),
            format!("lower bound = {}", lb.bound),
        ],
        results: json!({"model": model, "quotient": r, "lower_bound": lb}),
        certificates: vec![Certificate::at_most(
            "lower_bound",
            "−(C1²/2 + C2)·vol^{4/n} ≤ ℘(u)",
            lb.bound,
            r.quotient,
        )],
        table: None,
    })
}

pub fn bubble_report(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let host = config.metric_model(ModelKind::Torus)?;
    let mut eps = config.sweep_or(&DEFAULT_EPSILONS);
    eps.sort_by(|a, b| b.total_cmp(a));
    let tol = config.tolerance_or(BUBBLE_TOLERANCE);
    let n = config.dimension;
    let mut table = Table::new(&[
        "epsilon",
        "numerator",
        "mass",
        "quotient",
        "oracle",
        "rel_err",
    ]);
    let mut summary = vec![format!("host = {}", host.digest())];
    let mut certificates = Vec::new();
    let sweep = if eps.is_empty() {
        None
    } else {
        let s = bubble_sweep(&host, &eps, tol)?;
        for p in &s.points {
            table.push(vec![
                Some(p.epsilon),
                Some(p.report.numerator),
                Some(p.report.mass),
                Some(p.report.quotient),
                Some(p.oracle),
                Some(p.rel_err),
            ]);
            summary.push(format!(
                "epsilon = {}: quotient = {}, rel_err = {:.4e}",
                p.epsilon, p.report.quotient, p.rel_err
            ));
        }
        Some(s)
    };
    let q: Vec<f64> = sweep
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.report.quotient))
        .collect();
    let oracle = paneitz_core::constructions::euclidean_bubble_quotient(n);
    let final_err = sweep.as_ref().map_or(f64::NAN, |s| s.final_rel_err);
    certificates.push(Certificate::at_most(
        "oracle_distance",
        "|℘(u_ε_min) − oracle|/oracle ≤ tolerance",
        final_err.abs(),
        tol,
    ));
    if q.len() >= 3 {
        for w in q[q.len() - 3..].windows(2) {
            certificates.push(Certificate::at_most(
                "decreasing_tail",
                "℘ at the smaller ε ≤ ℘ at the larger ε, last two steps",
                w[1],
                w[0],
            ));
        }
    } else {
        certificates.push(Certificate::at_most(
            "decreasing_tail",
            "at least three sweep points",
            3.0,
            q.len() as f64,
        ));
    }
    certificates.push(Certificate::at_most(
        "torus_below_sphere",
        "λ(Tⁿ) ≤ ℘(u_ε_min) ≤ λ(Sⁿ)·(1 + tolerance)",
        q.last().copied().unwrap_or(f64::NAN),
        oracle * (1.0 + tol),
    ));
    summary.push(format!("oracle = {oracle}"));
    Ok(Outcome {
        summary,
        results: json!({
            "host": host,
            "sweep": sweep,
            "oracle": oracle,
            "sphere_constant_intrinsic": sphere_constant_intrinsic(n),
            "context": "λ(M) is the supremum of λ(M,[g]) over conformal classes; the sweep bounds one class only",
        }),
        certificates,
        table: Some(table),
    })
}

/// u = 1 + 0.2·cos x₁ on the torus; the cutoff is centered at (π, …, π).
pub fn cutoff_base_field(n: Dimension, side: f64) -> TrigField {
    let mut wave = vec![0; n.get()];
    wave[0] = 1;
    TrigField::constant(vec![side; n.get()], 1.0).with_term(0.2, wave, TrigKind::Cos)
}

pub fn cutoff_report(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = config.dimension;
    let side = config.side_length();
    let model = config.metric_model(ModelKind::Torus)?;
    let grid = config.torus_grid(CUTOFF_GRID_POINTS)?;
    let u = cutoff_base_field(n, side);
    let center = vec![side / 2.0; n.get()];
    let deltas = config.sweep_or(&DEFAULT_DELTAS);
    let min_order = config.tolerance_or(CUTOFF_MIN_ORDER);
    let s = cutoff_sweep(&model, &u, &grid, &center, &deltas)?;
    let mut table = Table::new(&["delta", "quotient", "delta_quotient", "fitted_order"]);
    let mut summary = vec![format!("base quotient = {}", s.base.quotient)];
    for p in &s.points {
        table.push(vec![
            Some(p.delta),
            Some(p.quotient),
            Some(p.delta_quotient),
            s.fitted_order,
        ]);
        summary.push(format!(
            "delta = {}: quotient = {}, change = {:.4e}",
            p.delta, p.quotient, p.delta_quotient
        ));
    }
    summary.push(format!("fitted order = {:?}", s.fitted_order));
    let mut certificates = vec![Certificate::at_most(
        "fitted_order",
        "minimum order ≤ fitted order of |℘(f_δ u) − ℘(u)|",
        min_order,
        s.fitted_order.unwrap_or(f64::NAN),
    )];
    for w in s.points.windows(2) {
        certificates.push(Certificate::at_most(
            "monotone",
            "|℘(f_δ u) − ℘(u)| shrinks with δ",
            w[1].delta_quotient.abs(),
            w[0].delta_quotient.abs(),
        ));
    }
    Ok(Outcome {
        summary,
        results: json!({"model": model, "u": u, "center": center, "sweep": s}),
        certificates,
        table: Some(table),
    })
}

/// Two flat tori carrying u = 1 + 0.2·cos x₁, cut at (π, …, π) and at the
/// origin respectively.
pub fn two_tori_input(
    n: Dimension,
    side: f64,
    points: usize,
    delta: f64,
    epsilon: f64,
) -> Result<ConnectedSumInput, CliError> {
    let side_for = |c: f64| -> Result<ConnectedSumSide, CliError> {
        Ok(ConnectedSumSide::CutTrig {
            model: MetricModel::cubic_torus(n, side)?,
            u: cutoff_base_field(n, side),
            grid: paneitz_core::GridSpec::cube(n, points, side)?,
            center: vec![c; n.get()],
            delta,
        })
    };
    Ok(ConnectedSumInput {
        left: side_for(side / 2.0)?,
        right: side_for(0.0)?,
        epsilon_budget: epsilon,
    })
}

pub fn connected_sum_report(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let input = two_tori_input(
        config.dimension,
        config.side_length(),
        config.points_or(CUTOFF_GRID_POINTS),
        config.delta.unwrap_or(CONNECTED_SUM_DELTA),
        config.epsilon_budget.unwrap_or(CONNECTED_SUM_EPSILON),
    )?;
    let r = connected_sum_quotient(&input)?;
    let union = disjoint_union_constant(r.left.quotient, r.right.quotient);
    Ok(Outcome {
        summary: vec![
            format!("left quotient = {}", r.left.quotient),
            format!("right quotient = {}", r.right.quotient),
            format!("min form = {}", r.min_form),
            format!("sum form = {}", r.sum_form),
            format!("epsilon = {}, epsilon1 = {}", r.epsilon, r.epsilon1),
        ],
        results: json!({"input": input, "report": r, "disjoint_union": union}),
        certificates: r.certificates.clone(),
        table: None,
    })
}

pub fn cylinder_report(config: &ExperimentConfig) -> Result<Outcome, CliError> {
    let n = config.dimension;
    let pos = cylinder_positivity(n);
    let mut certificates = vec![
        Certificate::at_most("q_positive", "0 < Q_cyl", 0.0, pos.q),
        Certificate::at_most(
            "spherical_eigenvalue_positive",
            "0 < a_n R − 4(n−2)/(n−2)",
            0.0,
            pos.spherical_eigenvalue,
        ),
        Certificate::at_most(
            "axial_eigenvalue_positive",
            "0 < a_n R",
            0.0,
            pos.axial_eigenvalue,
        ),
    ];
    for f in [0.5, 1.0, 2.0] {
        certificates.push(Certificate::equal(
            "collar_closed_form",
            "collar energy by quadrature = ω·f̃²·(a_n R + Q/3)",
            extend_over_collar_numeric(n, f, 101)?,
            extend_over_collar(n, f),
            1e-12,
        ));
    }
    let lengths = config.sweep_or(&DEFAULT_LENGTHS);
    let pts = length_sweep(n, &lengths, config.samples.unwrap_or(40))?;
    let mut table = Table::new(&[
        "l",
        "total",
        "mean",
        "slice_t",
        "slice_value",
        "collar_energy",
    ]);
    let mut summary = vec![
        format!("Q_cyl = {}", pos.q),
        format!(
            "gradient tensor eigenvalues = {} (sphere directions), {} (axis)",
            pos.spherical_eigenvalue, pos.axial_eigenvalue
        ),
    ];
    for p in &pts {
        table.push(vec![
            Some(p.l),
            Some(p.total),
            Some(p.mean),
            Some(p.slice_t),
            Some(p.slice_value),
            Some(p.collar_energy),
        ]);
        certificates.push(Certificate::at_most(
            "slice_below_mean",
            "min slice energy ≤ (∫ density)/l",
            p.slice_value,
            p.mean,
        ));
        summary.push(format!(
            "l = {}: slice = {:.4e}, mean = {:.4e}, collar = {:.4e}",
            p.l, p.slice_value, p.mean, p.collar_energy
        ));
    }
    let mut rng = samples::rng(config.seed, 9);
    let l = config.length_or(10.0);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let u = samples::smooth_profile(&mut rng, l, 201, 0.0);
        let total = paneitz_core::constructions::cylinder_energy_profile(n, l, &u)?.0;
        worst = worst.min(total);
    }
    certificates.push(Certificate::at_most(
        "energy_positive",
        "0 < min total energy over 20 random profiles",
        0.0,
        worst,
    ));
    let mut slice_failures = 0usize;
    for _ in 0..100 {
        let d = samples::rough_profile(&mut rng, l, 257, 0.0, 10.0);
        let s = slice_finder(&d)?;
        if s.value > s.mean {
            slice_failures += 1;
        }
    }
    certificates.push(Certificate::at_most(
        "random_slices_below_mean",
        "failures of min ≤ mean over 100 random densities ≤ 0",
        slice_failures as f64,
        0.0,
    ));
    Ok(Outcome {
        summary,
        results: json!({"positivity": pos, "length_sweep": pts, "random_slice_failures": slice_failures, "min_random_energy": worst}),
        certificates,
        table: Some(table),
    })
}
