//! Test functions on a connected sum M₁ # M₂ built from test functions on
//! the summands that vanish on the excised balls. Such functions never see
//! the neck, so energies and masses of the two sides simply add and the glued
//! manifold is never meshed.
//!
//! With unit masses on each side the combined quotient is
//! (E₁ + E₂)/2^{(n−4)/n}. The ε budget splits as ε₁ = ε·2^{(n−4)/n}/2, so
//! that (λ₁ + λ₂ + 2ε₁)·2^{−(n−4)/n} = (λ₁ + λ₂)·2^{−(n−4)/n} + ε.

use serde::{Deserialize, Serialize};

use crate::constructions::cutoff::{cut_quotient, cutoff_jet, trig_base_quotient};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField, TrigField};
use crate::geometry::MetricModel;
use crate::paneitz::{energy, mass};
use crate::quadrature::SphereRule;

/// Relative size below which a sample counts as vanishing on the ball.
pub const VANISHING_TOLERANCE: f64 = 1e-14;

/// A test function on one summand, vanishing on its excision ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConnectedSumSide {
    /// Any discretized field; vanishing on the ball is checked on samples.
    Sampled {
        model: MetricModel,
        u: ScalarField,
        ball_center: Vec<f64>,
        ball_radius: f64,
        /// ℘ of the uncut test function this side was built from, standing
        /// in for λ(M_i) + slack in the assembled inequality.
        #[serde(default)]
        reference_quotient: Option<f64>,
    },
    /// f_δ·u on a flat torus with u a positive trigonometric polynomial,
    /// evaluated without resolving the ball; the reference is ℘(u).
    CutTrig {
        model: MetricModel,
        u: TrigField,
        grid: GridSpec,
        center: Vec<f64>,
        delta: f64,
    },
}

impl ConnectedSumSide {
    pub fn model(&self) -> &MetricModel {
        match self {
            ConnectedSumSide::Sampled { model, .. } | ConnectedSumSide::CutTrig { model, .. } => {
                model
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectedSumInput {
    pub left: ConnectedSumSide,
    pub right: ConnectedSumSide,
    pub epsilon_budget: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideSummary {
    pub energy: f64,
    pub mass: f64,
    pub quotient: f64,
    /// max over the ball / sup of |u|.
    pub ball_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub name: String,
    /// The inequality checked, lhs ≤ rhs.
    pub inequality: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub passed: bool,
}

impl Certificate {
    pub fn at_most(name: &str, inequality: &str, lhs: f64, rhs: f64) -> Self {
        Certificate {
            name: name.into(),
            inequality: inequality.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            passed: lhs <= rhs,
        }
    }

    /// |lhs − rhs| ≤ tol·max(|lhs|, |rhs|, 1).
    pub fn equal(name: &str, inequality: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = (lhs - rhs).abs();
        Certificate {
            name: name.into(),
            inequality: inequality.into(),
            lhs,
            rhs,
            margin: tol * lhs.abs().max(rhs.abs()).max(1.0) - gap,
            passed: gap <= tol * lhs.abs().max(rhs.abs()).max(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectedSumReport {
    pub n: Dimension,
    pub left: SideSummary,
    pub right: SideSummary,
    /// min(℘₁, ℘₂): the better side alone as a test function.
    pub min_form: f64,
    /// (E₁ + E₂)/2^{(n−4)/n} after normalizing both masses to 1.
    pub sum_form: f64,
    pub epsilon: f64,
    pub epsilon1: f64,
    pub certificates: Vec<Certificate>,
    pub passed: bool,
}

/// 2^{−(n−4)/n}.
fn split_factor(n: Dimension) -> f64 {
    2f64.powf(-n.exponents().quotient())
}

/// ε₁ = ε·2^{(n−4)/n}/2.
pub fn epsilon_split(n: Dimension, epsilon: f64) -> f64 {
    0.5 * epsilon / split_factor(n)
}

/// Combined quotient of two unit-mass test functions with energies e1, e2.
pub fn combine_sum_form(n: Dimension, e1: f64, e2: f64) -> f64 {
    (e1 + e2) * split_factor(n)
}

fn ball_residual(u: &ScalarField, center: &[f64], radius: f64) -> Result<f64> {
    let sup = u.max_abs();
    let r2 = radius * radius;
    let inside = match u {
        ScalarField::PeriodicGrid(g) => {
            let spec = g.spec();
            if center.len() != spec.dimension().get() {
                return Err(Error::LayoutMismatch(
                    "ball center has the wrong dimension".into(),
                ));
            }
            (0..spec.len())
                .filter(|&i| spec.periodic_distance_sq(i, center) <= r2)
                .fold(0.0f64, |m, i| m.max(g.values()[i].abs()))
        }
        ScalarField::AxialProfile(a) => {
            let c = *center.first().unwrap_or(&0.0);
            (0..a.values().len())
                .filter(|&i| (a.position(i) - c).abs() <= radius)
                .fold(0.0f64, |m, i| m.max(a.values()[i].abs()))
        }
        ScalarField::RadialProfile(r) => (0..r.values().len())
            .filter(|&i| r.radius(i) <= radius)
            .fold(0.0f64, |m, i| m.max(r.values()[i].abs())),
    };
    Ok(if sup > 0.0 { inside / sup } else { 0.0 })
}

/// max |f_δ u| on shells inside B_δ relative to sup u.
fn cut_trig_ball_residual(u: &TrigField, center: &[f64], delta: f64) -> f64 {
    let sphere = SphereRule::new(center.len(), 4);
    let mut worst = 0.0f64;
    for frac in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let r = frac * delta;
        let f = cutoff_jet(delta, r).0;
        for d in &sphere.directions {
            let x: Vec<f64> = center.iter().zip(d).map(|(c, di)| c + r * di).collect();
            worst = worst.max((f * u.value(&x)).abs());
        }
    }
    let sup = u.offset.abs() + u.terms.iter().map(|t| t.amplitude.abs()).sum::<f64>();
    if sup > 0.0 {
        worst / sup
    } else {
        0.0
    }
}

fn summarize(side: &ConnectedSumSide, label: &str) -> Result<(SideSummary, Option<f64>)> {
    let model = side.model();
    let q_power = model.dimension().exponents().quotient();
    let (e, m, ball, reference) = match side {
        ConnectedSumSide::Sampled {
            u,
            ball_center,
            ball_radius,
            reference_quotient,
            ..
        } => {
            let ball = ball_residual(u, ball_center, *ball_radius)?;
            if ball > VANISHING_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "{label} test function does not vanish on its excision ball (relative max {ball:e})"
                )));
            }
            let m = mass(model, u)?;
            if m <= 0.0 {
                return Err(Error::Precondition(format!(
                    "{label} test function vanishes identically"
                )));
            }
            (energy(model, u)?, m, ball, *reference_quotient)
        }
        ConnectedSumSide::CutTrig {
            u,
            grid,
            center,
            delta,
            ..
        } => {
            let base = trig_base_quotient(model, u, grid)?;
            let cut = cut_quotient(model, u, &base, center, *delta)?;
            let ball = cut_trig_ball_residual(u, center, *delta);
            if ball > VANISHING_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "{label} cut function does not vanish on its ball"
                )));
            }
            (cut.numerator, cut.mass, ball, Some(base.quotient))
        }
    };
    let q = e / m.powf(q_power);
    Ok((
        SideSummary {
            energy: e,
            mass: m,
            quotient: q,
            ball_residual: ball,
        },
        reference,
    ))
}

pub fn connected_sum_quotient(input: &ConnectedSumInput) -> Result<ConnectedSumReport> {
    let n = input.left.model().dimension();
    if input.right.model().dimension() != n {
        return Err(Error::LayoutMismatch(
            "summands of different dimensions".into(),
        ));
    }
    if !(input.epsilon_budget >= 0.0 && input.epsilon_budget.is_finite()) {
        return Err(Error::Range("epsilon budget must be nonnegative".into()));
    }
    let (left, left_ref) = summarize(&input.left, "left")?;
    let (right, right_ref) = summarize(&input.right, "right")?;
    let eps = input.epsilon_budget;
    let eps1 = epsilon_split(n, eps);
    let f = split_factor(n);

    // Unit-mass energies are the side quotients.
    let min_form = left.quotient.min(right.quotient);
    let sum_form = combine_sum_form(n, left.quotient, right.quotient);

    let mut certificates = vec![
        Certificate::at_most(
            "min_form",
            "min-form quotient ≤ min(℘₁, ℘₂)",
            min_form,
            left.quotient.min(right.quotient),
        ),
        Certificate::equal(
            "sum_form_identity",
            "sum-form = (E₁ + E₂)·2^{−(n−4)/n} with unit masses",
            sum_form,
            (left.energy / left.mass.powf(2.0 / n.exponents().critical())
                + right.energy / right.mass.powf(2.0 / n.exponents().critical()))
                * f,
            1e-12,
        ),
        Certificate::equal(
            "epsilon_split",
            "(a + b + 2ε₁)·2^{−(n−4)/n} = (a + b)·2^{−(n−4)/n} + ε",
            (left.quotient + right.quotient + 2.0 * eps1) * f,
            (left.quotient + right.quotient) * f + eps,
            1e-12,
        ),
    ];
    if let (Some(r1), Some(r2)) = (left_ref, right_ref) {
        certificates.push(Certificate::at_most(
            "left_cutoff",
            "℘(u_δ₁) ≤ ℘(u₁) + ε₁",
            left.quotient,
            r1 + eps1,
        ));
        certificates.push(Certificate::at_most(
            "right_cutoff",
            "℘(u_δ₂) ≤ ℘(u₂) + ε₁",
            right.quotient,
            r2 + eps1,
        ));
        certificates.push(Certificate::at_most(
            "assembled",
            "sum-form ≤ (℘(u₁) + ℘(u₂))·2^{−(n−4)/n} + ε",
            sum_form,
            (r1 + r2) * f + eps,
        ));
    }
    let passed = certificates.iter().all(|c| c.passed);
    Ok(ConnectedSumReport {
        n,
        left,
        right,
        min_form,
        sum_form,
        epsilon: eps,
        epsilon1: eps1,
        certificates,
        passed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisjointUnion {
    pub value: f64,
    /// Both constants are nonnegative, the regime in which min is the answer.
    pub hypothesis_holds: bool,
}

pub fn disjoint_union_constant(lambda1: f64, lambda2: f64) -> DisjointUnion {
    DisjointUnion {
        value: lambda1.min(lambda2),
        hypothesis_holds: lambda1 >= 0.0 && lambda2 >= 0.0,
    }
}
