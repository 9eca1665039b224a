//! The Paneitz–Branson operator P = Δ² − div(A∇) + Q with
//! A = a_n·R·g − (4/(n−2))·Ric, its quadratic form, and the Paneitz functional
//!
//! ```text
//! ℘(u) = ∫ u P u dv / (∫ u^{2n/(n−4)} dv)^{(n−4)/n}.
//! ```
//!
//! Supported pairings of model and field layout:
//!
//! | model        | field                                  |
//! |--------------|----------------------------------------|
//! | flat torus   | periodic grid on the same torus        |
//! | cylinder     | axial profile on the same `[0, l]`     |
//! | round sphere | constant field of any layout           |
//!
//! Conformally flat metrics are handled through [`covariance_check`] on the
//! flat background instead.

mod covariance;
mod descent;
mod lower_bound;

use serde::{Deserialize, Serialize};

pub use covariance::{covariance_check, covariance_refinement, CovarianceReport, RefinementReport};
pub use descent::{descend_quotient, DescentOptions, DescentReport};
pub use lower_bound::{
    lower_bound_constants, verify_lower_bound, LowerBoundConstants, LowerBoundReport,
};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::fields::{AxialField, GridField, ScalarField};
use crate::geometry::{curvature, gradient_tensor_eigenvalues, MetricModel};
use crate::quadrature::sphere_area;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientReport {
    /// ∫ u P u dv.
    pub numerator: f64,
    /// ∫ u^{2n/(n−4)} dv.
    pub mass: f64,
    pub quotient: f64,
    pub model: String,
    /// Resolution of the discretization.
    pub grid: String,
}

impl QuotientReport {
    pub fn from_parts(
        n: Dimension,
        numerator: f64,
        mass: f64,
        model: String,
        grid: String,
    ) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Degenerate(format!(
                "mass {mass} must be positive and finite"
            )));
        }
        let quotient = numerator / mass.powf(n.exponents().quotient());
        if !quotient.is_finite() {
            return Err(Error::Degenerate("quotient is not finite".into()));
        }
        Ok(QuotientReport {
            numerator,
            mass,
            quotient,
            model,
            grid,
        })
    }
}

pub(crate) fn resolution(u: &ScalarField) -> String {
    match u {
        ScalarField::PeriodicGrid(g) => {
            let s = g.spec();
            format!("{}^{}", s.points_per_axis(), s.dimension())
        }
        ScalarField::RadialProfile(r) => format!("radial:{}", r.values().len()),
        ScalarField::AxialProfile(a) => format!("axial:{}", a.values().len()),
    }
}

fn torus_grid<'a>(model: &MetricModel, u: &'a ScalarField) -> Result<&'a GridField> {
    let MetricModel::FlatTorus { n, side_lengths } = model else {
        unreachable!("caller matched the torus variant")
    };
    let g = u.as_grid().ok_or_else(|| {
        Error::UnsupportedLayout(format!(
            "flat torus needs a periodic grid field, got {}",
            u.layout_name()
        ))
    })?;
    if g.spec().dimension() != *n || g.spec().side_lengths() != side_lengths.as_slice() {
        return Err(Error::LayoutMismatch(
            "grid does not discretize this torus".into(),
        ));
    }
    Ok(g)
}

fn cylinder_profile<'a>(model: &MetricModel, u: &'a ScalarField) -> Result<&'a AxialField> {
    let MetricModel::Cylinder { length, .. } = model else {
        unreachable!("caller matched the cylinder variant")
    };
    let a = u.as_axial().ok_or_else(|| {
        Error::UnsupportedLayout(format!(
            "cylinder needs an axial t-profile, got {}",
            u.layout_name()
        ))
    })?;
    if (a.length() - length).abs() > 1e-12 * length {
        return Err(Error::LayoutMismatch(format!(
            "profile length {} differs from cylinder length {length}",
            a.length()
        )));
    }
    Ok(a)
}

fn sphere_constant(u: &ScalarField) -> Result<f64> {
    let (lo, hi) = (u.min_value(), u.max_value());
    if hi - lo > 1e-14 * hi.abs().max(lo.abs()) {
        return Err(Error::UnsupportedLayout(
            "round sphere accepts only constant fields; non-constant test functions go through bubbles".into(),
        ));
    }
    Ok(u.values()[0])
}

fn conformal_unsupported() -> Error {
    Error::UnsupportedModel(
        "conformally flat metric: use covariance_check on the flat background".into(),
    )
}

/// P[g]u.
pub fn apply_operator(model: &MetricModel, u: &ScalarField) -> Result<ScalarField> {
    match model {
        MetricModel::FlatTorus { .. } => Ok(torus_grid(model, u)?.bilaplacian().into()),
        MetricModel::Cylinder { .. } => {
            let a = cylinder_profile(model, u)?;
            let k = curvature(model)?;
            let (_, axial) = gradient_tensor_eigenvalues(model)?;
            let d2 = a.second_derivative();
            let d4 = d2.second_derivative();
            let tmp = d4.zip_with(&d2, |b, l| b - axial * l)?;
            Ok(tmp.zip_with(a, |t, v| t + k.q * v)?.into())
        }
        MetricModel::RoundSphere { .. } => {
            sphere_constant(u)?;
            let q = curvature(model)?.q;
            Ok(u.map(|v| q * v))
        }
        MetricModel::ConformalToFlat { .. } => Err(conformal_unsupported()),
    }
}

/// Energy density per unit t of an axisymmetric profile on the cylinder:
/// ω_{n−1}·[(u″)² + A_t (u′)² + Q u²], where A_t = a_n R is the axial
/// eigenvalue of the gradient tensor (the axial Ricci eigenvalue is 0).
pub fn cylinder_density(n: Dimension, u: &AxialField) -> Result<AxialField> {
    let model = MetricModel::cylinder(n, u.length())?;
    let q = curvature(&model)?.q;
    let (_, axial) = gradient_tensor_eigenvalues(&model)?;
    let omega = sphere_area(n.get() - 1);
    let d1 = u.derivative();
    let d2 = u.second_derivative();
    let grad = d2.zip_with(&d1, |s, f| s * s + axial * f * f)?;
    grad.zip_with(u, |g, v| omega * (g + q * v * v))
}

/// ∫ u P u dv, evaluated as the symmetric quadratic form
/// ∫ (Δu)² + A(∇u, ∇u) + Q u² dv.
pub fn energy(model: &MetricModel, u: &ScalarField) -> Result<f64> {
    match model {
        MetricModel::FlatTorus { .. } => {
            let g = torus_grid(model, u)?;
            let lap = g.laplacian();
            lap.dot(&lap)
        }
        MetricModel::Cylinder { n, .. } => {
            Ok(cylinder_density(*n, cylinder_profile(model, u)?)?.integrate())
        }
        MetricModel::RoundSphere { .. } => {
            let c = sphere_constant(u)?;
            Ok(curvature(model)?.q * c * c * model.volume())
        }
        MetricModel::ConformalToFlat { .. } => Err(conformal_unsupported()),
    }
}

/// ∫ u^{2n/(n−4)} dv for u ≥ 0.
pub fn mass(model: &MetricModel, u: &ScalarField) -> Result<f64> {
    if u.min_value() < 0.0 {
        return Err(Error::Domain(
            "the critical mass needs a nonnegative field".into(),
        ));
    }
    let n = model.dimension();
    let p = n.exponents().critical();
    match model {
        MetricModel::FlatTorus { .. } => {
            torus_grid(model, u)?;
            u.lp_mass(n.exponents().critical_exponent)
        }
        MetricModel::Cylinder { .. } => {
            let a = cylinder_profile(model, u)?;
            Ok(sphere_area(n.get() - 1) * a.map(|v| v.powf(p)).integrate())
        }
        MetricModel::RoundSphere { .. } => Ok(sphere_constant(u)?.powf(p) * model.volume()),
        MetricModel::ConformalToFlat { .. } => Err(conformal_unsupported()),
    }
}

/// ℘(u). Requires u ≥ 0 with positive mass.
pub fn functional(model: &MetricModel, u: &ScalarField) -> Result<QuotientReport> {
    let m = mass(model, u)?;
    if m <= 0.0 {
        return Err(Error::Degenerate("u vanishes identically".into()));
    }
    let e = energy(model, u)?;
    QuotientReport::from_parts(model.dimension(), e, m, model.digest(), resolution(u))
}
