//! A priori lower bound on the Paneitz functional.
//!
//! With |A(ξ, ξ)| ≤ C1|ξ|² and |Q| ≤ C2, absorbing the gradient term into
//! ½∫(Δu)² and applying Hölder against unit mass gives
//! ℘(u) ≥ −(C1²/2 + C2)·vol^{4/n}.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fields::ScalarField;
use crate::geometry::{curvature, gradient_tensor_eigenvalues, MetricModel};
use crate::paneitz::{functional, mass};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundConstants {
    /// Operator norm of a_n·R·g − (4/(n−2))·Ric.
    #[serde(rename = "C1")]
    pub c1: f64,
    /// sup |Q|.
    #[serde(rename = "C2")]
    pub c2: f64,
    pub volume: f64,
    /// −(C1²/2 + C2)·vol^{4/n} ≤ 0.
    pub bound: f64,
}

pub fn lower_bound_constants(model: &MetricModel) -> Result<LowerBoundConstants> {
    let n = model.dimension();
    let (c1, c2) = match model {
        MetricModel::FlatTorus { .. } => (0.0, 0.0),
        _ => {
            let (tangent, normal) = gradient_tensor_eigenvalues(model)?;
            (tangent.abs().max(normal.abs()), curvature(model)?.q.abs())
        }
    };
    let volume = model.volume();
    let bound = -(0.5 * c1 * c1 + c2) * volume.powf(4.0 / n.as_f64());
    Ok(LowerBoundConstants {
        c1,
        c2,
        volume,
        bound: if bound == 0.0 { 0.0 } else { bound },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub constants: LowerBoundConstants,
    pub quotients: Vec<f64>,
    /// min over samples of ℘(u) − bound.
    pub min_margin: f64,
    pub failures: usize,
    pub passed: bool,
}

/// Checks ℘(u) ≥ bound on every sample after rescaling it to unit mass.
pub fn verify_lower_bound(
    model: &MetricModel,
    samples: &[ScalarField],
) -> Result<LowerBoundReport> {
    let constants = lower_bound_constants(model)?;
    let q = model.dimension().exponents().critical();
    let mut quotients = Vec::with_capacity(samples.len());
    for u in samples {
        let m = mass(model, u)?;
        let unit = u.map(|v| v / m.powf(1.0 / q));
        quotients.push(functional(model, &unit)?.quotient);
    }
    let margins: Vec<f64> = quotients.iter().map(|v| v - constants.bound).collect();
    let failures = margins.iter().filter(|m| **m < 0.0).count();
    let min_margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LowerBoundReport {
        constants,
        quotients,
        min_margin,
        failures,
        passed: failures == 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::Dimension;
    use crate::fields::{AxialField, GridField, GridSpec};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn flat_torus_bound_is_zero() {
        let m = MetricModel::cubic_torus(dim(5), 2.0 * PI).unwrap();
        let c = lower_bound_constants(&m).unwrap();
        assert_eq!((c.c1, c.c2, c.bound), (0.0, 0.0, 0.0));
        let spec = GridSpec::cube(dim(5), 8, 2.0 * PI).unwrap();
        let u: ScalarField = GridField::from_fn(&spec, |x| 2.0 + x[1].sin()).into();
        let r = verify_lower_bound(&m, &[u]).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn sphere_and_cylinder_constants() {
        let s = lower_bound_constants(&MetricModel::sphere(dim(5))).unwrap();
        // a_5·20 − (4/3)·4 = 65/6 − 16/3 = 11/2.
        assert_relative_eq!(s.c1, 5.5, max_relative = 1e-14);
        assert_relative_eq!(s.c2, 105.0 / 16.0, max_relative = 1e-14);
        assert!(s.bound < 0.0);

        let c = lower_bound_constants(&MetricModel::cylinder(dim(5), 10.0).unwrap()).unwrap();
        assert_relative_eq!(c.c1, 6.5, max_relative = 1e-14);
        assert_relative_eq!(c.c2, 1.5625, max_relative = 1e-14);
        assert!(c.bound < 0.0);
    }

    #[test]
    fn cylinder_samples_pass() {
        let m = MetricModel::cylinder(dim(5), 10.0).unwrap();
        let samples: Vec<ScalarField> = (1..=5)
            .map(|k| {
                AxialField::from_fn(10.0, 201, |t| 1.0 + 0.5 * (k as f64 * t).sin())
                    .unwrap()
                    .into()
            })
            .collect();
        let r = verify_lower_bound(&m, &samples).unwrap();
        assert!(r.passed && r.min_margin > 0.0);
    }

    #[test]
    fn serde_uses_named_constants() {
        let c = lower_bound_constants(&MetricModel::sphere(dim(6))).unwrap();
        let v = serde_json::to_value(c).unwrap();
        assert!(v.get("C1").is_some() && v.get("C2").is_some() && v.get("bound").is_some());
    }
}
