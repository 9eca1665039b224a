//! Heuristic upper-bound improver: projected gradient descent of the
//! Paneitz quotient over positive grid fields on a flat torus. Every iterate
//! is an admissible test function, so every reported value is an upper bound
//! for the discrete problem; nothing here certifies a minimum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{GridField, ScalarField};
use crate::geometry::MetricModel;
use crate::paneitz::functional;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentOptions {
    pub max_iterations: usize,
    pub initial_step: f64,
    /// Iterates are clamped to at least this value.
    pub floor: f64,
    pub max_halvings: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        DescentOptions {
            max_iterations: 50,
            initial_step: 1e-3,
            floor: 1e-12,
            max_halvings: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentReport {
    pub heuristic: bool,
    pub initial_quotient: f64,
    pub final_quotient: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
    #[serde(skip)]
    pub minimizer: Option<GridField>,
}

/// L² gradient of ℘ = E/M^q with E = Σ(Δu)²·dV and M = Σ u^p·dV.
fn gradient(u: &GridField, energy: f64, mass: f64) -> Result<GridField> {
    let ex = u.spec().dimension().exponents();
    let (p, q) = (ex.critical(), ex.quotient());
    let mq = mass.powf(q);
    let coeff = q * energy * p / (mass * mq);
    u.bilaplacian()
        .zip_with(u, |b, v| 2.0 * b / mq - coeff * v.powf(p - 1.0))
}

pub fn descend_quotient(
    model: &MetricModel,
    start: &GridField,
    options: DescentOptions,
) -> Result<DescentReport> {
    if !matches!(model, MetricModel::FlatTorus { .. }) {
        return Err(Error::UnsupportedModel(
            "descent runs on flat tori only".into(),
        ));
    }
    if start.values().iter().any(|v| *v < 0.0) {
        return Err(Error::Domain(
            "descent starts from a nonnegative field".into(),
        ));
    }
    let eval = |u: &GridField| functional(model, &ScalarField::from(u.clone()));
    let mut u = start.clone();
    let mut report = eval(&u)?;
    let initial = report.quotient;
    let mut history = vec![initial];
    let mut step = options.initial_step;
    let mut iterations = 0;
    'outer: for _ in 0..options.max_iterations {
        let g = gradient(&u, report.numerator, report.mass)?;
        for _ in 0..=options.max_halvings {
            let trial = u.zip_with(&g, |v, d| (v - step * d).max(options.floor))?;
            if let Ok(r) = eval(&trial) {
                if r.quotient < report.quotient {
                    u = trial;
                    report = r;
                    history.push(report.quotient);
                    iterations += 1;
                    step *= 1.5;
                    continue 'outer;
                }
            }
            step *= 0.5;
        }
        break;
    }
    Ok(DescentReport {
        heuristic: true,
        initial_quotient: initial,
        final_quotient: report.quotient,
        iterations,
        history,
        minimizer: Some(u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::Dimension;
    use crate::fields::GridSpec;
    use std::f64::consts::PI;

    #[test]
    fn descent_never_increases_the_quotient() {
        let n = Dimension::new(5).unwrap();
        let model = MetricModel::cubic_torus(n, 2.0 * PI).unwrap();
        let spec = GridSpec::cube(n, 8, 2.0 * PI).unwrap();
        let u = GridField::from_fn(&spec, |x| {
            1.0 + 0.3 * x[0].cos() + 0.2 * (x[1] + x[2]).sin()
        });
        let r = descend_quotient(
            &model,
            &u,
            DescentOptions {
                max_iterations: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(r.heuristic);
        assert!(r.history.windows(2).all(|w| w[1] < w[0]));
        assert!(r.final_quotient <= r.initial_quotient);
        assert!(r.final_quotient >= 0.0);
        assert!(r.minimizer.unwrap().values().iter().all(|v| *v > 0.0));
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let n = Dimension::new(5).unwrap();
        let model = MetricModel::cubic_torus(n, 2.0 * PI).unwrap();
        let spec = GridSpec::cube(n, 8, 2.0 * PI).unwrap();
        let u = GridField::from_fn(&spec, |x| 1.0 + 0.3 * x[0].cos() + 0.1 * x[3].sin());
        let r = functional(&model, &u.clone().into()).unwrap();
        let g = gradient(&u, r.numerator, r.mass).unwrap();
        let idx = 1234;
        let h = 1e-6;
        let bump = |s: f64| {
            let mut v = u.values().to_vec();
            v[idx] += s;
            functional(&model, &GridField::new(spec.clone(), v).unwrap().into())
                .unwrap()
                .quotient
        };
        let fd = (bump(h) - bump(-h)) / (2.0 * h);
        let analytic = g.values()[idx] * spec.cell_volume();
        assert!(
            (fd - analytic).abs() <= 1e-5 * analytic.abs().max(1e-3),
            "{fd} vs {analytic}"
        );
    }
}
