//! Cutoff functions f_δ vanishing on B_δ(c) and equal to 1 outside B_{2δ}(c),
//! and the convergence ℘(f_δ u) → ℘(u) as δ → 0.
//!
//! The sweep evaluates f_δ u without resolving B_{2δ} on the grid:
//!
//! ```text
//! E(f_δ u) = E(u) + ∫_{B_{2δ}} (Δ(f_δ u))² − (Δu)²
//! M(f_δ u) = M(u) − ∫_{B_{2δ}} (1 − f_δ^p) u^p
//! Δ(f u)   = f Δu + 2 f′ ∂_r u + u Δf
//! ```
//!
//! with u a trigonometric polynomial (so E(u), M(u) are exact grid sums of
//! its analytic values once the grid resolves u^p) and the ball integrals by
//! a product rule in polar coordinates around c.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::bubble::smoothstep_down;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::fields::{GridField, GridSpec, RadialField, TrigField};
use crate::geometry::MetricModel;
use crate::paneitz::QuotientReport;
use crate::quadrature::{fitted_order, pairwise_sum, GaussRule, SphereRule};

const RADIAL_ORDER: usize = 16;
const RADIAL_PANELS: usize = 8;
const POLAR_ORDER: usize = 10;
const PROFILE_SAMPLES: usize = 6001;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffParams {
    pub delta: f64,
    pub center: Vec<f64>,
    /// Measured after construction; ignored on input.
    #[serde(default)]
    pub c0_measured: Option<f64>,
}

impl CutoffParams {
    pub fn new(delta: f64, center: Vec<f64>) -> Self {
        CutoffParams {
            delta,
            center,
            c0_measured: None,
        }
    }

    fn validate(&self, sides: &[f64]) -> Result<()> {
        if self.center.len() != sides.len() {
            return Err(Error::LayoutMismatch(
                "cutoff center has the wrong dimension".into(),
            ));
        }
        let min_side = sides.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(self.delta > 0.0 && 2.0 * self.delta < min_side / 4.0) {
            return Err(Error::Range(format!(
                "delta {} needs 0 < 2δ < {}",
                self.delta,
                min_side / 4.0
            )));
        }
        Ok(())
    }
}

/// (f, f′, f″) of the radial cutoff at distance r.
pub fn cutoff_jet(delta: f64, r: f64) -> (f64, f64, f64) {
    let (v, d1, d2) = smoothstep_down(r / delta - 1.0);
    (1.0 - v, -d1 / delta, -d2 / (delta * delta))
}

/// sup|f′|·δ and sup|Δf|·δ² measured on a finely sampled radial profile of
/// f_δ in dimension n.
pub fn radial_cutoff_constants(n: Dimension, delta: f64) -> Result<(f64, f64)> {
    let f = RadialField::from_fn(n, 3.0 * delta, PROFILE_SAMPLES, |r| cutoff_jet(delta, r).0)?;
    let grad = f
        .gradient_sq()
        .values()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.sqrt()));
    let lap = f
        .laplacian()
        .values()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((grad * delta, lap * delta * delta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffField {
    pub params: CutoffParams,
    #[serde(skip)]
    pub field: Option<GridField>,
    /// max(sup|∇f|·δ, sup|Δf|·δ²) from the radial profile.
    pub c0_measured: f64,
    /// Same constants from the grid stencils; meaningful only when resolved.
    pub c0_grid: f64,
    /// δ spans at least four grid spacings.
    pub resolved: bool,
}

/// Samples f_δ(|x − c|) (periodic distance) on the grid.
pub fn cutoff_family(params: &CutoffParams, grid: &GridSpec) -> Result<CutoffField> {
    params.validate(grid.side_lengths())?;
    let delta = params.delta;
    let values: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|i| cutoff_jet(delta, grid.periodic_distance_sq(i, &params.center).sqrt()).0)
        .collect();
    let field = GridField::new(grid.clone(), values)?;
    let (g, l) = radial_cutoff_constants(grid.dimension(), delta)?;
    let c0_measured = g.max(l);
    let grid_grad = field
        .gradient_sq()
        .values()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.sqrt()));
    let grid_lap = field.laplacian().max_abs();
    let c0_grid = (grid_grad * delta).max(grid_lap * delta * delta);
    let h = (0..grid.dimension().get())
        .map(|a| grid.spacing(a))
        .fold(0.0, f64::max);
    let mut params = params.clone();
    params.c0_measured = Some(c0_measured);
    Ok(CutoffField {
        params,
        field: Some(field),
        c0_measured,
        c0_grid,
        resolved: delta >= 4.0 * h,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffPoint {
    pub delta: f64,
    pub quotient: f64,
    /// ℘(f_δ u) − ℘(u).
    pub delta_quotient: f64,
    pub numerator: f64,
    pub mass: f64,
    pub c0_measured: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffSweep {
    pub base: QuotientReport,
    pub points: Vec<CutoffPoint>,
    /// Slope of log|℘(f_δ u) − ℘(u)| against log δ; `None` for fewer than
    /// two δ.
    pub fitted_order: Option<f64>,
    /// |℘(f_δ u) − ℘(u)| strictly decreases as δ decreases.
    pub monotone: bool,
}

struct BallIntegrals {
    energy_excess: f64,
    mass_deficit: f64,
}

fn ball_integrals(
    u: &TrigField,
    n: Dimension,
    delta: f64,
    center: &[f64],
    sphere: &SphereRule,
) -> BallIntegrals {
    let nf = n.as_f64();
    let p = n.exponents().critical();
    let inner = GaussRule::composite(RADIAL_ORDER, RADIAL_PANELS, 0.0, delta);
    let outer = GaussRule::composite(RADIAL_ORDER, RADIAL_PANELS, delta, 2.0 * delta);
    let nodes: Vec<(f64, f64)> = inner
        .nodes
        .iter()
        .zip(&inner.weights)
        .chain(outer.nodes.iter().zip(&outer.weights))
        .map(|(r, w)| (*r, *w))
        .collect();
    let terms: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|&(r, wr)| {
            let (f, df, ddf) = cutoff_jet(delta, r);
            let lap_f = ddf + (nf - 1.0) * df / r;
            let fp = f.powf(p);
            let mut e = Vec::with_capacity(sphere.weights.len());
            let mut m = Vec::with_capacity(sphere.weights.len());
            let mut x = vec![0.0; center.len()];
            for (dir, ws) in sphere.directions.iter().zip(&sphere.weights) {
                for ((xi, ci), di) in x.iter_mut().zip(center).zip(dir) {
                    *xi = ci + r * di;
                }
                let (v, grad, lap) = u.jet(&x);
                let radial: f64 = grad.iter().zip(dir).map(|(g, d)| g * d).sum();
                let lap_fu = f * lap + 2.0 * df * radial + v * lap_f;
                e.push(ws * (lap_fu * lap_fu - lap * lap));
                m.push(ws * (1.0 - fp) * v.max(0.0).powf(p));
            }
            let jac = wr * r.powf(nf - 1.0);
            (jac * pairwise_sum(&e), jac * pairwise_sum(&m))
        })
        .collect();
    let e: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let m: Vec<f64> = terms.iter().map(|t| t.1).collect();
    BallIntegrals {
        energy_excess: pairwise_sum(&e),
        mass_deficit: pairwise_sum(&m),
    }
}

/// ℘(u) for a smooth positive trigonometric u, from exact grid sums.
pub fn trig_base_quotient(
    model: &MetricModel,
    u: &TrigField,
    grid: &GridSpec,
) -> Result<QuotientReport> {
    let MetricModel::FlatTorus { n, side_lengths } = model else {
        return Err(Error::UnsupportedModel(
            "cutoff constructions run on flat tori".into(),
        ));
    };
    let n = *n;
    u.validate()?;
    if u.side_lengths != *side_lengths
        || grid.side_lengths() != side_lengths.as_slice()
        || grid.dimension() != n
    {
        return Err(Error::LayoutMismatch("u, grid and torus disagree".into()));
    }
    if u.lower_bound() <= 0.0 {
        return Err(Error::Domain("u must be strictly positive".into()));
    }
    let p = n.exponents().critical();
    let lap = GridField::from_fn(grid, |x| u.laplacian(x));
    let e = lap.dot(&lap)?;
    let m = GridField::from_fn(grid, |x| u.value(x).powf(p)).integrate();
    QuotientReport::from_parts(
        n,
        e,
        m,
        model.digest(),
        format!("{}^{n}", grid.points_per_axis()),
    )
}

/// ℘(f_δ u) given ℘(u).
pub fn cut_quotient(
    model: &MetricModel,
    u: &TrigField,
    base: &QuotientReport,
    center: &[f64],
    delta: f64,
) -> Result<QuotientReport> {
    let n = model.dimension();
    let MetricModel::FlatTorus { side_lengths, .. } = model else {
        return Err(Error::UnsupportedModel(
            "cutoff constructions run on flat tori".into(),
        ));
    };
    CutoffParams::new(delta, center.to_vec()).validate(side_lengths)?;
    let sphere = SphereRule::new(n.get(), POLAR_ORDER);
    let b = ball_integrals(u, n, delta, center, &sphere);
    QuotientReport::from_parts(
        n,
        base.numerator + b.energy_excess,
        base.mass - b.mass_deficit,
        base.model.clone(),
        format!("{}+ball", base.grid),
    )
}

/// ℘(f_δ u) − ℘(u) over a list of δ on a flat torus.
pub fn cutoff_sweep(
    model: &MetricModel,
    u: &TrigField,
    grid: &GridSpec,
    center: &[f64],
    deltas: &[f64],
) -> Result<CutoffSweep> {
    let base = trig_base_quotient(model, u, grid)?;
    let n = model.dimension();
    let points = deltas
        .par_iter()
        .map(|&delta| {
            let r = cut_quotient(model, u, &base, center, delta)?;
            let (g, l) = radial_cutoff_constants(n, delta)?;
            Ok(CutoffPoint {
                delta,
                quotient: r.quotient,
                delta_quotient: r.quotient - base.quotient,
                numerator: r.numerator,
                mass: r.mass,
                c0_measured: g.max(l),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hs: Vec<f64> = points.iter().map(|p| p.delta).collect();
    let es: Vec<f64> = points.iter().map(|p| p.delta_quotient.abs()).collect();
    let fitted = if points.len() >= 2 {
        fitted_order(&hs, &es)
    } else {
        None
    };
    let mut order: Vec<&CutoffPoint> = points.iter().collect();
    order.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    let monotone = order
        .windows(2)
        .all(|w| w[1].delta_quotient.abs() < w[0].delta_quotient.abs());
    Ok(CutoffSweep {
        base,
        points,
        fitted_order: fitted,
        monotone,
    })
}
