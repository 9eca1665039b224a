//! Conformal covariance on the flat torus: for g_w = w^{4/(n−4)}·flat,
//! P[g_w]u = w^{−(n+4)/(n−4)}·Δ²(w u).
//!
//! Route (a) applies the bilaplacian stencil to the product. Route (b)
//! expands the product rule
//! Δ²(wu) = wΔ²u + uΔ²w + 2ΔwΔu + 4∇w·∇Δu + 4∇u·∇Δw + 4∇²w:∇²u
//! with independent first/second difference stencils. The routes agree to
//! roundoff when w is constant and to O(h²) otherwise.

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::fields::{GridField, GridSpec, TrigField};
use crate::quadrature::fitted_order;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    /// max |route(a) − route(b)|.
    pub residual: f64,
    /// max |route(a)|, the normalization of `relative`.
    pub scale: f64,
    pub relative: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub points_per_axis: Vec<usize>,
    pub spacing: Vec<f64>,
    pub residual: Vec<f64>,
    pub fitted_order: Option<f64>,
}

fn product_rule_bilaplacian(w: &GridField, u: &GridField) -> Result<GridField> {
    let dim = w.spec().dimension().get();
    let (lw, lu) = (w.laplacian(), u.laplacian());
    let (bw, bu) = (lw.laplacian(), lu.laplacian());
    let mut acc: Vec<f64> = w
        .values()
        .iter()
        .zip(u.values())
        .enumerate()
        .map(|(i, (wv, uv))| {
            wv * bu.values()[i] + uv * bw.values()[i] + 2.0 * lw.values()[i] * lu.values()[i]
        })
        .collect();
    for a in 0..dim {
        let (dw, du) = (w.first_difference(a), u.first_difference(a));
        let (dlw, dlu) = (lw.first_difference(a), lu.first_difference(a));
        for (i, s) in acc.iter_mut().enumerate() {
            *s += 4.0 * (dw.values()[i] * dlu.values()[i] + du.values()[i] * dlw.values()[i]);
        }
        for b in 0..dim {
            let (hw, hu) = if a == b {
                (w.second_difference(a), u.second_difference(a))
            } else {
                (dw.first_difference(b), du.first_difference(b))
            };
            for (i, s) in acc.iter_mut().enumerate() {
                *s += 4.0 * hw.values()[i] * hu.values()[i];
            }
        }
    }
    GridField::new(w.spec().clone(), acc)
}

/// Compares the two routes to P[g_w]u; passes when the residual is at most
/// `tolerance` times the size of the result.
pub fn covariance_check(w: &GridField, u: &GridField, tolerance: f64) -> Result<CovarianceReport> {
    w.check_same(u)?;
    if w.values().iter().any(|v| *v <= 0.0) {
        return Err(Error::Domain(
            "conformal factor w must be strictly positive".into(),
        ));
    }
    let e = w.spec().dimension().exponents().equation();
    let wu = w.zip_with(u, |a, b| a * b)?;
    let route_a = wu.bilaplacian().zip_with(w, |b, wv| wv.powf(-e) * b)?;
    let route_b = product_rule_bilaplacian(w, u)?.zip_with(w, |b, wv| wv.powf(-e) * b)?;
    let residual = route_a.zip_with(&route_b, |a, b| a - b)?.max_abs();
    let scale = route_a.max_abs();
    let relative = if scale > 0.0 {
        residual / scale
    } else {
        residual
    };
    Ok(CovarianceReport {
        residual,
        scale,
        relative,
        tolerance,
        passed: relative <= tolerance,
    })
}

/// Covariance residual for smooth factors sampled at several resolutions,
/// with the observed order in the grid spacing. Unit wave numbers on a 2π
/// torus reach the asymptotic O(h²) regime from about 16 points per axis.
pub fn covariance_refinement(
    n: Dimension,
    w: &TrigField,
    u: &TrigField,
    points_per_axis: &[usize],
    budget: usize,
) -> Result<RefinementReport> {
    if w.side_lengths != u.side_lengths {
        return Err(Error::LayoutMismatch(
            "w and u live on different tori".into(),
        ));
    }
    let mut spacing = Vec::new();
    let mut residual = Vec::new();
    for &k in points_per_axis {
        let spec = GridSpec::with_budget(n, k, w.side_lengths.clone(), budget)?;
        let report = covariance_check(&w.sample(&spec)?, &u.sample(&spec)?, f64::INFINITY)?;
        spacing.push(spec.spacing(0));
        residual.push(report.residual);
    }
    let order = fitted_order(&spacing, &residual);
    Ok(RefinementReport {
        points_per_axis: points_per_axis.to_vec(),
        spacing,
        residual,
        fitted_order: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::TrigKind;
    use std::f64::consts::PI;

    fn spec(k: usize) -> GridSpec {
        GridSpec::cube(Dimension::new(5).unwrap(), k, 2.0 * PI).unwrap()
    }

    #[test]
    fn identity_factor_is_exact() {
        let s = spec(8);
        let u = GridField::from_fn(&s, |x| 1.0 + 0.3 * (x[0] + x[3]).sin());
        let r = covariance_check(&GridField::constant(&s, 1.0), &u, 1e-12).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(r.passed);
    }

    #[test]
    fn constant_factor_scaling_law() {
        let s = spec(8);
        let u = GridField::from_fn(&s, |x| 1.0 + 0.3 * (x[0] + x[3]).sin());
        for c in [0.5, 2.0, 7.0] {
            let r = covariance_check(&GridField::constant(&s, c), &u, 1e-12).unwrap();
            assert!(r.passed, "c={c}: {}", r.relative);
        }
    }

    #[test]
    fn rejects_nonpositive_factor() {
        let s = spec(8);
        let w = GridField::from_fn(&s, |x| x[0].cos());
        assert!(matches!(
            covariance_check(&w, &w, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn smooth_factor_converges_at_second_order() {
        let sides = vec![2.0 * PI; 5];
        let w = TrigField::constant(sides.clone(), 1.0).with_term(
            0.05,
            vec![0, 1, 0, 0, 0],
            TrigKind::Cos,
        );
        let u = TrigField::constant(sides, 1.0)
            .with_term(0.05, vec![1, 0, 0, 0, 0], TrigKind::Sin)
            .with_term(0.05, vec![0, 1, 0, 0, 0], TrigKind::Sin);
        let r = covariance_refinement(Dimension::new(5).unwrap(), &w, &u, &[16, 20, 24], 8_000_000)
            .unwrap();
        assert!(
            r.residual.windows(2).all(|p| p[1] < p[0]),
            "{:?}",
            r.residual
        );
        assert!(r.fitted_order.unwrap() >= 1.8, "{:?}", r);
    }
}
