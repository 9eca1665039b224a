//! Model metrics and their closed-form curvature data.
//!
//! Sign convention: Δ is the sum of pure second derivatives (non-positive
//! spectrum). Ricci tensors of the models are diagonal in a natural frame and
//! are stored as two eigenvalues: `ricci_tangent` on the spherical directions
//! and `ricci_normal` on the axial / flat directions.

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::fields::{GridField, ScalarField};
use crate::quadrature::sphere_area;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricModel {
    /// Unit round sphere Sⁿ.
    RoundSphere { n: Dimension },
    /// Flat torus Rⁿ / Π L_a Z.
    FlatTorus {
        n: Dimension,
        side_lengths: Vec<f64>,
    },
    /// [0, l] × S^{n−1}(1).
    Cylinder { n: Dimension, length: f64 },
    /// u^{4/(n−4)} · flat, with u sampled on a torus grid.
    ConformalToFlat {
        n: Dimension,
        side_lengths: Vec<f64>,
        factor: GridField,
    },
}

impl MetricModel {
    pub fn sphere(n: Dimension) -> Self {
        MetricModel::RoundSphere { n }
    }

    pub fn torus(n: Dimension, side_lengths: Vec<f64>) -> Result<Self> {
        let m = MetricModel::FlatTorus { n, side_lengths };
        m.validate()?;
        Ok(m)
    }

    pub fn cubic_torus(n: Dimension, side: f64) -> Result<Self> {
        Self::torus(n, vec![side; n.get()])
    }

    pub fn cylinder(n: Dimension, length: f64) -> Result<Self> {
        let m = MetricModel::Cylinder { n, length };
        m.validate()?;
        Ok(m)
    }

    pub fn conformal_to_flat(factor: GridField) -> Result<Self> {
        let spec = factor.spec();
        let m = MetricModel::ConformalToFlat {
            n: spec.dimension(),
            side_lengths: spec.side_lengths().to_vec(),
            factor,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MetricModel::RoundSphere { .. } => Ok(()),
            MetricModel::FlatTorus { n, side_lengths } => check_sides(*n, side_lengths),
            MetricModel::Cylinder { length, .. } => {
                if length.is_finite() && *length > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Range(format!(
                        "cylinder length {length} must be positive"
                    )))
                }
            }
            MetricModel::ConformalToFlat {
                n,
                side_lengths,
                factor,
            } => {
                check_sides(*n, side_lengths)?;
                if factor.spec().dimension() != *n
                    || factor.spec().side_lengths() != side_lengths.as_slice()
                {
                    return Err(Error::LayoutMismatch(
                        "conformal factor grid does not match the torus".into(),
                    ));
                }
                if factor.values().iter().any(|v| *v <= 0.0) {
                    return Err(Error::Domain(
                        "conformal factor must be strictly positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            MetricModel::RoundSphere { n }
            | MetricModel::FlatTorus { n, .. }
            | MetricModel::Cylinder { n, .. }
            | MetricModel::ConformalToFlat { n, .. } => *n,
        }
    }

    /// Short human-readable description used in reports.
    pub fn digest(&self) -> String {
        match self {
            MetricModel::RoundSphere { n } => format!("round_sphere(n={n})"),
            MetricModel::FlatTorus { n, side_lengths } => {
                format!("flat_torus(n={n}, sides={side_lengths:?})")
            }
            MetricModel::Cylinder { n, length } => format!("cylinder(n={n}, l={length})"),
            MetricModel::ConformalToFlat {
                n,
                side_lengths,
                factor,
            } => format!(
                "conformal_to_flat(n={n}, sides={side_lengths:?}, grid={})",
                factor.spec().points_per_axis()
            ),
        }
    }

    /// Riemannian volume.
    pub fn volume(&self) -> f64 {
        match self {
            MetricModel::RoundSphere { n } => sphere_volume(*n),
            MetricModel::FlatTorus { side_lengths, .. } => side_lengths.iter().product(),
            MetricModel::Cylinder { n, length } => sphere_area(n.get() - 1) * length,
            MetricModel::ConformalToFlat { n, factor, .. } => {
                let p = n.exponents().critical();
                factor.map(|u| u.powf(p)).integrate()
            }
        }
    }
}

fn check_sides(n: Dimension, sides: &[f64]) -> Result<()> {
    if sides.len() != n.get() {
        return Err(Error::LayoutMismatch(format!(
            "{} side lengths for dimension {n}",
            sides.len()
        )));
    }
    if sides.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::Range("torus side lengths must be positive".into()));
    }
    Ok(())
}

/// Volume of the unit round sphere Sⁿ.
pub fn sphere_volume(n: Dimension) -> f64 {
    sphere_area(n.get())
}

/// Pointwise curvature of a model with constant curvature data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData {
    pub scalar: f64,
    pub ricci_tangent: f64,
    pub ricci_normal: f64,
    pub ric_norm_sq: f64,
    pub lap_scalar: f64,
    pub q: f64,
}

impl CurvatureData {
    pub fn flat() -> Self {
        CurvatureData {
            scalar: 0.0,
            ricci_tangent: 0.0,
            ricci_normal: 0.0,
            ric_norm_sq: 0.0,
            lap_scalar: 0.0,
            q: 0.0,
        }
    }
}

/// Q = −q_lap·ΔR + q_scal·R² − q_ric·|Ric|².
pub fn q_curvature(scalar: f64, ric_norm_sq: f64, lap_scalar: f64, n: Dimension) -> f64 {
    let c = n.coefficients();
    -c.q_lap() * lap_scalar + c.q_scal() * scalar * scalar - c.q_ric() * ric_norm_sq
}

pub fn curvature(model: &MetricModel) -> Result<CurvatureData> {
    let n = model.dimension();
    let nf = n.as_f64();
    let (scalar, ricci_tangent, ricci_normal, ric_norm_sq) =
        match model {
            MetricModel::FlatTorus { .. } => return Ok(CurvatureData::flat()),
            MetricModel::RoundSphere { .. } => {
                (nf * (nf - 1.0), nf - 1.0, nf - 1.0, nf * (nf - 1.0).powi(2))
            }
            MetricModel::Cylinder { .. } => (
                (nf - 1.0) * (nf - 2.0),
                nf - 2.0,
                0.0,
                (nf - 1.0) * (nf - 2.0).powi(2),
            ),
            MetricModel::ConformalToFlat { .. } => return Err(Error::UnsupportedModel(
                "conformally flat metrics have no closed-form curvature here; use q_of_conformal"
                    .into(),
            )),
        };
    Ok(CurvatureData {
        scalar,
        ricci_tangent,
        ricci_normal,
        ric_norm_sq,
        lap_scalar: 0.0,
        q: q_curvature(scalar, ric_norm_sq, 0.0, n),
    })
}

/// Eigenvalues of the gradient-term tensor a_n·R·g − (4/(n−2))·Ric on the
/// spherical and axial/flat directions.
pub fn gradient_tensor_eigenvalues(model: &MetricModel) -> Result<(f64, f64)> {
    let k = curvature(model)?;
    let c = model.dimension().coefficients();
    let base = c.a_n() * k.scalar;
    Ok((
        base - c.ricci() * k.ricci_tangent,
        base - c.ricci() * k.ricci_normal,
    ))
}

/// Q-curvature of g_u = u^{4/(n−4)}·flat on a torus grid:
/// Q[g_u] = u^{−(n+4)/(n−4)} Δ²u.
pub fn q_of_conformal(u: &ScalarField, n: Dimension) -> Result<ScalarField> {
    let grid = u.as_grid().ok_or_else(|| {
        Error::UnsupportedLayout(format!("{} is not a torus grid field", u.layout_name()))
    })?;
    if grid.spec().dimension() != n {
        return Err(Error::LayoutMismatch(format!(
            "grid dimension {} differs from n = {n}",
            grid.spec().dimension()
        )));
    }
    if grid.values().iter().any(|v| *v <= 0.0) {
        return Err(Error::Domain(
            "conformal factor must be strictly positive".into(),
        ));
    }
    let power = n.exponents().equation();
    let bil = grid.bilaplacian();
    Ok(grid.zip_with(&bil, |u, b| b * u.powf(-power))?.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn flat_torus_is_flat() {
        let t = MetricModel::cubic_torus(dim(5), 2.0 * PI).unwrap();
        assert_eq!(curvature(&t).unwrap(), CurvatureData::flat());
        for n in 5..20 {
            assert_eq!(q_curvature(0.0, 0.0, 0.0, dim(n)), 0.0);
        }
    }

    #[test]
    fn sphere_and_cylinder_constants() {
        let s = curvature(&MetricModel::sphere(dim(5))).unwrap();
        assert_eq!(s.scalar, 20.0);
        assert_eq!(s.ric_norm_sq, 80.0);
        assert_eq!(s.ricci_tangent, 4.0);
        let c = curvature(&MetricModel::cylinder(dim(5), 10.0).unwrap()).unwrap();
        assert_eq!(c.scalar, 12.0);
        assert_eq!(c.ricci_normal, 0.0);
        assert_eq!(c.ricci_tangent, 3.0);
        assert_eq!(c.ric_norm_sq, 36.0);
    }

    #[test]
    fn sphere_q_matches_closed_form() {
        // On the unit sphere Q = n(n−4)(n²−4)/16.
        for n in 5..=10 {
            let nf = n as f64;
            let q = curvature(&MetricModel::sphere(dim(n))).unwrap().q;
            assert_relative_eq!(
                q,
                nf * (nf - 4.0) * (nf * nf - 4.0) / 16.0,
                max_relative = 1e-13
            );
            assert!(q > 0.0);
        }
        assert_relative_eq!(
            q_curvature(20.0, 80.0, 0.0, dim(5)),
            6.5625,
            max_relative = 1e-14
        );
    }

    #[test]
    fn cylinder_q_is_positive() {
        // On [0,l] × S^{n−1}: Q = n²(n−4)²/16.
        for n in 5..=10 {
            let nf = n as f64;
            let q = curvature(&MetricModel::cylinder(dim(n), 3.0).unwrap())
                .unwrap()
                .q;
            assert_relative_eq!(q, nf * nf * (nf - 4.0).powi(2) / 16.0, max_relative = 1e-13);
        }
        assert_relative_eq!(
            q_curvature(12.0, 36.0, 0.0, dim(5)),
            1.5625,
            max_relative = 1e-14
        );
    }

    #[test]
    fn conformal_models_are_routed_elsewhere() {
        let spec = GridSpec::cube(dim(5), 8, 1.0).unwrap();
        let m = MetricModel::conformal_to_flat(GridField::constant(&spec, 2.0)).unwrap();
        assert!(matches!(curvature(&m), Err(Error::UnsupportedModel(_))));
        assert!(MetricModel::conformal_to_flat(GridField::constant(&spec, 0.0)).is_err());
        assert_relative_eq!(m.volume(), 1024.0, max_relative = 1e-12);
    }

    #[test]
    fn q_of_constant_factor_is_zero() {
        let spec = GridSpec::cube(dim(5), 8, 2.0 * PI).unwrap();
        for c in [1.0, 0.5, 3.0] {
            let q = q_of_conformal(&GridField::constant(&spec, c).into(), dim(5)).unwrap();
            assert!(q.values().iter().all(|v| *v == 0.0));
        }
        let neg = GridField::from_fn(&spec, |x| x[0].cos());
        assert!(matches!(
            q_of_conformal(&neg.into(), dim(5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn q_of_cosine_factor() {
        let spec = GridSpec::cube(dim(5), 16, 2.0 * PI).unwrap();
        let h = spec.spacing(0);
        let c_h = (2.0 - 2.0 * h.cos()) / (h * h);
        let u = GridField::from_fn(&spec, |x| 1.0 + 0.1 * x[0].cos());
        let q = q_of_conformal(&u.clone().into(), dim(5)).unwrap();
        for i in (0..spec.len()).step_by(4099) {
            let x0 = spec.position(i)[0];
            let w = 1.0 + 0.1 * x0.cos();
            let discrete = w.powi(-9) * 0.1 * c_h * c_h * x0.cos();
            let continuum = w.powi(-9) * 0.1 * x0.cos();
            assert_relative_eq!(q.values()[i], discrete, epsilon = 1e-13);
            assert!((q.values()[i] - continuum).abs() <= 0.2 * h * h);
        }
    }

    #[test]
    fn model_serde_roundtrip() {
        let m = MetricModel::cylinder(dim(6), 4.5).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"kind":"cylinder","n":6,"length":4.5}"#);
        let back: MetricModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<MetricModel>(r#"{"kind":"round_sphere","n":4}"#).is_err());
        assert!(
            serde_json::from_str::<MetricModel>(r#"{"kind":"round_sphere","n":5,"radius":2}"#)
                .is_err()
        );
    }
}
