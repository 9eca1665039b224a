//! Neck pieces [0, l] × S^{n−1}(1) with axisymmetric test functions: positivity
//! of the curvature terms, the pigeonhole slice, and the cost of extending
//! slice data over a unit collar.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::fields::AxialField;
use crate::geometry::{curvature, gradient_tensor_eigenvalues, MetricModel};
use crate::paneitz::cylinder_density;
use crate::quadrature::sphere_area;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderPositivity {
    pub n: Dimension,
    /// a_n·R_cyl.
    pub a_n_r: f64,
    /// a_n R − (4/(n−2))(n−2), on the sphere directions.
    pub spherical_eigenvalue: f64,
    /// a_n R, on the axis.
    pub axial_eigenvalue: f64,
    pub q: f64,
    pub passed: bool,
}

pub fn cylinder_positivity(n: Dimension) -> CylinderPositivity {
    let model = MetricModel::Cylinder { n, length: 1.0 };
    let k = curvature(&model).expect("cylinder curvature is closed form");
    let (spherical, axial) =
        gradient_tensor_eigenvalues(&model).expect("cylinder curvature is closed form");
    let a_n_r = n.coefficients().a_n() * k.scalar;
    CylinderPositivity {
        n,
        a_n_r,
        spherical_eigenvalue: spherical,
        axial_eigenvalue: axial,
        q: k.q,
        passed: k.q > 0.0 && spherical > 0.0 && axial > 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub t: f64,
    pub value: f64,
    /// (∫ density dt)/l.
    pub mean: f64,
}

/// Sample of minimal density. A minimum never exceeds the mean, which is
/// the pigeonhole producing a cheap slice.
pub fn slice_finder(density: &AxialField) -> Result<Slice> {
    if density.values().iter().any(|v| *v < 0.0) {
        return Err(Error::Domain("slice densities are nonnegative".into()));
    }
    let (i, v) =
        density
            .values()
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, v)| if *v < bv { (i, *v) } else { (bi, bv) },
            );
    Ok(Slice {
        t: density.position(i),
        value: v,
        mean: density.mean(),
    })
}

/// (∫ density dt, density) with density(t) the energy of the slice {t} × S^{n−1}.
pub fn cylinder_energy_profile(n: Dimension, l: f64, u: &AxialField) -> Result<(f64, AxialField)> {
    if (u.length() - l).abs() > 1e-12 * l {
        return Err(Error::LayoutMismatch(format!(
            "profile on [0, {}] for a cylinder of length {l}",
            u.length()
        )));
    }
    let density = cylinder_density(n, u)?;
    Ok((density.integrate(), density))
}

/// Energy of F(t, x) = (1 − t)·f̃ on the collar [0, 1] × S^{n−1} for constant
/// slice data f̃: ω_{n−1}·f̃²·(a_n R + Q/3).
pub fn extend_over_collar(n: Dimension, boundary_value: f64) -> f64 {
    let p = cylinder_positivity(n);
    sphere_area(n.get() - 1) * boundary_value * boundary_value * (p.axial_eigenvalue + p.q / 3.0)
}

/// The same collar energy by quadrature of the cylinder energy density.
pub fn extend_over_collar_numeric(
    n: Dimension,
    boundary_value: f64,
    samples: usize,
) -> Result<f64> {
    let f = AxialField::from_fn(1.0, samples, |t| (1.0 - t) * boundary_value)?;
    Ok(cylinder_energy_profile(n, 1.0, &f)?.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSweepPoint {
    pub l: f64,
    pub total: f64,
    /// total / l, the bound the cheap slice obeys.
    pub mean: f64,
    pub slice_t: f64,
    pub slice_value: f64,
    /// Collar cost of extending the cheap slice's value.
    pub collar_energy: f64,
}

/// Profiles e^{−t} + e^{−(l−t)} on growing necks: the cheapest slice and its
/// collar cost shrink with l.
pub fn length_sweep(
    n: Dimension,
    lengths: &[f64],
    samples_per_unit: usize,
) -> Result<Vec<LengthSweepPoint>> {
    lengths
        .par_iter()
        .map(|&l| {
            let samples = ((l * samples_per_unit as f64).ceil() as usize).max(64) + 1;
            let u = AxialField::from_fn(l, samples, |t| (-t).exp() + (t - l).exp())?;
            let (total, density) = cylinder_energy_profile(n, l, &u)?;
            let s = slice_finder(&density)?;
            let idx = (s.t / u.spacing()).round() as usize;
            let collar = extend_over_collar(n, u.values()[idx.min(u.values().len() - 1)]);
            Ok(LengthSweepPoint {
                l,
                total,
                mean: total / l,
                slice_t: s.t,
                slice_value: s.value,
                collar_energy: collar,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn positivity_in_low_dimensions() {
        let p = cylinder_positivity(dim(5));
        assert_relative_eq!(p.a_n_r, 6.5, max_relative = 1e-14);
        assert_relative_eq!(p.spherical_eigenvalue, 2.5, max_relative = 1e-14);
        assert_relative_eq!(p.axial_eigenvalue, 6.5, max_relative = 1e-14);
        assert_relative_eq!(p.q, 1.5625, max_relative = 1e-14);
        for n in 5..=10 {
            assert!(cylinder_positivity(dim(n)).passed);
        }
    }

    #[test]
    fn slice_examples() {
        let one = AxialField::from_fn(10.0, 101, |_| 1.0).unwrap();
        let s = slice_finder(&one).unwrap();
        assert_eq!(s.value, 1.0);
        assert_relative_eq!(s.mean, 1.0, max_relative = 1e-14);
        let ramp = AxialField::from_fn(10.0, 101, |t| t).unwrap();
        let s = slice_finder(&ramp).unwrap();
        assert_eq!((s.t, s.value), (0.0, 0.0));
        assert_relative_eq!(s.mean, 5.0, max_relative = 1e-14);
        let neg = AxialField::from_fn(1.0, 11, |t| t - 0.5).unwrap();
        assert!(slice_finder(&neg).is_err());
    }

    #[test]
    fn energy_profile_examples() {
        let n = dim(5);
        let l = 10.0;
        let p = cylinder_positivity(n);
        let omega = sphere_area(4);
        let one = AxialField::from_fn(l, 201, |_| 1.0).unwrap();
        let (total, density) = cylinder_energy_profile(n, l, &one).unwrap();
        assert_relative_eq!(total, omega * p.q * l, max_relative = 1e-12);
        assert!(density
            .values()
            .iter()
            .all(|v| (v - omega * p.q).abs() < 1e-9));
        let zero = one.map(|_| 0.0);
        assert_eq!(cylinder_energy_profile(n, l, &zero).unwrap().0, 0.0);

        let k = PI / l;
        let exact = omega * l / 2.0 * (k.powi(4) + p.axial_eigenvalue * k * k + p.q);
        let err = |m: usize| {
            let u = AxialField::from_fn(l, m, |t| (k * t).cos()).unwrap();
            (cylinder_energy_profile(n, l, &u).unwrap().0 - exact).abs()
        };
        let (e1, e2) = (err(201), err(401));
        assert!(e1 / exact < 1e-3);
        assert!(e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn collar_closed_form_and_quadrature() {
        for n in 5..=10 {
            let n = dim(n);
            for f in [0.0, 0.5, 1.0, 2.0] {
                let closed = extend_over_collar(n, f);
                let numeric = extend_over_collar_numeric(n, f, 101).unwrap();
                assert!(
                    (closed - numeric).abs() <= 1e-12 * closed.max(1.0),
                    "{closed} {numeric}"
                );
            }
            assert_relative_eq!(
                extend_over_collar(n, 2.0),
                4.0 * extend_over_collar(n, 1.0),
                max_relative = 1e-14
            );
        }
        let p = cylinder_positivity(dim(5));
        assert_relative_eq!(
            extend_over_collar(dim(5), 1.0),
            sphere_area(4) * (6.5 + p.q / 3.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn length_sweep_slices_get_cheaper() {
        let pts = length_sweep(dim(5), &[5.0, 10.0, 20.0, 40.0], 40).unwrap();
        assert!(pts.iter().all(|p| p.slice_value <= p.mean));
        assert!(pts.windows(2).all(|w| w[1].slice_value < w[0].slice_value));
        assert!(pts
            .windows(2)
            .all(|w| w[1].collar_energy < w[0].collar_energy));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn minimum_slice_never_exceeds_mean(values in prop::collection::vec(0.0f64..10.0, 5..200), l in 0.5f64..50.0) {
            let d = AxialField::new(l, values).unwrap();
            let s = slice_finder(&d).unwrap();
            prop_assert!(s.value <= s.mean * (1.0 + 1e-12));
            prop_assert!((0.0..=l).contains(&s.t));
        }
    }
}
