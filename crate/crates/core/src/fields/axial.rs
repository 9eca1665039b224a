use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::simpson;

pub const MIN_AXIAL_SAMPLES: usize = 5;

/// Function of the axial coordinate t ∈ [0, l] of a cylinder, constant on
/// every slice {t} × S^{n−1}. Samples at t_i = i·l/(samples − 1); the ends
/// use one-sided second-order differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AxialFieldRaw", into = "AxialFieldRaw")]
pub struct AxialField {
    length: f64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxialFieldRaw {
    length: f64,
    values: Vec<f64>,
}

impl TryFrom<AxialFieldRaw> for AxialField {
    type Error = Error;

    fn try_from(raw: AxialFieldRaw) -> Result<Self> {
        AxialField::new(raw.length, raw.values)
    }
}

impl From<AxialField> for AxialFieldRaw {
    fn from(f: AxialField) -> Self {
        AxialFieldRaw {
            length: f.length,
            values: f.values,
        }
    }
}

impl AxialField {
    pub fn new(length: f64, values: Vec<f64>) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Range(format!(
                "cylinder length {length} must be positive"
            )));
        }
        if values.len() < MIN_AXIAL_SAMPLES {
            return Err(Error::Range(format!(
                "{} axial samples, need at least {MIN_AXIAL_SAMPLES}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("axial values must be finite".into()));
        }
        Ok(AxialField { length, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(length: f64, samples: usize, f: F) -> Result<Self> {
        let h = length / (samples.max(2) - 1) as f64;
        Self::new(length, (0..samples).map(|i| f(i as f64 * h)).collect())
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.values.len() - 1) as f64
    }

    /// Sample position; clamped so the last node is exactly `length`.
    pub fn position(&self, i: usize) -> f64 {
        (i as f64 * self.spacing()).min(self.length)
    }

    fn with_values(&self, values: Vec<f64>) -> AxialField {
        AxialField {
            length: self.length,
            values,
        }
    }

    pub fn derivative(&self) -> AxialField {
        let v = &self.values;
        let h = self.spacing();
        let last = v.len() - 1;
        let d = (0..=last)
            .map(|i| {
                if i == 0 {
                    (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
                } else if i == last {
                    (3.0 * v[last] - 4.0 * v[last - 1] + v[last - 2]) / (2.0 * h)
                } else {
                    (v[i + 1] - v[i - 1]) / (2.0 * h)
                }
            })
            .collect();
        self.with_values(d)
    }

    pub fn second_derivative(&self) -> AxialField {
        let v = &self.values;
        let h2 = self.spacing().powi(2);
        let last = v.len() - 1;
        let d = (0..=last)
            .map(|i| {
                if i == 0 {
                    (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
                } else if i == last {
                    (2.0 * v[last] - 5.0 * v[last - 1] + 4.0 * v[last - 2] - v[last - 3]) / h2
                } else {
                    (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2
                }
            })
            .collect();
        self.with_values(d)
    }

    /// ∫₀^l f dt (composite Simpson).
    pub fn integrate(&self) -> f64 {
        simpson(&self.values, self.spacing())
    }

    pub fn mean(&self) -> f64 {
        self.integrate() / self.length
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> AxialField {
        self.with_values(self.values.iter().map(|v| f(*v)).collect())
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &AxialField, f: F) -> Result<AxialField> {
        if self.values.len() != other.values.len() || self.length != other.length {
            return Err(Error::LayoutMismatch(
                "axial profiles on different samplings".into(),
            ));
        }
        Ok(self.with_values(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn linear_profile_has_unit_slope_everywhere() {
        let f = AxialField::from_fn(10.0, 41, |t| t).unwrap();
        for d in f.derivative().values() {
            assert_relative_eq!(*d, 1.0, max_relative = 1e-12);
        }
        for d in f.second_derivative().values() {
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn cosine_derivative_is_second_order() {
        let l = 10.0;
        let err = |m: usize| {
            let f = AxialField::from_fn(l, m, |t| (PI * t / l).cos()).unwrap();
            let d = f.derivative();
            (0..m)
                .map(|i| (d.values()[i] + PI / l * (PI * f.position(i) / l).sin()).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(101) / err(201);
        assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
    }

    #[test]
    fn integrate_and_mean() {
        let f = AxialField::from_fn(4.0, 33, |t| t * t).unwrap();
        assert_relative_eq!(f.integrate(), 64.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(f.mean(), 16.0 / 3.0, max_relative = 1e-12);
    }
}
