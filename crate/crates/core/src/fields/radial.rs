use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::quadrature::{simpson, sphere_area};

pub const MIN_RADIAL_SAMPLES: usize = 64;

/// Radially symmetric function on the ball B_{r_max} ⊂ Rⁿ, sampled at
/// r_i = i·r_max/(samples − 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RadialFieldRaw", into = "RadialFieldRaw")]
pub struct RadialField {
    n: Dimension,
    r_max: f64,
    values: Vec<f64>,
    even_extension: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RadialFieldRaw {
    n: Dimension,
    r_max: f64,
    values: Vec<f64>,
    #[serde(default = "default_true")]
    even_extension: bool,
}

fn default_true() -> bool {
    true
}

impl TryFrom<RadialFieldRaw> for RadialField {
    type Error = Error;

    fn try_from(raw: RadialFieldRaw) -> Result<Self> {
        let mut f = RadialField::new(raw.n, raw.r_max, raw.values)?;
        f.even_extension = raw.even_extension;
        Ok(f)
    }
}

impl From<RadialField> for RadialFieldRaw {
    fn from(f: RadialField) -> Self {
        RadialFieldRaw {
            n: f.n,
            r_max: f.r_max,
            values: f.values,
            even_extension: f.even_extension,
        }
    }
}

impl RadialField {
    pub fn new(n: Dimension, r_max: f64, values: Vec<f64>) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::Range(format!("r_max = {r_max} must be positive")));
        }
        if values.len() < MIN_RADIAL_SAMPLES {
            return Err(Error::Range(format!(
                "{} radial samples, need at least {MIN_RADIAL_SAMPLES}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("radial values must be finite".into()));
        }
        Ok(RadialField {
            n,
            r_max,
            values,
            even_extension: true,
        })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(
        n: Dimension,
        r_max: f64,
        samples: usize,
        f: F,
    ) -> Result<Self> {
        let h = r_max / (samples.max(2) - 1) as f64;
        Self::new(n, r_max, (0..samples).map(|i| f(i as f64 * h)).collect())
    }

    /// Switches the origin treatment from the even extension f(−r) = f(r) to
    /// a one-sided second derivative.
    pub fn without_even_extension(mut self) -> Self {
        self.even_extension = false;
        self
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / (self.values.len() - 1) as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    fn with_values(&self, values: Vec<f64>) -> RadialField {
        RadialField {
            n: self.n,
            r_max: self.r_max,
            values,
            even_extension: self.even_extension,
        }
    }

    fn first_derivative(&self) -> Vec<f64> {
        let v = &self.values;
        let h = self.spacing();
        let last = v.len() - 1;
        (0..=last)
            .map(|i| {
                if i == 0 {
                    if self.even_extension {
                        0.0
                    } else {
                        (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
                    }
                } else if i == last {
                    (3.0 * v[last] - 4.0 * v[last - 1] + v[last - 2]) / (2.0 * h)
                } else {
                    (v[i + 1] - v[i - 1]) / (2.0 * h)
                }
            })
            .collect()
    }

    fn second_derivative(&self) -> Vec<f64> {
        let v = &self.values;
        let h2 = self.spacing().powi(2);
        let last = v.len() - 1;
        (0..=last)
            .map(|i| {
                if i == 0 {
                    if self.even_extension {
                        2.0 * (v[1] - v[0]) / h2
                    } else {
                        (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2
                    }
                } else if i == last {
                    (2.0 * v[last] - 5.0 * v[last - 1] + 4.0 * v[last - 2] - v[last - 3]) / h2
                } else {
                    (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2
                }
            })
            .collect()
    }

    /// f″ + (n−1)f′/r, with Δf(0) = n·f″(0).
    pub fn laplacian(&self) -> RadialField {
        let d1 = self.first_derivative();
        let d2 = self.second_derivative();
        let n = self.n.as_f64();
        let values = (0..self.values.len())
            .map(|i| {
                if i == 0 {
                    n * d2[0]
                } else {
                    d2[i] + (n - 1.0) * d1[i] / self.radius(i)
                }
            })
            .collect();
        self.with_values(values)
    }

    pub fn bilaplacian(&self) -> RadialField {
        self.laplacian().laplacian()
    }

    pub fn gradient_sq(&self) -> RadialField {
        self.with_values(self.first_derivative().into_iter().map(|d| d * d).collect())
    }

    /// ω_{n−1} ∫₀^{r_max} f(r) r^{n−1} dr by composite Simpson.
    pub fn integrate(&self) -> f64 {
        let n = self.n.get();
        let weighted: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.radius(i).powi(n as i32 - 1))
            .collect();
        sphere_area(n - 1) * simpson(&weighted, self.spacing())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> RadialField {
        self.with_values(self.values.iter().map(|v| f(*v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::ball_volume;
    use approx::assert_relative_eq;

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(RadialField::new(dim(5), 1.0, vec![0.0; 10]).is_err());
        assert!(RadialField::new(dim(5), 0.0, vec![0.0; 64]).is_err());
        assert!(RadialField::new(dim(5), 1.0, vec![f64::NAN; 64]).is_err());
    }

    #[test]
    fn laplacian_of_r_squared_is_2n() {
        for n in [5, 6, 9] {
            let f = RadialField::from_fn(dim(n), 2.0, 201, |r| r * r).unwrap();
            let lap = f.laplacian();
            for (i, v) in lap.values().iter().enumerate() {
                assert_relative_eq!(*v, 2.0 * n as f64, max_relative = 1e-9, epsilon = 1e-9);
                let _ = i;
            }
        }
    }

    #[test]
    fn bilaplacian_of_r4_smoke() {
        // Δr⁴ = 4(n+2) r², Δ²r⁴ = 8n(n+2): 280 in five dimensions.
        let f = RadialField::from_fn(dim(5), 1.0, 401, |r| r.powi(4)).unwrap();
        let bil = f.bilaplacian();
        let v = bil.values();
        for x in &v[5..v.len() - 5] {
            assert_relative_eq!(*x, 280.0, max_relative = 1e-3);
        }
    }

    #[test]
    fn unit_ball_volume() {
        let one = RadialField::from_fn(dim(5), 1.0, 129, |_| 1.0).unwrap();
        assert_relative_eq!(one.integrate(), ball_volume(5), max_relative = 1e-8);
    }

    #[test]
    fn gradient_of_r() {
        let f = RadialField::from_fn(dim(5), 1.0, 101, |r| r)
            .unwrap()
            .without_even_extension();
        for v in &f.gradient_sq().values()[1..] {
            assert_relative_eq!(*v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn laplacian_second_order() {
        let err = |samples: usize| {
            let f = RadialField::from_fn(dim(5), 1.0, samples, |r| (r * r).cos()).unwrap();
            let lap = f.laplacian();
            (0..samples - 1)
                .map(|i| {
                    let r = f.radius(i);
                    let exact = -2.0 * 5.0 * (r * r).sin() - 4.0 * r * r * (r * r).cos();
                    (lap.values()[i] - exact).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(101) / err(201);
        assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
    }
}
