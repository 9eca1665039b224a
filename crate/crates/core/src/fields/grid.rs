use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::quadrature::{pairwise_sum, sum_indexed};

pub const DEFAULT_POINT_BUDGET: usize = 2_000_000;
pub const MIN_POINTS_PER_AXIS: usize = 8;

/// Periodic tensor grid on a flat torus. Storage is row-major with axis 0
/// slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpecRaw", into = "GridSpecRaw")]
pub struct GridSpec {
    n: Dimension,
    points_per_axis: usize,
    side_lengths: Vec<f64>,
    strides: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpecRaw {
    n: Dimension,
    points_per_axis: usize,
    side_lengths: Vec<f64>,
}

impl TryFrom<GridSpecRaw> for GridSpec {
    type Error = Error;

    fn try_from(raw: GridSpecRaw) -> Result<Self> {
        GridSpec::new(raw.n, raw.points_per_axis, raw.side_lengths)
    }
}

impl From<GridSpec> for GridSpecRaw {
    fn from(g: GridSpec) -> Self {
        GridSpecRaw {
            n: g.n,
            points_per_axis: g.points_per_axis,
            side_lengths: g.side_lengths,
        }
    }
}

impl GridSpec {
    pub fn new(n: Dimension, points_per_axis: usize, side_lengths: Vec<f64>) -> Result<Self> {
        Self::with_budget(n, points_per_axis, side_lengths, DEFAULT_POINT_BUDGET)
    }

    pub fn cube(n: Dimension, points_per_axis: usize, side: f64) -> Result<Self> {
        Self::new(n, points_per_axis, vec![side; n.get()])
    }

    pub fn with_budget(
        n: Dimension,
        points_per_axis: usize,
        side_lengths: Vec<f64>,
        budget: usize,
    ) -> Result<Self> {
        if points_per_axis < MIN_POINTS_PER_AXIS {
            return Err(Error::Range(format!(
                "points_per_axis = {points_per_axis}, need at least {MIN_POINTS_PER_AXIS}"
            )));
        }
        if side_lengths.len() != n.get() {
            return Err(Error::LayoutMismatch(format!(
                "{} side lengths for a {n}-dimensional grid",
                side_lengths.len()
            )));
        }
        if side_lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::Range(
                "side lengths must be positive and finite".into(),
            ));
        }
        let points = points_per_axis
            .checked_pow(n.get() as u32)
            .filter(|p| *p <= budget)
            .ok_or(Error::Budget {
                points: points_per_axis.saturating_pow(n.get() as u32),
                budget,
            })?;
        let _ = points;
        let dim = n.get();
        let mut strides = vec![1; dim];
        for a in (0..dim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * points_per_axis;
        }
        Ok(GridSpec {
            n,
            points_per_axis,
            side_lengths,
            strides,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn side_lengths(&self) -> &[f64] {
        &self.side_lengths
    }

    pub fn len(&self) -> usize {
        self.strides[0] * self.points_per_axis
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.side_lengths[axis] / self.points_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.n.get()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.side_lengths.iter().product()
    }

    pub fn min_side(&self) -> f64 {
        self.side_lengths
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    #[inline]
    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.points_per_axis
    }

    /// Physical coordinates of a flat index.
    pub fn position(&self, idx: usize) -> Vec<f64> {
        (0..self.n.get())
            .map(|a| self.axis_index(idx, a) as f64 * self.spacing(a))
            .collect()
    }

    /// Neighbor indices one step forward and backward along `axis`, wrapping.
    #[inline]
    pub fn neighbors(&self, idx: usize, axis: usize) -> (usize, usize) {
        let s = self.strides[axis];
        let k = self.points_per_axis;
        let c = (idx / s) % k;
        let plus = if c + 1 == k { idx + s - k * s } else { idx + s };
        let minus = if c == 0 { idx + (k - 1) * s } else { idx - s };
        (plus, minus)
    }

    /// Squared distance on the torus (minimum image) between a grid point and
    /// an arbitrary point.
    pub fn periodic_distance_sq(&self, idx: usize, center: &[f64]) -> f64 {
        (0..self.n.get())
            .map(|a| {
                let l = self.side_lengths[a];
                let x = self.axis_index(idx, a) as f64 * self.spacing(a);
                let mut d = (x - center[a]).rem_euclid(l);
                if d > 0.5 * l {
                    d = l - d;
                }
                d * d
            })
            .sum()
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.n == other.n
            && self.points_per_axis == other.points_per_axis
            && self.side_lengths == other.side_lengths
    }
}

/// Real values on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridFieldRaw", into = "GridFieldRaw")]
pub struct GridField {
    spec: GridSpec,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFieldRaw {
    spec: GridSpec,
    values: Vec<f64>,
}

impl TryFrom<GridFieldRaw> for GridField {
    type Error = Error;

    fn try_from(raw: GridFieldRaw) -> Result<Self> {
        GridField::new(raw.spec, raw.values)
    }
}

impl From<GridField> for GridFieldRaw {
    fn from(f: GridField) -> Self {
        GridFieldRaw {
            spec: f.spec,
            values: f.values,
        }
    }
}

impl GridField {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::LayoutMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("grid values must be finite".into()));
        }
        Ok(GridField { spec, values })
    }

    pub fn constant(spec: &GridSpec, value: f64) -> Self {
        GridField {
            spec: spec.clone(),
            values: vec![value; spec.len()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn<F>(spec: &GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Sync + Send,
    {
        let values = (0..spec.len())
            .into_par_iter()
            .map(|i| f(&spec.position(i)))
            .collect();
        GridField {
            spec: spec.clone(),
            values,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn stencil<F>(&self, f: F) -> GridField
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        let values = (0..self.values.len()).into_par_iter().map(f).collect();
        GridField {
            spec: self.spec.clone(),
            values,
        }
    }

    /// Centered second difference summed over axes, periodic wrap.
    pub fn laplacian(&self) -> GridField {
        let dim = self.spec.n.get();
        let inv_h2: Vec<f64> = (0..dim).map(|a| self.spec.spacing(a).powi(-2)).collect();
        let v = &self.values;
        self.stencil(|i| {
            let c = v[i];
            let mut acc = 0.0;
            for (a, w) in inv_h2.iter().enumerate() {
                let (p, m) = self.spec.neighbors(i, a);
                acc += (v[p] - 2.0 * c + v[m]) * w;
            }
            acc
        })
    }

    pub fn bilaplacian(&self) -> GridField {
        self.laplacian().laplacian()
    }

    /// Centered second difference along one axis.
    pub fn second_difference(&self, axis: usize) -> GridField {
        let w = self.spec.spacing(axis).powi(-2);
        let v = &self.values;
        self.stencil(|i| {
            let (p, m) = self.spec.neighbors(i, axis);
            (v[p] - 2.0 * v[i] + v[m]) * w
        })
    }

    /// Centered first difference along one axis.
    pub fn first_difference(&self, axis: usize) -> GridField {
        let w = 0.5 / self.spec.spacing(axis);
        let v = &self.values;
        self.stencil(|i| {
            let (p, m) = self.spec.neighbors(i, axis);
            (v[p] - v[m]) * w
        })
    }

    /// |∇f|² from centered first differences.
    pub fn gradient_sq(&self) -> GridField {
        let dim = self.spec.n.get();
        let w: Vec<f64> = (0..dim).map(|a| 0.5 / self.spec.spacing(a)).collect();
        let v = &self.values;
        self.stencil(|i| {
            let mut acc = 0.0;
            for (a, wa) in w.iter().enumerate() {
                let (p, m) = self.spec.neighbors(i, a);
                let d = (v[p] - v[m]) * wa;
                acc += d * d;
            }
            acc
        })
    }

    /// Riemann sum Σ f · cell volume.
    pub fn integrate(&self) -> f64 {
        pairwise_sum(&self.values) * self.spec.cell_volume()
    }

    /// Discrete L² pairing Σ f·g · cell volume.
    pub fn dot(&self, other: &GridField) -> Result<f64> {
        self.check_same(other)?;
        let (a, b) = (&self.values, &other.values);
        Ok(sum_indexed(a.len(), |i| a[i] * b[i]) * self.spec.cell_volume())
    }

    pub fn map<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> GridField {
        GridField {
            spec: self.spec.clone(),
            values: self.values.par_iter().map(|v| f(*v)).collect(),
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64 + Sync + Send>(
        &self,
        other: &GridField,
        f: F,
    ) -> Result<GridField> {
        self.check_same(other)?;
        let values = self
            .values
            .par_iter()
            .zip(other.values.par_iter())
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(GridField {
            spec: self.spec.clone(),
            values,
        })
    }

    pub fn check_same(&self, other: &GridField) -> Result<()> {
        if self.spec.same_as(&other.spec) {
            Ok(())
        } else {
            Err(Error::LayoutMismatch(
                "grid fields live on different grids".into(),
            ))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Values as little-endian f64 bytes in storage order.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    pub fn from_le_bytes(spec: GridSpec, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != spec.len() * 8 {
            return Err(Error::LayoutMismatch(format!(
                "{} bytes for a grid of {} points",
                bytes.len(),
                spec.len()
            )));
        }
        let values = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        GridField::new(spec, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn budget_and_minimum_resolution() {
        assert!(GridSpec::cube(dim(5), 16, 2.0 * PI).is_ok());
        assert!(matches!(
            GridSpec::cube(dim(5), 64, 2.0 * PI),
            Err(Error::Budget { .. })
        ));
        assert!(matches!(
            GridSpec::cube(dim(5), 4, 2.0 * PI),
            Err(Error::Range(_))
        ));
        assert!(GridSpec::new(dim(5), 8, vec![1.0; 4]).is_err());
        assert!(GridSpec::new(dim(5), 8, vec![1.0, 1.0, 1.0, 1.0, -1.0]).is_err());
    }

    #[test]
    fn row_major_layout() {
        let spec = GridSpec::cube(dim(5), 8, 8.0).unwrap();
        assert_eq!(spec.stride(0), 8usize.pow(4));
        assert_eq!(spec.stride(4), 1);
        let idx = 3 * spec.stride(0) + 5 * spec.stride(4);
        assert_eq!(spec.position(idx), vec![3.0, 0.0, 0.0, 0.0, 5.0]);
        let (p, m) = spec.neighbors(7, 4);
        assert_eq!((p, m), (0, 6));
    }

    #[test]
    fn constant_is_annihilated() {
        let spec = GridSpec::cube(dim(5), 8, 2.0 * PI).unwrap();
        let f = GridField::constant(&spec, 3.25);
        assert!(f.laplacian().values().iter().all(|v| *v == 0.0));
        assert!(f.bilaplacian().values().iter().all(|v| *v == 0.0));
        assert!(f.gradient_sq().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn cosine_mode_eigenvalues() {
        let spec = GridSpec::cube(dim(5), 16, 2.0 * PI).unwrap();
        let h = spec.spacing(0);
        let c_h = (2.0 - 2.0 * h.cos()) / (h * h);
        let f = GridField::from_fn(&spec, |x| x[0].cos());
        let lap = f.laplacian();
        let bil = f.bilaplacian();
        for i in (0..spec.len()).step_by(997) {
            let fx = f.values()[i];
            assert_relative_eq!(lap.values()[i], -c_h * fx, epsilon = 1e-12);
            assert_relative_eq!(bil.values()[i], c_h * c_h * fx, epsilon = 1e-12);
        }
        let s = GridField::from_fn(&spec, |x| x[0].sin());
        let s_h = h.sin() / h;
        let g = s.gradient_sq();
        for i in (0..spec.len()).step_by(991) {
            let x0 = spec.position(i)[0];
            assert_relative_eq!(g.values()[i], s_h * s_h * x0.cos().powi(2), epsilon = 1e-12);
        }
    }

    #[test]
    fn integrals() {
        let spec = GridSpec::cube(dim(5), 16, 2.0 * PI).unwrap();
        let one = GridField::constant(&spec, 1.0);
        assert_relative_eq!(one.integrate(), (2.0 * PI).powi(5), max_relative = 1e-12);
        let c = GridField::from_fn(&spec, |x| x[0].cos());
        assert!(c.integrate().abs() < 1e-9);
    }

    #[test]
    fn bytes_roundtrip() {
        let spec = GridSpec::cube(dim(5), 8, 1.0).unwrap();
        let f = GridField::from_fn(&spec, |x| x[1] - x[3] * 0.5);
        let g = GridField::from_le_bytes(spec.clone(), &f.to_le_bytes()).unwrap();
        assert_eq!(f, g);
        assert!(GridField::from_le_bytes(spec, &[0u8; 16]).is_err());
    }
}
