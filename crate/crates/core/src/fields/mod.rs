//! Discretized scalar fields: periodic n-dimensional grids, radial profiles
//! and cylinder axial profiles, together with their difference stencils and
//! quadrature.
//!
//! Grid stencils are second-order centered differences with periodic wrap;
//! the bilaplacian is the Laplacian stencil applied twice, so both are
//! symmetric and Σ f·Δ²f = Σ (Δf)² holds to roundoff.

mod axial;
mod grid;
mod radial;
mod trig;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use axial::{AxialField, MIN_AXIAL_SAMPLES};
pub use grid::{GridField, GridSpec, DEFAULT_POINT_BUDGET, MIN_POINTS_PER_AXIS};
pub use radial::{RadialField, MIN_RADIAL_SAMPLES};
pub use trig::{TrigField, TrigKind, TrigTerm};

use crate::dimension::{to_f64, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layout", content = "data", rename_all = "snake_case")]
pub enum ScalarField {
    PeriodicGrid(GridField),
    RadialProfile(RadialField),
    AxialProfile(AxialField),
}

impl From<GridField> for ScalarField {
    fn from(f: GridField) -> Self {
        ScalarField::PeriodicGrid(f)
    }
}

impl From<RadialField> for ScalarField {
    fn from(f: RadialField) -> Self {
        ScalarField::RadialProfile(f)
    }
}

impl From<AxialField> for ScalarField {
    fn from(f: AxialField) -> Self {
        ScalarField::AxialProfile(f)
    }
}

impl ScalarField {
    pub fn values(&self) -> &[f64] {
        match self {
            ScalarField::PeriodicGrid(f) => f.values(),
            ScalarField::RadialProfile(f) => f.values(),
            ScalarField::AxialProfile(f) => f.values(),
        }
    }

    pub fn layout_name(&self) -> &'static str {
        match self {
            ScalarField::PeriodicGrid(_) => "periodic_grid",
            ScalarField::RadialProfile(_) => "radial_profile",
            ScalarField::AxialProfile(_) => "axial_profile",
        }
    }

    pub fn as_grid(&self) -> Option<&GridField> {
        match self {
            ScalarField::PeriodicGrid(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_radial(&self) -> Option<&RadialField> {
        match self {
            ScalarField::RadialProfile(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_axial(&self) -> Option<&AxialField> {
        match self {
            ScalarField::AxialProfile(f) => Some(f),
            _ => None,
        }
    }

    /// Grid: periodic second differences. Radial: f″ + (n−1)f′/r.
    /// Axial: f″ along the cylinder axis.
    pub fn laplacian(&self) -> ScalarField {
        match self {
            ScalarField::PeriodicGrid(f) => f.laplacian().into(),
            ScalarField::RadialProfile(f) => f.laplacian().into(),
            ScalarField::AxialProfile(f) => f.second_derivative().into(),
        }
    }

    pub fn bilaplacian(&self) -> ScalarField {
        self.laplacian().laplacian()
    }

    pub fn gradient_sq(&self) -> ScalarField {
        match self {
            ScalarField::PeriodicGrid(f) => f.gradient_sq().into(),
            ScalarField::RadialProfile(f) => f.gradient_sq().into(),
            ScalarField::AxialProfile(f) => f.derivative().map(|d| d * d).into(),
        }
    }

    /// Grid: Riemann sum. Radial: ω_{n−1}∫ f r^{n−1} dr. Axial: ∫ f dt.
    pub fn integrate(&self) -> f64 {
        match self {
            ScalarField::PeriodicGrid(f) => f.integrate(),
            ScalarField::RadialProfile(f) => f.integrate(),
            ScalarField::AxialProfile(f) => f.integrate(),
        }
    }

    pub fn map<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> ScalarField {
        match self {
            ScalarField::PeriodicGrid(g) => g.map(f).into(),
            ScalarField::RadialProfile(g) => g.map(f).into(),
            ScalarField::AxialProfile(g) => g.map(f).into(),
        }
    }

    /// ∫ f^p, before the outer (n−4)/n power of the functional.
    pub fn lp_mass(&self, p: Rational) -> Result<f64> {
        Ok(self.power(p)?.integrate())
    }

    pub(crate) fn power(&self, p: Rational) -> Result<ScalarField> {
        if p.is_integer() {
            let k = *p.numer() as i32;
            Ok(self.map(|v| v.powi(k)))
        } else {
            if self.values().iter().any(|v| *v < 0.0) {
                return Err(Error::Domain(format!(
                    "negative values raised to the fractional power {p}"
                )));
            }
            let pf = to_f64(p);
            Ok(self.map(|v| v.powf(pf)))
        }
    }

    pub fn min_value(&self) -> f64 {
        self.values().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV export. Grid rows are `i0,…,i{n−1},value` in storage order
    /// (row-major, axis 0 slowest); radial rows `r,value`; axial rows
    /// `t,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match self {
            ScalarField::PeriodicGrid(f) => {
                let spec = f.spec();
                let dim = spec.dimension().get();
                let mut header: Vec<String> = (0..dim).map(|a| format!("i{a}")).collect();
                header.push("value".into());
                w.write_record(&header)?;
                for (idx, v) in f.values().iter().enumerate() {
                    let mut rec: Vec<String> = (0..dim)
                        .map(|a| spec.axis_index(idx, a).to_string())
                        .collect();
                    rec.push(format_float(*v));
                    w.write_record(&rec)?;
                }
            }
            ScalarField::RadialProfile(f) => {
                w.write_record(["r", "value"])?;
                for (i, v) in f.values().iter().enumerate() {
                    w.write_record([format_float(f.radius(i)), format_float(*v)])?;
                }
            }
            ScalarField::AxialProfile(f) => {
                w.write_record(["t", "value"])?;
                for (i, v) in f.values().iter().enumerate() {
                    w.write_record([format_float(f.position(i)), format_float(*v)])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Splits |∇f|² on the cylinder [0, l] × S^{n−1} into its axial part (f′)²
/// and its spherical part, which vanishes for t-only profiles.
pub fn gradient_split_cylinder(f: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    match f {
        ScalarField::AxialProfile(a) => {
            let axial = a.derivative().map(|d| d * d);
            let spherical = a.map(|_| 0.0);
            Ok((axial.into(), spherical.into()))
        }
        other => Err(Error::UnsupportedLayout(format!(
            "{} is not an axisymmetric cylinder profile",
            other.layout_name()
        ))),
    }
}

/// Reads a grid field written by [`ScalarField::write_csv`]; the index
/// columns must appear in storage order.
pub fn read_grid_csv<R: std::io::Read>(spec: GridSpec, input: R) -> Result<GridField> {
    let mut rdr = csv::Reader::from_reader(input);
    let dim = spec.dimension().get();
    let mut values = Vec::with_capacity(spec.len());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != dim + 1 {
            return Err(Error::LayoutMismatch(format!(
                "row {row} has {} columns",
                rec.len()
            )));
        }
        for a in 0..dim {
            let idx: usize = rec[a]
                .parse()
                .map_err(|_| Error::Io(format!("row {row}: bad index")))?;
            if idx != spec.axis_index(row, a) {
                return Err(Error::LayoutMismatch(format!(
                    "row {row} out of storage order"
                )));
            }
        }
        let v: f64 = rec[dim]
            .parse()
            .map_err(|_| Error::Io(format!("row {row}: bad value")))?;
        values.push(v);
    }
    GridField::new(spec, values)
}

/// Shortest round-trip decimal representation; independent of locale.
pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}
