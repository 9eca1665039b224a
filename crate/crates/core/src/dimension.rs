//! Dimension-dependent constants: conformal exponents and the coefficients
//! of the Q-curvature and of the Paneitz–Branson operator.
//!
//! Everything here is exact rational arithmetic; conversion to `f64` happens
//! only where a field or a curvature value is evaluated.

use std::fmt;

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

/// Manifold dimension, always at least 5 (every formula divides by n − 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: i64) -> Result<Self> {
        if (5..=i64::from(u16::MAX)).contains(&n) {
            Ok(Dimension(n as u32))
        } else {
            Err(Error::Dimension(n))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    fn as_i64(self) -> i64 {
        i64::from(self.0)
    }

    pub fn exponents(self) -> ConformalExponents {
        ConformalExponents::new(self)
    }

    pub fn coefficients(self) -> PaneitzCoefficients {
        PaneitzCoefficients::new(self)
    }
}

impl TryFrom<i64> for Dimension {
    type Error = Error;

    fn try_from(n: i64) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for i64 {
    fn from(d: Dimension) -> i64 {
        d.as_i64()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Exponents of the conformal change `g_u = u^{4/(n-4)} g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConformalExponents {
    /// 2n/(n−4), the critical Sobolev exponent of the mass term.
    pub critical_exponent: Rational,
    /// 4/(n−4), power of u in the conformal metric.
    pub metric_power: Rational,
    /// (n+4)/(n−4), power of u on the right of the Paneitz–Branson equation.
    pub equation_power: Rational,
    /// (n−4)/n, outer power applied to the mass in the functional.
    pub quotient_power: Rational,
}

impl ConformalExponents {
    pub fn new(n: Dimension) -> Self {
        let n = n.as_i64();
        ConformalExponents {
            critical_exponent: Ratio::new(2 * n, n - 4),
            metric_power: Ratio::new(4, n - 4),
            equation_power: Ratio::new(n + 4, n - 4),
            quotient_power: Ratio::new(n - 4, n),
        }
    }

    pub fn critical(&self) -> f64 {
        to_f64(self.critical_exponent)
    }

    pub fn equation(&self) -> f64 {
        to_f64(self.equation_power)
    }

    pub fn quotient(&self) -> f64 {
        to_f64(self.quotient_power)
    }

    pub fn metric(&self) -> f64 {
        to_f64(self.metric_power)
    }
}

/// Exact coefficients of the Q-curvature and Paneitz–Branson operator.
///
/// ```text
/// Q = −q_lap·ΔR + q_scal·R² − q_ric·|Ric|²
/// P = Δ² − div((a_n R g − ricci_coeff·Ric) d) + Q
/// ```
///
/// `q_ric` is (n−4)/(n−2)²: the normalization in which the operator on the
/// unit round sphere has constant term n(n−4)(n²−4)/16 and the leading
/// coefficient a_n of the gradient term matches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaneitzCoefficients {
    pub a_n: Rational,
    pub ricci_coeff: Rational,
    pub q_lap_coeff: Rational,
    pub q_scal_coeff: Rational,
    pub q_ric_coeff: Rational,
}

impl PaneitzCoefficients {
    pub fn new(n: Dimension) -> Self {
        let n = n.as_i64();
        let (n1, n2, n4) = (n - 1, n - 2, n - 4);
        PaneitzCoefficients {
            a_n: Ratio::new(n2 * n2 + 4, 2 * n1 * n2),
            ricci_coeff: Ratio::new(4, n2),
            q_lap_coeff: Ratio::new(n4, 4 * n1),
            q_scal_coeff: Ratio::new(
                n4 * (n * n * n - 4 * n * n + 16 * n - 16),
                16 * n1 * n1 * n2 * n2,
            ),
            q_ric_coeff: Ratio::new(n4, n2 * n2),
        }
    }

    pub fn a_n(&self) -> f64 {
        to_f64(self.a_n)
    }

    pub fn ricci(&self) -> f64 {
        to_f64(self.ricci_coeff)
    }

    pub fn q_lap(&self) -> f64 {
        to_f64(self.q_lap_coeff)
    }

    pub fn q_scal(&self) -> f64 {
        to_f64(self.q_scal_coeff)
    }

    pub fn q_ric(&self) -> f64 {
        to_f64(self.q_ric_coeff)
    }
}

pub fn exponents(n: i64) -> Result<ConformalExponents> {
    Ok(Dimension::new(n)?.exponents())
}

pub fn coefficients(n: i64) -> Result<PaneitzCoefficients> {
    Ok(Dimension::new(n)?.coefficients())
}

pub(crate) fn to_f64(r: Rational) -> f64 {
    r.to_f64().expect("dimension constants fit in f64")
}
