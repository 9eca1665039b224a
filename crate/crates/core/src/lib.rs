//! Numerical workbench for fourth-order conformal geometry.
//!
//! The crate computes the Q-curvature and the Paneitz–Branson operator on a
//! handful of model manifolds (round sphere, flat torus, round cylinder),
//! discretizes test functions on periodic grids and radial/axial profiles,
//! and evaluates the Paneitz functional
//!
//! ```text
//!            ∫ u P[g] u dv
//!   ℘(u) = ─────────────────────────────
//!          (∫ u^{2n/(n-4)} dv)^{(n-4)/n}
//! ```
//!
//! on the test-function families used to bracket Paneitz constants: bubbles,
//! cutoffs, connected-sum splittings and cylinder slices.

pub mod constructions;
pub mod dimension;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod paneitz;
pub mod quadrature;

pub use dimension::{ConformalExponents, Dimension, PaneitzCoefficients, Rational};
pub use error::{Error, Result};
pub use fields::{AxialField, GridField, GridSpec, RadialField, ScalarField, TrigField, TrigTerm};
pub use geometry::{CurvatureData, MetricModel};
pub use paneitz::{LowerBoundConstants, QuotientReport};
