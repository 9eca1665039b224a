//! Concentrating bubbles u_ε(x) = (2ε³/(ε⁶ + |x|²))^{(n−4)/2} on B_ε, cut
//! off to zero outside B_{2ε}.
//!
//! With s(y) = (2/(1 + y²))^k, k = (n−4)/2, the bubble is
//! u_ε(x) = ε^{−3k}·s(|x|/ε³)·φ(|x|/ε − 1), where φ = 1 − (6x⁵ − 15x⁴ + 10x³)
//! is the quintic smoothstep reversed: C² at both ends of the transition and
//! never negative. Energy and mass are invariant under the scaling, so both
//! are computed for y ↦ s(y)·φ(y/Y − 1) with Y = ε^{−2}; on the core the
//! substitution y = tan θ makes the integrands smooth and bounded.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::fields::RadialField;
use crate::geometry::{curvature, sphere_volume, MetricModel};
use crate::paneitz::QuotientReport;
use crate::quadrature::{simpson_richardson, sphere_area, GaussRule};

const GAUSS_ORDER: usize = 16;
const GAUSS_PANELS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    #[default]
    QuinticSmoothstep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BubbleParams {
    pub epsilon: f64,
    pub n: Dimension,
    #[serde(default)]
    pub smoothing: Smoothing,
}

impl BubbleParams {
    pub fn new(n: Dimension, epsilon: f64) -> Self {
        BubbleParams {
            epsilon,
            n,
            smoothing: Smoothing::QuinticSmoothstep,
        }
    }

    /// Largest admissible ε on a torus: 2ε < min side / 4.
    pub fn epsilon_max(host: &MetricModel) -> Result<f64> {
        match host {
            MetricModel::FlatTorus { side_lengths, .. } => {
                Ok(side_lengths.iter().cloned().fold(f64::INFINITY, f64::min) / 8.0)
            }
            _ => Err(Error::UnsupportedModel(
                "bubbles are hosted on flat tori".into(),
            )),
        }
    }

    pub fn validate(&self, host: &MetricModel) -> Result<()> {
        if host.dimension() != self.n {
            return Err(Error::LayoutMismatch(format!(
                "bubble dimension {} on a {}-manifold",
                self.n,
                host.dimension()
            )));
        }
        let max = Self::epsilon_max(host)?;
        if !(self.epsilon > 0.0 && self.epsilon < max) {
            return Err(Error::Range(format!(
                "epsilon {} outside (0, {max})",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Reversed quintic smoothstep: 1 at x ≤ 0, 0 at x ≥ 1, with its first two
/// derivatives.
pub fn smoothstep_down(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        (1.0, 0.0, 0.0)
    } else if x >= 1.0 {
        (0.0, 0.0, 0.0)
    } else {
        let x2 = x * x;
        let v = 1.0 - x2 * x * (10.0 - 15.0 * x + 6.0 * x2);
        let d1 = -30.0 * x2 * (1.0 - x) * (1.0 - x);
        let d2 = -60.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
        (v, d1, d2)
    }
}

/// Closed-form profile of the standard bubble s and its derivatives.
#[derive(Debug, Clone, Copy)]
pub struct BubbleProfile {
    n: f64,
    k: f64,
}

impl BubbleProfile {
    pub fn new(n: Dimension) -> Self {
        let n = n.as_f64();
        BubbleProfile {
            n,
            k: (n - 4.0) / 2.0,
        }
    }

    /// (s, s′, Δs) at radius y.
    pub fn jet(&self, y: f64) -> (f64, f64, f64) {
        let (n, k) = (self.n, self.k);
        let w = 1.0 + y * y;
        let s = (2.0 / w).powf(k);
        let ds = -2.0 * k * y * s / w;
        let lap = -2f64.powf(k + 1.0) * k * w.powf(-k - 2.0) * (n + 2.0 * y * y);
        (s, ds, lap)
    }

    /// Value of the ε-bubble at |x| = r.
    pub fn value(&self, epsilon: f64, r: f64) -> f64 {
        let e3 = epsilon.powi(3);
        let (s, _, _) = self.jet(r / e3);
        e3.powf(-self.k) * s * smoothstep_down(r / epsilon - 1.0).0
    }

    /// ∫(Δs)² y^{n−1} dy over y = tan θ, θ ∈ [0, θ_max], as a θ-integrand.
    fn energy_integrand(&self, theta: f64) -> f64 {
        let (n, k) = (self.n, self.k);
        let (s, c) = theta.sin_cos();
        let a = 2f64.powf(k + 1.0) * k;
        a * a * c.powf(n - 5.0) * (n * c * c + 2.0 * s * s).powi(2) * s.powf(n - 1.0)
    }

    /// s^{2n/(n−4)} y^{n−1} dy as a θ-integrand.
    fn mass_integrand(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        2f64.powf(self.n) * (s * c).powf(self.n - 1.0)
    }

    /// (Δw)² and w^p on the transition y ∈ [Y, 2Y], w = s·φ(y/Y − 1).
    fn transition_integrands(&self, y: f64, big_y: f64) -> (f64, f64) {
        let (s, ds, lap_s) = self.jet(y);
        let (phi, d1, d2) = smoothstep_down(y / big_y - 1.0);
        let (dphi, ddphi) = (d1 / big_y, d2 / (big_y * big_y));
        let lap_phi = ddphi + (self.n - 1.0) * dphi / y;
        let lap_w = phi * lap_s + 2.0 * ds * dphi + s * lap_phi;
        let w = s * phi;
        let p = 2.0 * self.n / (self.n - 4.0);
        let weight = y.powf(self.n - 1.0);
        (lap_w * lap_w * weight, w.max(0.0).powf(p) * weight)
    }
}

/// Radial samples of u_ε on [0, 2ε].
pub fn bubble(params: BubbleParams, samples: usize) -> Result<RadialField> {
    if !(params.epsilon > 0.0 && params.epsilon.is_finite()) {
        return Err(Error::Range(format!(
            "epsilon {} must be positive",
            params.epsilon
        )));
    }
    let profile = BubbleProfile::new(params.n);
    RadialField::from_fn(params.n, 2.0 * params.epsilon, samples, |r| {
        profile.value(params.epsilon, r)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleReport {
    pub epsilon: f64,
    pub report: QuotientReport,
    /// Euclidean bubble quotient, the ε → 0 limit.
    pub oracle: f64,
    /// (quotient − oracle)/oracle.
    pub rel_err: f64,
    /// Share of the energy carried by the transition annulus B_{2ε} ∖ B_ε.
    pub transition_energy_share: f64,
}

/// ℘(u_ε) on a flat torus (where the metric is exactly Euclidean on B_{2ε}).
pub fn bubble_quotient(params: BubbleParams, host: &MetricModel) -> Result<BubbleReport> {
    params.validate(host)?;
    let n = params.n;
    let profile = BubbleProfile::new(n);
    let big_y = params.epsilon.powi(-2);
    let core = GaussRule::composite(GAUSS_ORDER, GAUSS_PANELS, 0.0, big_y.atan());
    let trans = GaussRule::composite(GAUSS_ORDER, GAUSS_PANELS, big_y, 2.0 * big_y);
    let omega = sphere_area(n.get() - 1);
    let e_core = omega * core.integrate(|t| profile.energy_integrand(t));
    let m_core = omega * core.integrate(|t| profile.mass_integrand(t));
    let e_trans = omega * trans.integrate(|y| profile.transition_integrands(y, big_y).0);
    let m_trans = omega * trans.integrate(|y| profile.transition_integrands(y, big_y).1);
    let energy = e_core + e_trans;
    let report = QuotientReport::from_parts(
        n,
        energy,
        m_core + m_trans,
        host.digest(),
        format!("gauss:{GAUSS_ORDER}x{GAUSS_PANELS}"),
    )?;
    let oracle = euclidean_bubble_quotient(n);
    Ok(BubbleReport {
        epsilon: params.epsilon,
        rel_err: (report.quotient - oracle) / oracle,
        oracle,
        transition_energy_share: e_trans / energy,
        report,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleSweep {
    pub points: Vec<BubbleReport>,
    pub oracle: f64,
    pub tolerance: f64,
    /// Relative error at the smallest ε.
    pub final_rel_err: f64,
    /// Quotients strictly decrease over the last two steps.
    pub decreasing_tail: bool,
    pub passed: bool,
}

/// ε-sweep of bubble quotients; passes when the smallest ε lands within
/// `tolerance` of the Euclidean oracle and the last two steps decrease.
pub fn bubble_sweep(host: &MetricModel, epsilons: &[f64], tolerance: f64) -> Result<BubbleSweep> {
    let n = host.dimension();
    let mut points = epsilons
        .par_iter()
        .map(|&e| bubble_quotient(BubbleParams::new(n, e), host))
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    let oracle = euclidean_bubble_quotient(n);
    let q: Vec<f64> = points.iter().map(|p| p.report.quotient).collect();
    let decreasing_tail = q.len() >= 3 && q[q.len() - 3..].windows(2).all(|w| w[1] < w[0]);
    let final_rel_err = points.last().map_or(f64::NAN, |p| p.rel_err);
    let passed = decreasing_tail && final_rel_err.abs() <= tolerance;
    Ok(BubbleSweep {
        points,
        oracle,
        tolerance,
        final_rel_err,
        decreasing_tail,
        passed,
    })
}

/// ∫|Δs|² / (∫ s^{2n/(n−4)})^{(n−4)/n} over Rⁿ, by Richardson-extrapolated
/// Simpson quadrature in θ = atan|x| on [0, π/2].
pub fn euclidean_bubble_quotient(n: Dimension) -> f64 {
    let profile = BubbleProfile::new(n);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let (e, _) = simpson_richardson(|t| profile.energy_integrand(t), 0.0, half_pi, 4096);
    let (m, _) = simpson_richardson(|t| profile.mass_integrand(t), 0.0, half_pi, 4096);
    let omega = sphere_area(n.get() - 1);
    omega * e / (omega * m).powf(n.exponents().quotient())
}

/// ∫_{Sⁿ} Q dv / vol(Sⁿ)^{(n−4)/n} = Q(Sⁿ)·vol(Sⁿ)^{4/n}.
pub fn sphere_constant_intrinsic(n: Dimension) -> f64 {
    let q = curvature(&MetricModel::sphere(n))
        .map(|k| k.q)
        .unwrap_or(f64::NAN);
    q * sphere_volume(n).powf(4.0 / n.as_f64())
}

/// ∫_{Rⁿ} s^{2n/(n−4)} dx, the ε → 0 limit of the bubble mass.
pub fn euclidean_bubble_mass(n: Dimension) -> f64 {
    let profile = BubbleProfile::new(n);
    let (m, _) = simpson_richardson(
        |t| profile.mass_integrand(t),
        0.0,
        std::f64::consts::FRAC_PI_2,
        4096,
    );
    sphere_area(n.get() - 1) * m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn dim(n: i64) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn torus() -> MetricModel {
        MetricModel::cubic_torus(dim(5), 2.0 * PI).unwrap()
    }

    #[test]
    fn profile_values() {
        let p = BubbleProfile::new(dim(5));
        let eps: f64 = 0.1;
        assert_relative_eq!(
            p.value(eps, 0.0),
            (2.0 / eps.powi(3)).sqrt(),
            max_relative = 1e-14
        );
        let at_eps = (2e-3f64 / (1e-6 + 1e-2)).sqrt();
        assert_relative_eq!(p.value(eps, eps), at_eps, max_relative = 1e-12);
        assert_eq!(p.value(eps, 2.0 * eps), 0.0);
        assert_eq!(p.value(eps, 3.0 * eps), 0.0);
    }

    #[test]
    fn laplacian_jet_matches_finite_differences() {
        for n in [5, 6, 9] {
            let p = BubbleProfile::new(dim(n));
            let y: f64 = 0.8;
            let h = 1e-4;
            let (s, ds, lap) = p.jet(y);
            let (sp, _, _) = p.jet(y + h);
            let (sm, _, _) = p.jet(y - h);
            assert_relative_eq!(ds, (sp - sm) / (2.0 * h), max_relative = 1e-7);
            let fd = (sp - 2.0 * s + sm) / (h * h) + (n as f64 - 1.0) * (sp - sm) / (2.0 * h * y);
            assert_relative_eq!(lap, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn smoothstep_is_c2_and_in_range() {
        assert_eq!(smoothstep_down(0.0), (1.0, 0.0, 0.0));
        assert_eq!(smoothstep_down(1.0), (0.0, 0.0, 0.0));
        for i in 0..=100 {
            let (v, _, _) = smoothstep_down(i as f64 / 100.0);
            assert!((0.0..=1.0).contains(&v));
        }
        let (_, d1, d2) = smoothstep_down(1e-9);
        assert!(d1.abs() < 1e-12 && d2.abs() < 1e-6);
    }

    #[test]
    fn sphere_two_oracles_agree() {
        for n in 5..=10 {
            let a = euclidean_bubble_quotient(dim(n));
            let b = sphere_constant_intrinsic(dim(n));
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
        assert_relative_eq!(
            euclidean_bubble_quotient(dim(5)),
            102.38327344058294,
            max_relative = 1e-10
        );
        assert_relative_eq!(
            euclidean_bubble_quotient(dim(6)),
            247.2844473661602,
            max_relative = 1e-10
        );
    }

    #[test]
    fn mass_tends_to_euclidean_limit() {
        let full = euclidean_bubble_mass(dim(5));
        let mut last = f64::INFINITY;
        for eps in [0.4, 0.2, 0.1, 0.05] {
            let r = bubble_quotient(BubbleParams::new(dim(5), eps), &torus()).unwrap();
            let gap = (full - r.report.mass).abs() / full;
            assert!(gap < last);
            last = gap;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn sweep_decreases_toward_the_oracle() {
        let s = bubble_sweep(&torus(), &[0.4, 0.2, 0.1, 0.05, 0.025], 0.02).unwrap();
        assert!(s
            .points
            .iter()
            .all(|p| p.report.quotient.is_finite() && p.report.quotient > s.oracle));
        assert!(s.decreasing_tail);
        assert!(s.passed, "final rel err {}", s.final_rel_err);
    }

    #[test]
    fn epsilon_range_is_enforced() {
        assert!(matches!(
            bubble_quotient(BubbleParams::new(dim(5), 0.9), &torus()),
            Err(Error::Range(_))
        ));
        assert!(bubble_quotient(BubbleParams::new(dim(5), -0.1), &torus()).is_err());
        let sphere = MetricModel::sphere(dim(5));
        assert!(matches!(
            bubble_quotient(BubbleParams::new(dim(5), 0.1), &sphere),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn sampled_profile() {
        let f = bubble(BubbleParams::new(dim(5), 0.2), 257).unwrap();
        assert_relative_eq!(f.r_max(), 0.4);
        assert_relative_eq!(f.values()[0], (2.0f64 / 0.008).sqrt(), max_relative = 1e-14);
        assert_eq!(*f.values().last().unwrap(), 0.0);
        assert!(f.values().iter().all(|v| *v >= 0.0));
    }
}
