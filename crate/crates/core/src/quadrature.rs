//! Reductions and quadrature rules shared by the field and construction
//! modules.

use std::f64::consts::PI;

use rayon::prelude::*;
use statrs::function::gamma::gamma;

const PAIRWISE_BLOCK: usize = 128;
const PARALLEL_SPLIT: usize = 1 << 15;

/// Pairwise summation with fixed split points, so the result does not depend
/// on the rayon schedule.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    let (lo, hi) = values.split_at(mid);
    if values.len() >= PARALLEL_SPLIT {
        let (a, b) = rayon::join(|| pairwise_sum(lo), || pairwise_sum(hi));
        a + b
    } else {
        pairwise_sum(lo) + pairwise_sum(hi)
    }
}

/// Deterministic parallel map-then-sum over `0..len`.
pub fn sum_indexed<F>(len: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let terms: Vec<f64> = (0..len).into_par_iter().map(f).collect();
    pairwise_sum(&terms)
}

/// Area of the unit sphere S^m ⊂ R^{m+1}: 2π^{(m+1)/2}/Γ((m+1)/2).
pub fn sphere_area(m: usize) -> f64 {
    let half = (m as f64 + 1.0) / 2.0;
    2.0 * PI.powf(half) / gamma(half)
}

/// Volume of the unit ball in R^n.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n - 1) / n as f64
}

/// Composite Simpson rule on equally spaced samples. An odd number of
/// intervals closes with Simpson's 3/8 rule on the last three.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let m = values.len();
    match m {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        4 => 3.0 * h / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]),
        _ => {
            let intervals = m - 1;
            if intervals.is_multiple_of(2) {
                simpson_even(values, h)
            } else {
                let split = m - 3;
                simpson_even(&values[..split], h)
                    + 3.0 * h / 8.0
                        * (values[split - 1]
                            + 3.0 * values[split]
                            + 3.0 * values[split + 1]
                            + values[split + 2])
            }
        }
    }
}

fn simpson_even(values: &[f64], h: f64) -> f64 {
    let last = values.len() - 1;
    let mut odd = Vec::with_capacity(last / 2);
    let mut even = Vec::with_capacity(last / 2);
    for (i, v) in values.iter().enumerate().take(last).skip(1) {
        if i % 2 == 1 {
            odd.push(*v);
        } else {
            even.push(*v);
        }
    }
    h / 3.0 * (values[0] + values[last] + 4.0 * pairwise_sum(&odd) + 2.0 * pairwise_sum(&even))
}

/// Composite Simpson of a function on [a, b] with `intervals` (rounded up to
/// even) subintervals.
pub fn simpson_fn<F: Fn(f64) -> f64 + Sync>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let m = intervals.max(2) + intervals % 2;
    let h = (b - a) / m as f64;
    let values: Vec<f64> = (0..=m)
        .into_par_iter()
        .map(|i| f(a + i as f64 * h))
        .collect();
    simpson(&values, h)
}

/// Simpson with one Richardson step: (16 S(h/2) − S(h)) / 15.
/// Returns the extrapolated value and |S(h/2) − S(h)| as an error indicator.
pub fn simpson_richardson<F: Fn(f64) -> f64 + Sync>(
    f: F,
    a: f64,
    b: f64,
    intervals: usize,
) -> (f64, f64) {
    let coarse = simpson_fn(&f, a, b, intervals);
    let fine = simpson_fn(&f, a, b, 2 * intervals);
    ((16.0 * fine - coarse) / 15.0, (fine - coarse).abs())
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order as f64;
    for i in 0..order.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m.
        let mut x = (PI * (i as f64 + 0.75) / (m + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let m = order as f64;
    let dp = m * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule mapped to [a, b].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize, a: f64, b: f64) -> Self {
        Self::composite(order, 1, a, b)
    }

    /// `panels` equal panels, each with an `order`-point rule.
    pub fn composite(order: usize, panels: usize, a: f64, b: f64) -> Self {
        let (x, w) = gauss_legendre(order);
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for p in 0..panels {
            let lo = a + p as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(lo + 0.5 * width * (xi + 1.0));
                weights.push(0.5 * width * wi);
            }
        }
        GaussRule { nodes, weights }
    }

    pub fn integrate<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .map(|(x, w)| w * f(*x))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Product quadrature on the unit sphere S^{n−1} ⊂ R^n in hyperspherical
/// angles: Gauss–Legendre in each polar angle (weight sin^k folded into the
/// weights) and the trapezoid rule in the azimuth.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub directions: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(n: usize, polar_order: usize) -> Self {
        assert!(n >= 2);
        let polar = GaussRule::new(polar_order, 0.0, PI);
        let azimuth_count = 2 * polar_order;
        let mut directions = vec![vec![1.0_f64; 0]];
        let mut weights = vec![1.0];
        // Polar angles φ_1..φ_{n−2} carry weights sin^{n−1−j}(φ_j).
        for j in 1..=n.saturating_sub(2) {
            let power = (n - 1 - j) as i32;
            let mut next_dirs = Vec::with_capacity(directions.len() * polar_order);
            let mut next_w = Vec::with_capacity(directions.len() * polar_order);
            for (d, w) in directions.iter().zip(&weights) {
                for (phi, pw) in polar.nodes.iter().zip(&polar.weights) {
                    let mut nd = d.clone();
                    nd.push(*phi);
                    next_dirs.push(nd);
                    next_w.push(w * pw * phi.sin().powi(power));
                }
            }
            directions = next_dirs;
            weights = next_w;
        }
        let dtheta = 2.0 * PI / azimuth_count as f64;
        let mut out_dirs = Vec::with_capacity(directions.len() * azimuth_count);
        let mut out_w = Vec::with_capacity(directions.len() * azimuth_count);
        for (angles, w) in directions.iter().zip(&weights) {
            for a in 0..azimuth_count {
                let theta = (a as f64 + 0.5) * dtheta;
                out_dirs.push(angles_to_unit_vector(angles, theta));
                out_w.push(w * dtheta);
            }
        }
        SphereRule {
            directions: out_dirs,
            weights: out_w,
        }
    }
}

fn angles_to_unit_vector(polar: &[f64], azimuth: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(polar.len() + 2);
    let mut sin_prod = 1.0;
    for phi in polar {
        v.push(sin_prod * phi.cos());
        sin_prod *= phi.sin();
    }
    v.push(sin_prod * azimuth.cos());
    v.push(sin_prod * azimuth.sin());
    v
}

/// Least-squares slope of log(err) against log(h): the observed order of
/// convergence. `None` with fewer than two usable points.
pub fn fitted_order(h: &[f64], err: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(err)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // ω_m = 2π/(m−1)·ω_{m−2}, ω_0 = 2, ω_1 = 2π.
    fn sphere_area_recursive(m: usize) -> f64 {
        match m {
            0 => 2.0,
            1 => 2.0 * PI,
            _ => 2.0 * PI / (m as f64 - 1.0) * sphere_area_recursive(m - 2),
        }
    }

    #[test]
    fn sphere_area_matches_recursion() {
        for m in 0..20 {
            assert_relative_eq!(
                sphere_area(m),
                sphere_area_recursive(m),
                max_relative = 1e-13
            );
        }
        assert_relative_eq!(sphere_area(2), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        for m in [3usize, 4, 5, 6, 9, 10, 101] {
            let h = 2.0 / (m - 1) as f64;
            let v: Vec<f64> = (0..m)
                .map(|i| {
                    let x = i as f64 * h;
                    x * x * x - 2.0 * x + 1.0
                })
                .collect();
            assert_relative_eq!(simpson(&v, h), 4.0 - 4.0 + 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = GaussRule::new(8, 0.0, 1.0);
        assert_relative_eq!(
            rule.integrate(|x| x.powi(15)),
            1.0 / 16.0,
            max_relative = 1e-13
        );
        assert_relative_eq!(rule.weights.iter().sum::<f64>(), 1.0, max_relative = 1e-14);
        let odd = GaussRule::new(7, -1.0, 1.0);
        assert_relative_eq!(odd.integrate(|x| x * x), 2.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn sphere_rule_area_and_moments() {
        for n in [3usize, 4, 5, 6] {
            let rule = SphereRule::new(n, 14);
            let area: f64 = rule.weights.iter().sum();
            assert_relative_eq!(area, sphere_area(n - 1), max_relative = 1e-12);
            for axis in 0..n {
                let m2: f64 = rule
                    .directions
                    .iter()
                    .zip(&rule.weights)
                    .map(|(d, w)| w * d[axis] * d[axis])
                    .sum();
                assert_relative_eq!(m2, area / n as f64, max_relative = 1e-10);
            }
            for d in &rule.directions {
                let norm: f64 = d.iter().map(|x| x * x).sum();
                assert_relative_eq!(norm, 1.0, max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn pairwise_sum_is_deterministic() {
        let v: Vec<f64> = (0..200_000).map(|i| ((i as f64) * 0.37).sin()).collect();
        let a = pairwise_sum(&v);
        let b = pairwise_sum(&v);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn fitted_order_recovers_power_laws() {
        let h = [0.4, 0.2, 0.1, 0.05];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powf(1.7)).collect();
        assert!((fitted_order(&h, &e).unwrap() - 1.7).abs() < 1e-12);
        assert_eq!(fitted_order(&h[..1], &e[..1]), None);
        assert_eq!(fitted_order(&[0.1, 0.1], &[1.0, 2.0]), None);
    }
}
