//! Seeded random test functions for the randomized suites.

use std::f64::consts::PI;

use paneitz_core::{AxialField, GridField, GridSpec, TrigField};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Independent uniform values in [lo, hi) at every grid point.
pub fn rough_grid<R: Rng>(rng: &mut R, spec: &GridSpec, lo: f64, hi: f64) -> GridField {
    let values = (0..spec.len()).map(|_| rng.gen_range(lo..hi)).collect();
    GridField::new(spec.clone(), values).expect("length matches the spec")
}

/// Smooth non-negative trigonometric field sampled on the grid.
pub fn smooth_grid<R: Rng>(rng: &mut R, spec: &GridSpec) -> GridField {
    TrigField::random_nonnegative(rng, spec.side_lengths().to_vec(), 4, 2, 0.05)
        .sample(spec)
        .expect("trig field lives on the grid's torus")
}

/// c₀ + Σ_k a_k cos(kπt/l) with c₀ = Σ|a_k| + floor, so the profile is ≥ floor.
pub fn smooth_profile<R: Rng>(rng: &mut R, l: f64, samples: usize, floor: f64) -> AxialField {
    let amps: Vec<(f64, f64)> = (1..=4)
        .map(|k| (rng.gen_range(-1.0..1.0), k as f64 * PI / l))
        .collect();
    let offset = amps.iter().map(|(a, _)| a.abs()).sum::<f64>() + floor;
    AxialField::from_fn(l, samples, |t| {
        offset + amps.iter().map(|(a, w)| a * (w * t).cos()).sum::<f64>()
    })
    .expect("sample count is admissible")
}

pub fn rough_profile<R: Rng>(rng: &mut R, l: f64, samples: usize, lo: f64, hi: f64) -> AxialField {
    let values = (0..samples).map(|_| rng.gen_range(lo..hi)).collect();
    AxialField::new(l, values).expect("sample count is admissible")
}
