use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::grid::{GridField, GridSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigKind {
    Cos,
    Sin,
}

/// `amplitude · cos(κ·x)` or `amplitude · sin(κ·x)`, with κ_a = 2π·wave_a/L_a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub wave: Vec<i32>,
    pub kind: TrigKind,
}

/// Trigonometric polynomial on a flat torus, evaluable (with derivatives)
/// anywhere, not only at grid points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigField {
    pub side_lengths: Vec<f64>,
    pub offset: f64,
    #[serde(default)]
    pub terms: Vec<TrigTerm>,
}

impl TrigField {
    pub fn constant(side_lengths: Vec<f64>, value: f64) -> Self {
        TrigField {
            side_lengths,
            offset: value,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, amplitude: f64, wave: Vec<i32>, kind: TrigKind) -> Self {
        self.terms.push(TrigTerm {
            amplitude,
            wave,
            kind,
        });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.side_lengths.len();
        if self
            .side_lengths
            .iter()
            .any(|l| !(l.is_finite() && *l > 0.0))
        {
            return Err(Error::Range("torus side lengths must be positive".into()));
        }
        if self
            .terms
            .iter()
            .any(|t| t.wave.len() != dim || !t.amplitude.is_finite())
        {
            return Err(Error::LayoutMismatch(
                "trig term does not match torus dimension".into(),
            ));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.side_lengths.len()
    }

    fn wavevector(&self, term: &TrigTerm) -> impl Iterator<Item = f64> + '_ {
        let w = term.wave.clone();
        self.side_lengths
            .iter()
            .zip(w)
            .map(|(l, k)| 2.0 * PI * k as f64 / l)
    }

    fn phase(&self, term: &TrigTerm, x: &[f64]) -> f64 {
        self.wavevector(term).zip(x).map(|(k, xi)| k * xi).sum()
    }

    fn wavenumber_sq(&self, term: &TrigTerm) -> f64 {
        self.wavevector(term).map(|k| k * k).sum()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.offset
            + self
                .terms
                .iter()
                .map(|t| {
                    let p = self.phase(t, x);
                    t.amplitude
                        * match t.kind {
                            TrigKind::Cos => p.cos(),
                            TrigKind::Sin => p.sin(),
                        }
                })
                .sum::<f64>()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dimension()];
        for t in &self.terms {
            let p = self.phase(t, x);
            let d = match t.kind {
                TrigKind::Cos => -p.sin(),
                TrigKind::Sin => p.cos(),
            };
            for (gi, k) in g.iter_mut().zip(self.wavevector(t)) {
                *gi += t.amplitude * d * k;
            }
        }
        g
    }

    pub fn laplacian(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let p = self.phase(t, x);
                let v = match t.kind {
                    TrigKind::Cos => p.cos(),
                    TrigKind::Sin => p.sin(),
                };
                -t.amplitude * self.wavenumber_sq(t) * v
            })
            .sum()
    }

    /// Value, gradient and Laplacian in one pass.
    pub fn jet(&self, x: &[f64]) -> (f64, Vec<f64>, f64) {
        let mut value = self.offset;
        let mut grad = vec![0.0; self.dimension()];
        let mut lap = 0.0;
        for t in &self.terms {
            let p = self.phase(t, x);
            let (s, c) = p.sin_cos();
            let (v, d) = match t.kind {
                TrigKind::Cos => (c, -s),
                TrigKind::Sin => (s, c),
            };
            value += t.amplitude * v;
            let mut k2 = 0.0;
            for (gi, k) in grad.iter_mut().zip(self.wavevector(t)) {
                *gi += t.amplitude * d * k;
                k2 += k * k;
            }
            lap -= t.amplitude * k2 * v;
        }
        (value, grad, lap)
    }

    /// Guaranteed lower bound offset − Σ|amplitude|.
    pub fn lower_bound(&self) -> f64 {
        self.offset - self.terms.iter().map(|t| t.amplitude.abs()).sum::<f64>()
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<GridField> {
        self.validate()?;
        if spec.side_lengths() != self.side_lengths.as_slice() {
            return Err(Error::LayoutMismatch(
                "trig field and grid describe different tori".into(),
            ));
        }
        Ok(GridField::from_fn(spec, |x| self.value(x)))
    }

    /// Random smooth non-negative trig polynomial: `modes` terms with wave
    /// numbers in [−max_wave, max_wave] per axis, amplitudes in [−1, 1], and
    /// an offset of Σ|amplitude| + `floor`.
    pub fn random_nonnegative<R: Rng>(
        rng: &mut R,
        side_lengths: Vec<f64>,
        modes: usize,
        max_wave: i32,
        floor: f64,
    ) -> Self {
        let dim = side_lengths.len();
        let terms: Vec<TrigTerm> = (0..modes)
            .map(|_| {
                let wave = (0..dim)
                    .map(|_| rng.gen_range(-max_wave..=max_wave))
                    .collect();
                let kind = if rng.gen_bool(0.5) {
                    TrigKind::Cos
                } else {
                    TrigKind::Sin
                };
                TrigTerm {
                    amplitude: rng.gen_range(-1.0..1.0),
                    wave,
                    kind,
                }
            })
            .collect();
        let offset = terms.iter().map(|t| t.amplitude.abs()).sum::<f64>() + floor;
        TrigField {
            side_lengths,
            offset,
            terms,
        }
    }
}
