//! Sampled light and spin profiles.
//!
//! A [`FieldRecord`] holds Ξ1(t), Ξ2(t) at a fixed plane, sampled at the
//! midpoints of the time bins of a [`Grid`]; a [`SpinRecord`] holds Jz(z),
//! Jy(z) at a fixed instant, sampled at the space-bin midpoints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinRecord {
    pub jz: Vec<f64>,
    pub jy: Vec<f64>,
}

impl FieldRecord {
    pub fn zeros(n: usize) -> Self {
        Self {
            xi1: vec![0.0; n],
            xi2: vec![0.0; n],
        }
    }

    /// Samples `f(t) -> (Ξ1, Ξ2)` at the time-bin midpoints.
    pub fn sample<F: Fn(f64) -> (f64, f64)>(grid: &Grid, duration: f64, f: F) -> Self {
        let (xi1, xi2) = (0..grid.n_time).map(|k| f(grid.time_at(k, duration))).unzip();
        Self { xi1, xi2 }
    }

    pub fn len(&self) -> usize {
        self.xi1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi1.is_empty()
    }

    pub(crate) fn check(&self, grid: &Grid) -> Result<()> {
        check_len("field record Ξ1", grid.n_time, self.xi1.len())?;
        check_len("field record Ξ2", grid.n_time, self.xi2.len())?;
        check_finite(&self.xi1, "xi1")?;
        check_finite(&self.xi2, "xi2")
    }

    pub fn component(&self, c: usize) -> &[f64] {
        if c == 0 {
            &self.xi1
        } else {
            &self.xi2
        }
    }

    /// Largest absolute sample over both components.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.xi1).max(max_abs(&self.xi2))
    }

    /// Largest absolute component-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.xi1, &other.xi1).max(max_abs_diff(&self.xi2, &other.xi2))
    }
}

impl SpinRecord {
    pub fn zeros(n: usize) -> Self {
        Self {
            jz: vec![0.0; n],
            jy: vec![0.0; n],
        }
    }

    /// Samples `f(z) -> (Jz, Jy)` at the space-bin midpoints.
    pub fn sample<F: Fn(f64) -> (f64, f64)>(grid: &Grid, length: f64, f: F) -> Self {
        let (jz, jy) = (0..grid.n_space).map(|k| f(grid.position_at(k, length))).unzip();
        Self { jz, jy }
    }

    pub fn len(&self) -> usize {
        self.jz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jz.is_empty()
    }

    pub(crate) fn check(&self, grid: &Grid) -> Result<()> {
        check_len("spin record Jz", grid.n_space, self.jz.len())?;
        check_len("spin record Jy", grid.n_space, self.jy.len())?;
        check_finite(&self.jz, "jz")?;
        check_finite(&self.jy, "jy")
    }

    pub fn component(&self, c: usize) -> &[f64] {
        if c == 0 {
            &self.jz
        } else {
            &self.jy
        }
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.jz).max(max_abs(&self.jy))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs_diff(&self.jz, &other.jz).max(max_abs_diff(&self.jy, &other.jy))
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { what, expected, got })
    }
}

fn check_finite(values: &[f64], name: &'static str) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(&value) => Err(Error::NonFinite { name, value }),
        None => Ok(()),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// A smooth random profile: a constant plus a few sinusoids with at most
/// `max_wavenumber` radians per unit of the sampled extent.
#[derive(Debug, Clone)]
pub struct SmoothProfile {
    terms: Vec<(f64, f64, f64)>,
    offset: f64,
}

impl SmoothProfile {
    pub fn random<R: Rng>(rng: &mut R, max_wavenumber: f64) -> Self {
        let terms = (0..4)
            .map(|_| {
                (
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..max_wavenumber),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        Self {
            terms,
            offset: rng.gen_range(-0.5..0.5),
        }
    }

    /// Value at the scaled coordinate u ∈ [0, 1].
    pub fn at(&self, u: f64) -> f64 {
        self.offset
            + self
                .terms
                .iter()
                .map(|(amp, k, phase)| amp * (k * u + phase).sin())
                .sum::<f64>()
    }
}

/// Four independent smooth profiles (Ξ1, Ξ2, Jz, Jy) drawn from a seeded
/// generator, sampled on `grid` for a sample of the given extents.
pub fn random_smooth_inputs(
    grid: &Grid,
    length: f64,
    duration: f64,
    seed: u64,
) -> (FieldRecord, SpinRecord) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p: Vec<SmoothProfile> = (0..4).map(|_| SmoothProfile::random(&mut rng, 8.0)).collect();
    let field = FieldRecord::sample(grid, duration, |t| {
        let u = t / duration;
        (p[0].at(u), p[1].at(u))
    });
    let spin = SpinRecord::sample(grid, length, |z| {
        let u = z / length;
        (p[2].at(u), p[3].at(u))
    });
    (field, spin)
}

/// Like [`random_smooth_inputs`] but every profile is multiplied by a
/// sin² window so it vanishes smoothly at both ends of its interval.
pub fn random_compact_inputs(
    grid: &Grid,
    length: f64,
    duration: f64,
    seed: u64,
) -> (FieldRecord, SpinRecord) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p: Vec<SmoothProfile> = (0..4).map(|_| SmoothProfile::random(&mut rng, 8.0)).collect();
    let window = |u: f64| (std::f64::consts::PI * u).sin().powi(2);
    let field = FieldRecord::sample(grid, duration, |t| {
        let u = t / duration;
        (window(u) * p[0].at(u), window(u) * p[1].at(u))
    });
    let spin = SpinRecord::sample(grid, length, |z| {
        let u = z / length;
        (window(u) * p[2].at(u), window(u) * p[3].at(u))
    });
    (field, spin)
}
