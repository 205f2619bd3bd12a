//! Bessel functions J0, J1 and modified Bessel functions I0, I1 of real
//! argument.
//!
//! J is evaluated by its Maclaurin series for |x| < 6, by Miller's backward
//! recurrence (normalized with J0 + 2ΣJ2k = 1) up to |x| < 25, and by the
//! Hankel asymptotic expansion beyond. I uses the all-positive series below
//! x = 30 and the large-argument expansion above, with the exponential
//! split in two so results stay finite up to the true overflow point.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BesselError {
    #[error("bessel argument {0} is not finite")]
    Domain(f64),
    #[error("bessel function overflows f64 at x = {0}")]
    Overflow(f64),
}

/// A value together with a bound on its relative error. For the oscillatory
/// J functions the error is relative to max(|value|, √(2/(π|x|))), since the
/// pointwise relative error is unbounded at the zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselResult {
    pub value: f64,
    pub est_error: f64,
}

const SERIES_J_MAX: f64 = 6.0;
const MILLER_J_MAX: f64 = 25.0;
const SERIES_I_MAX: f64 = 30.0;

const J_ERROR_BOUND: f64 = 5e-14;
const I_ERROR_BOUND: f64 = 1e-14;

/// Bessel J0(x).
pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_J_MAX {
        j_series(ax, 0)
    } else if ax < MILLER_J_MAX {
        miller(ax).0
    } else {
        hankel(ax, 0)
    }
}

/// Bessel J1(x).
pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_J_MAX {
        j_series(ax, 1)
    } else if ax < MILLER_J_MAX {
        miller(ax).1
    } else {
        hankel(ax, 1)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// J1(x)/x, regular at the origin where it equals 1/2.
pub fn j1_over_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_J_MAX {
        // (1/2) Σ (−x²/4)^k / (k!(k+1)!)
        let y = -0.25 * ax * ax;
        let mut term = 0.5;
        let mut sum = term;
        let mut k = 0.0;
        while k < 60.0 {
            k += 1.0;
            term *= y / (k * (k + 1.0));
            sum += term;
            if term.abs() < 1e-18 * (1.0 + sum.abs()) {
                break;
            }
        }
        sum
    } else {
        j1(ax) / ax
    }
}

/// Modified Bessel I0(x).
pub fn i0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_I_MAX {
        i_series(ax, 0)
    } else {
        i_asymptotic(ax, 0)
    }
}

/// Modified Bessel I1(x).
pub fn i1(x: f64) -> f64 {
    let ax = x.abs();
    let v = if ax < SERIES_I_MAX {
        i_series(ax, 1)
    } else {
        i_asymptotic(ax, 1)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// I1(x)/x, regular at the origin where it equals 1/2.
pub fn i1_over_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < SERIES_I_MAX {
        // (1/2) Σ (x²/4)^k / (k!(k+1)!)
        let y = 0.25 * ax * ax;
        let mut term = 0.5;
        let mut sum = term;
        let mut k = 0.0;
        while k < 500.0 {
            k += 1.0;
            term *= y / (k * (k + 1.0));
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        sum
    } else {
        i1(ax) / ax
    }
}

/// Checked J0 with error estimate.
pub fn bessel_j0(x: f64) -> Result<BesselResult, BesselError> {
    checked_j(x, j0)
}

/// Checked J1 with error estimate.
pub fn bessel_j1(x: f64) -> Result<BesselResult, BesselError> {
    checked_j(x, j1)
}

/// Checked I0 with error estimate; overflow is reported separately from
/// non-finite input.
pub fn bessel_i0(x: f64) -> Result<BesselResult, BesselError> {
    checked_i(x, i0)
}

/// Checked I1 with error estimate.
pub fn bessel_i1(x: f64) -> Result<BesselResult, BesselError> {
    checked_i(x, i1)
}

fn checked_j(x: f64, f: fn(f64) -> f64) -> Result<BesselResult, BesselError> {
    if !x.is_finite() {
        return Err(BesselError::Domain(x));
    }
    Ok(BesselResult {
        value: f(x),
        est_error: J_ERROR_BOUND,
    })
}

fn checked_i(x: f64, f: fn(f64) -> f64) -> Result<BesselResult, BesselError> {
    if !x.is_finite() {
        return Err(BesselError::Domain(x));
    }
    let value = f(x);
    if !value.is_finite() {
        return Err(BesselError::Overflow(x));
    }
    Ok(BesselResult {
        value,
        est_error: I_ERROR_BOUND,
    })
}

/// Σ (−1)^k (x/2)^(2k+n) / (k!(k+n)!) for n ∈ {0, 1}, x ≥ 0.
fn j_series(x: f64, n: u32) -> f64 {
    let y = -0.25 * x * x;
    let mut term = if n == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 0.0;
    let nf = n as f64;
    while k < 60.0 {
        k += 1.0;
        term *= y / (k * (k + nf));
        sum += term;
        if term.abs() < 1e-18 * (1.0 + sum.abs()) {
            break;
        }
    }
    sum
}

fn i_series(x: f64, n: u32) -> f64 {
    let y = 0.25 * x * x;
    let mut term = if n == 0 { 1.0 } else { 0.5 * x };
    let mut sum = term;
    let mut k = 0.0;
    let nf = n as f64;
    while k < 500.0 {
        k += 1.0;
        term *= y / (k * (k + nf));
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Miller's backward recurrence, returning (J0, J1) for 0 < x.
fn miller(x: f64) -> (f64, f64) {
    let start = 2 * ((x as usize + 36) / 2);
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut j1_raw = 0.0;
    let mut k = start;
    while k > 0 {
        if k.is_multiple_of(2) {
            norm += 2.0 * cur;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
        if k == 1 {
            j1_raw = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            j1_raw *= 1e-250;
        }
    }
    // cur now holds J0 (unnormalized); the loop added 2·J_k for even k ≥ 2.
    norm += cur;
    (cur / norm, j1_raw / norm)
}

/// Hankel expansion for J_n, n ∈ {0, 1}, x ≥ 25.
fn hankel(x: f64, n: u32) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let inv8x = 1.0 / (8.0 * x);
    // a_k = Π_{m=1..k} (μ − (2m−1)²) / (k! (8x)^k)
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8x / k as f64;
        let mag = term.abs();
        if mag > last || mag < 1e-18 {
            break;
        }
        last = mag;
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
    }
    let (s, c) = x.sin_cos();
    let (cos_chi, sin_chi) = if n == 0 {
        ((c + s) * FRAC_1_SQRT_2, (s - c) * FRAC_1_SQRT_2)
    } else {
        ((s - c) * FRAC_1_SQRT_2, (-s - c) * FRAC_1_SQRT_2)
    };
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Large-argument expansion for I_n, n ∈ {0, 1}, x ≥ 30.
fn i_asymptotic(x: f64, n: u32) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let inv8x = 1.0 / (8.0 * x);
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) * inv8x / k as f64;
        let mag = term.abs();
        if mag > last || mag < 1e-18 {
            break;
        }
        last = mag;
        sum += term;
    }
    let half = (0.5 * x).exp();
    half * (sum / (2.0 * PI * x).sqrt()) * half
}
