//! Laplace-mode dispersion and polariton wavepackets.
//!
//! A temporal Laplace mode e^{st} of the light is tied to the spatial mode
//! e^{pz} of the spins by p(s) = A/s with A = −2βεΞ̄3J̄x. On the imaginary
//! axis this is the travelling-wave relation ωq = A, whose group velocity is
//! v_g = dω/dq = −A/q².

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{finite, Error, Result};
use crate::kernels::KernelSolution;
use crate::model::{Grid, PhysicalParams};
use crate::oracle::CellMap;
use crate::quadrature::{GaussLegendre, MidpointSamples, PANEL_ORDER};
use crate::records::{FieldRecord, SpinRecord};

/// A matched pair of Laplace variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub s: Complex64,
    pub p: Complex64,
}

/// p(s) = A/s.
pub fn dispersion_p_of_s(a_const: f64, s: Complex64) -> Result<SpectralPoint> {
    finite("A", a_const)?;
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::NonFinite { name: "s", value: s.norm() });
    }
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::Pole);
    }
    Ok(SpectralPoint { s, p: a_const / s })
}

/// |q|L of the spatial mode paired with the temporal mode ωT, given |A|LT.
pub fn paired_wavenumber(abs_a_lt: f64, omega_t: f64) -> Result<f64> {
    finite("|A|LT", abs_a_lt)?;
    finite("omega_T", omega_t)?;
    if omega_t == 0.0 {
        return Err(Error::Pole);
    }
    Ok(abs_a_lt.abs() / omega_t.abs())
}

/// v_g = −A/q².
pub fn group_velocity(a_const: f64, q: f64) -> Result<f64> {
    finite("A", a_const)?;
    finite("q", q)?;
    if q == 0.0 {
        return Err(Error::Pole);
    }
    Ok(-a_const / (q * q))
}

/// Outcome of a wavepacket run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketMeasurement {
    /// Measured envelope speed (length per time).
    pub speed: f64,
    /// −A/q0².
    pub predicted: f64,
    /// Envelope delay between the probe planes.
    pub delay: f64,
    /// Distance between the probe planes.
    pub separation: f64,
}

impl PacketMeasurement {
    pub fn relative_error(&self) -> f64 {
        ((self.speed - self.predicted) / self.predicted).abs()
    }
}

/// Launches a Gaussian spin packet with carrier q0 and spectral width
/// `bandwidth` (σz = 1/bandwidth) and times its light envelope between two
/// downstream planes, using the lattice with the grid's Δz and Δt on a
/// domain extended beyond L and T as needed. Returns zero speed when a = 0.
pub fn measure_packet_velocity(
    params: &PhysicalParams,
    grid: &Grid,
    q0: f64,
    bandwidth: f64,
) -> Result<PacketMeasurement> {
    params.validate()?;
    grid.validate()?;
    finite("q0", q0)?;
    crate::error::positive("bandwidth", bandwidth)?;
    let dz = grid.dz(params.length);
    let dt = grid.dt(params.duration);
    if q0 * dz > 0.5 {
        return Err(Error::Unresolvable(format!(
            "carrier q0·dz = {} exceeds 0.5; refine n_space",
            q0 * dz
        )));
    }
    let a = params.a_coupling();
    if a < 0.0 {
        return Err(Error::Regime(
            "light only carries information downstream; packets are timed on the red wing (a >= 0)",
        ));
    }
    let sigma = 1.0 / bandwidth;
    let (zc, z1, z2) = (5.0 * sigma, 8.0 * sigma, 11.0 * sigma);
    let predicted = if q0 == 0.0 { f64::INFINITY } else { a / (q0 * q0) };
    let extent = if a == 0.0 {
        64.0 * params.duration
    } else {
        1.6 * (z2 - zc) / predicted + 4.0 * sigma / predicted
    };
    let nz = (z2 / dz).ceil() as usize + 1;
    let nt = (extent / dt).ceil() as usize;
    let (j1, j2) = ((z1 / dz).round() as usize, (z2 / dz).round() as usize);
    let ext_params = PhysicalParams {
        length: nz as f64 * dz,
        duration: nt as f64 * dt,
        ..*params
    };
    let ext_grid = Grid::new(nt, nz)?;
    let cell = CellMap::new(&ext_params, &ext_grid)?;
    let envelope_runs: Vec<[Vec<[f64; 2]>; 2]> = [0usize, 1]
        .par_iter()
        .map(|&quadrature| {
            let spin: Vec<[f64; 2]> = (0..nz)
                .map(|j| {
                    let z = (j as f64 + 0.5) * dz;
                    let env = (-(z - zc).powi(2) / (2.0 * sigma * sigma)).exp();
                    let carrier = if quadrature == 0 { (q0 * z).cos() } else { (q0 * z).sin() };
                    [env * carrier, 0.0]
                })
                .collect();
            probe_light(&cell, nt, &spin, [j1, j2])
        })
        .collect();
    let envelope = |plane: usize| -> Vec<f64> {
        (0..nt)
            .map(|n| {
                let c = envelope_runs[0][plane][n];
                let s = envelope_runs[1][plane][n];
                ((c[0].powi(2) + s[0].powi(2)) + (c[1].powi(2) + s[1].powi(2))).sqrt()
            })
            .collect()
    };
    let separation = (j2 - j1) as f64 * dz;
    if a == 0.0 {
        return Ok(PacketMeasurement {
            speed: 0.0,
            predicted: 0.0,
            delay: f64::INFINITY,
            separation,
        });
    }
    let lag = correlation_lag(&envelope(0), &envelope(1))?;
    let delay = lag * dt;
    Ok(PacketMeasurement {
        speed: separation / delay,
        predicted,
        delay,
        separation,
    })
}

/// Sweeps the lattice with zero light input and the given spin data,
/// returning the light at the exit faces of the two requested planes.
fn probe_light(cell: &CellMap, nt: usize, spin: &[[f64; 2]], planes: [usize; 2]) -> [Vec<[f64; 2]>; 2] {
    let mut x = vec![[0.0; 2]; nt];
    let mut out = [Vec::new(), Vec::new()];
    let last = planes[0].max(planes[1]);
    for (j, y0) in spin.iter().enumerate().take(last) {
        let mut y = *y0;
        for xn in x.iter_mut() {
            let (xo, yo) = cell.step(*xn, y);
            *xn = xo;
            y = yo;
        }
        for (slot, &p) in out.iter_mut().zip(&planes) {
            if j + 1 == p {
                *slot = x.clone();
            }
        }
    }
    out
}

/// Lag (in samples, fractional) maximizing Σ a[n]·b[n+lag], refined by a
/// parabola through the peak.
fn correlation_lag(a: &[f64], b: &[f64]) -> Result<f64> {
    let n = a.len();
    let corr: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|lag| (0..n - lag).map(|i| a[i] * b[i + lag]).sum())
        .collect();
    let (best, _) = corr
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &c)| if c > acc.1 { (i, c) } else { acc });
    if best == 0 || best + 1 >= n {
        return Err(Error::Unresolvable(
            "envelope peak at the edge of the time window".into(),
        ));
    }
    let (l, c, r) = (corr[best - 1], corr[best], corr[best + 1]);
    let denom = l - 2.0 * c + r;
    let shift = if denom != 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
    Ok(best as f64 + shift)
}

/// Residual of the Laplace-mode relation at the exit face,
///
/// ```text
/// X̃(L,s) = e^{−aL/s} X̃(0,s) + (b/s) ∫0^L e^{−a(L−z')/s} J(z') dz',
/// ```
///
/// for both pairs (Ξ1, Jz) and (Ξ2, Jy), with the left side integrated from
/// the kernel solution up to t = 40/s. Returns max |lhs − rhs| / max |rhs|.
pub fn laplace_identity_residual(
    params: &PhysicalParams,
    grid: &Grid,
    field_in: &FieldRecord,
    spin_in: &SpinRecord,
    s: f64,
) -> Result<f64> {
    crate::error::positive("s", s)?;
    let a = params.a_coupling();
    if a < 0.0 {
        return Err(Error::Regime("Laplace transform of the output diverges for a < 0"));
    }
    let sol = KernelSolution::new(params, grid, field_in, spin_in)?;
    let rule = GaussLegendre::new(PANEL_ORDER);
    let dt = grid.dt(params.duration);
    let horizon = 40.0 / s;
    let mut lhs = [0.0; 2];
    rule.visit_mesh(0.0, horizon, dt, |t, w| {
        let v = sol.field_at(t);
        let e = w * (-s * t).exp();
        lhs[0] += e * v[0];
        lhs[1] += e * v[1];
    });
    let (len, dur) = (params.length, params.duration);
    let couple = [params.light_from_jz(), params.light_from_jy()];
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for c in 0..2 {
        let x = MidpointSamples::new(field_in.component(c), dur);
        let j = MidpointSamples::new(spin_in.component(c), len);
        let x_s = rule.integrate_on_mesh(0.0, dur, dt, |t| (-s * t).exp() * x.at(t));
        let j_s = rule.integrate_composite(0.0, len, grid.n_space, |z| (-(a / s) * (len - z)).exp() * j.at(z));
        let rhs = (-a * len / s).exp() * x_s + couple[c] / s * j_s;
        worst = worst.max((lhs[c] - rhs).abs());
        scale = scale.max(rhs.abs());
    }
    if scale == 0.0 {
        return Ok(worst);
    }
    Ok(worst / scale)
}
