//! Closed-form Green's kernels for κ2 = Ω = 0.
//!
//! With a = 2βεΞ̄3J̄x every field obeys ∂z∂t X = −aX. The self-kernels are
//! K(u) = c·φ(c·u) with c = aL (time) or c = aT (space), and the cross
//! kernel is G(x, t) = ψ(a·x·t), where
//!
//! ```text
//! φ(w) = Σ (−w)^k / (k!(k+1)!) = 2J1(2√w)/(2√w)   (w ≥ 0), 2I1(2√−w)/(2√−w) (w < 0)
//! ψ(w) = Σ (−w)^k / (k!)²      = J0(2√w)           (w ≥ 0), I0(2√−w)        (w < 0)
//! ```
//!
//! The output at the far face is then
//!
//! ```text
//! Ξ1(L,t) = Ξ1in(t) − ∫0^t Ktime(t−t') Ξ1in(t') dt' + 2βΞ̄3 ∫0^L G(L−z', t) Jzin(z') dz'
//! Jz(z,T) = Jzin(z) − ∫0^z Kspace(z−z') Jzin(z') dz' − εJ̄x ∫0^T G(z, T−t') Ξ1in(t') dt'
//! ```
//!
//! and the same with (Ξ2, Jy) and couplings −2εΞ̄3, βJ̄x.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Grid, PhysicalParams};
use crate::quadrature::{GaussLegendre, MidpointSamples, PANEL_ORDER};
use crate::records::{FieldRecord, SpinRecord};
use crate::special::{i0, i1_over_x, j0, j1_over_x};
use crate::transfer::{BinScale, Layout, TransferMatrix};

/// φ(w) = Σ (−w)^k / (k!(k+1)!).
pub fn phi(w: f64) -> f64 {
    if w >= 0.0 {
        2.0 * j1_over_x(2.0 * w.sqrt())
    } else {
        2.0 * i1_over_x(2.0 * (-w).sqrt())
    }
}

/// ψ(w) = Σ (−w)^k / (k!)².
pub fn psi(w: f64) -> f64 {
    if w >= 0.0 {
        j0(2.0 * w.sqrt())
    } else {
        i0(2.0 * (-w).sqrt())
    }
}

/// Kernel functions for one coupling strength and sample geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSet {
    pub a: f64,
    pub length: f64,
    pub duration: f64,
}

impl KernelSet {
    pub fn new(params: &PhysicalParams) -> Self {
        Self {
            a: params.a_coupling(),
            length: params.length,
            duration: params.duration,
        }
    }

    /// Unit geometry (L = T = 1) with a = κc.
    pub fn scaled(kappa_c: f64) -> Self {
        Self {
            a: kappa_c,
            length: 1.0,
            duration: 1.0,
        }
    }

    /// Ktime(u) = aL·φ(aL·u), u ≥ 0.
    pub fn k_time(&self, u: f64) -> f64 {
        scaled_phi(self.a * self.length, u)
    }

    /// Kspace(u) = aT·φ(aT·u), u ≥ 0.
    pub fn k_space(&self, u: f64) -> f64 {
        scaled_phi(self.a * self.duration, u)
    }

    /// G(x, t) = ψ(a·x·t).
    pub fn cross(&self, x: f64, t: f64) -> f64 {
        if self.a == 0.0 {
            1.0
        } else {
            psi(self.a * x * t)
        }
    }
}

fn scaled_phi(c: f64, u: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * phi(c * u)
    }
}

fn require_kernel_regime(params: &PhysicalParams) -> Result<()> {
    params.validate()?;
    if params.is_kernel_regime() {
        Ok(())
    } else {
        Err(Error::Regime("closed-form kernels need kappa2 = 0 and omega0 + omega2 = 0"))
    }
}

/// Evaluates the kernel solution for fixed input records. Inputs are
/// interpolated from their midpoint samples and vanish outside [0, T] and
/// [0, L].
#[derive(Debug, Clone)]
pub struct KernelSolution<'a> {
    params: PhysicalParams,
    grid: Grid,
    kernels: KernelSet,
    field_in: &'a FieldRecord,
    spin_in: &'a SpinRecord,
    rule: GaussLegendre,
}

impl<'a> KernelSolution<'a> {
    pub fn new(
        params: &PhysicalParams,
        grid: &Grid,
        field_in: &'a FieldRecord,
        spin_in: &'a SpinRecord,
    ) -> Result<Self> {
        require_kernel_regime(params)?;
        grid.validate()?;
        field_in.check(grid)?;
        spin_in.check(grid)?;
        Ok(Self {
            params: *params,
            grid: *grid,
            kernels: KernelSet::new(params),
            field_in,
            spin_in,
            rule: GaussLegendre::new(PANEL_ORDER),
        })
    }

    fn light_input(&self, c: usize) -> MidpointSamples<'a> {
        MidpointSamples::new(self.field_in.component(c), self.params.duration)
    }

    fn spin_input(&self, c: usize) -> MidpointSamples<'a> {
        MidpointSamples::new(self.spin_in.component(c), self.params.length)
    }

    /// (Ξ1, Ξ2) at z = L and any t ≥ 0, without the direct term.
    fn field_integrals(&self, t: f64) -> [f64; 2] {
        let p = &self.params;
        let dt = self.grid.dt(p.duration);
        let (x1, x2) = (self.light_input(0), self.light_input(1));
        let (s1, s2) = (self.spin_input(0), self.spin_input(1));
        let mut conv = [0.0; 2];
        self.rule.visit_mesh(0.0, t.min(p.duration), dt, |tp, w| {
            let k = w * self.kernels.k_time(t - tp);
            conv[0] += k * x1.at(tp);
            conv[1] += k * x2.at(tp);
        });
        let mut cross = [0.0; 2];
        self.rule.visit_composite(0.0, p.length, self.grid.n_space, |zp, w| {
            let g = w * self.kernels.cross(p.length - zp, t);
            cross[0] += g * s1.at(zp);
            cross[1] += g * s2.at(zp);
        });
        [
            -conv[0] + p.light_from_jz() * cross[0],
            -conv[1] + p.light_from_jy() * cross[1],
        ]
    }

    /// (Ξ1, Ξ2)(L, t) for any t ≥ 0. For t > T the input term is absent.
    pub fn field_at(&self, t: f64) -> [f64; 2] {
        let [a, b] = self.field_integrals(t);
        [self.light_input(0).at(t) + a, self.light_input(1).at(t) + b]
    }

    /// (Jz, Jy)(z, T) for z ∈ [0, L], without the direct term.
    fn spin_integrals(&self, z: f64) -> [f64; 2] {
        let p = &self.params;
        let dz = self.grid.dz(p.length);
        let (x1, x2) = (self.light_input(0), self.light_input(1));
        let (s1, s2) = (self.spin_input(0), self.spin_input(1));
        let mut conv = [0.0; 2];
        self.rule.visit_mesh(0.0, z.min(p.length), dz, |zp, w| {
            let k = w * self.kernels.k_space(z - zp);
            conv[0] += k * s1.at(zp);
            conv[1] += k * s2.at(zp);
        });
        let mut cross = [0.0; 2];
        self.rule.visit_composite(0.0, p.duration, self.grid.n_time, |tp, w| {
            let g = w * self.kernels.cross(z, p.duration - tp);
            cross[0] += g * x1.at(tp);
            cross[1] += g * x2.at(tp);
        });
        [
            -conv[0] + p.jz_from_light() * cross[0],
            -conv[1] + p.jy_from_light() * cross[1],
        ]
    }

    /// Light leaving the sample, sampled at the time-bin midpoints.
    pub fn output_field(&self) -> FieldRecord {
        let p = &self.params;
        let rows: Vec<[f64; 2]> = (0..self.grid.n_time)
            .into_par_iter()
            .map(|k| {
                let [a, b] = self.field_integrals(self.grid.time_at(k, p.duration));
                [self.field_in.xi1[k] + a, self.field_in.xi2[k] + b]
            })
            .collect();
        FieldRecord {
            xi1: rows.iter().map(|r| r[0]).collect(),
            xi2: rows.iter().map(|r| r[1]).collect(),
        }
    }

    /// Spins after the pulse, sampled at the space-bin midpoints.
    pub fn output_spin(&self) -> SpinRecord {
        let p = &self.params;
        let rows: Vec<[f64; 2]> = (0..self.grid.n_space)
            .into_par_iter()
            .map(|k| {
                let [a, b] = self.spin_integrals(self.grid.position_at(k, p.length));
                [self.spin_in.jz[k] + a, self.spin_in.jy[k] + b]
            })
            .collect();
        SpinRecord {
            jz: rows.iter().map(|r| r[0]).collect(),
            jy: rows.iter().map(|r| r[1]).collect(),
        }
    }
}

/// Ξ(L, ·) at the time-bin midpoints for κ2 = Ω = 0.
pub fn output_field(
    params: &PhysicalParams,
    grid: &Grid,
    field_in: &FieldRecord,
    spin_in: &SpinRecord,
) -> Result<FieldRecord> {
    Ok(KernelSolution::new(params, grid, field_in, spin_in)?.output_field())
}

/// J(·, T) at the space-bin midpoints for κ2 = Ω = 0.
pub fn output_spin(
    params: &PhysicalParams,
    grid: &Grid,
    field_in: &FieldRecord,
    spin_in: &SpinRecord,
) -> Result<SpinRecord> {
    Ok(KernelSolution::new(params, grid, field_in, spin_in)?.output_spin())
}

/// Bin-to-bin transfer matrix from the kernels, treating each input bin as
/// a constant over its extent and reading outputs at bin midpoints.
pub fn kernel_transfer_matrix(params: &PhysicalParams, grid: &Grid) -> Result<TransferMatrix> {
    require_kernel_regime(params)?;
    grid.validate()?;
    let ks = KernelSet::new(params);
    let rule = GaussLegendre::new(PANEL_ORDER);
    let layout = Layout::new(grid);
    let scale = BinScale::new(params, grid);
    let (nt, nz) = (grid.n_time, grid.n_space);
    let (dt, dz) = (grid.dt(params.duration), grid.dz(params.length));
    let (len, dur) = (params.length, params.duration);

    // Toeplitz self-responses indexed by lag: ∫ over the source bin of K.
    let self_response = |n: usize, h: f64, k: &dyn Fn(f64) -> f64| -> Vec<f64> {
        (0..n)
            .map(|lag| {
                if lag == 0 {
                    1.0 - rule.integrate(0.0, 0.5 * h, k)
                } else {
                    let lo = (lag as f64 - 0.5) * h;
                    -rule.integrate(lo, lo + h, k)
                }
            })
            .collect()
    };
    let light_self = self_response(nt, dt, &|u| ks.k_time(u));
    let spin_self = self_response(nz, dz, &|u| ks.k_space(u));

    let light_couple = [params.light_from_jz(), params.light_from_jy()];
    let spin_couple = [params.jz_from_light(), params.jy_from_light()];
    let l2s = scale.light / scale.spin;

    let dim = layout.dim();
    let rows: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|row| {
            let mut out = vec![0.0; dim];
            if row < 2 * nt {
                let (c, n) = (row / nt, row % nt);
                let t = grid.time_at(n, dur);
                for m in 0..=n {
                    out[layout.light(c, m)] = light_self[n - m];
                }
                for j in 0..nz {
                    let lo = j as f64 * dz;
                    let g = rule.integrate(lo, lo + dz, |zp| ks.cross(len - zp, t));
                    out[layout.spin(c, j)] = light_couple[c] * l2s * g;
                }
            } else {
                let r = row - 2 * nt;
                let (c, j) = (r / nz, r % nz);
                let z = grid.position_at(j, len);
                for i in 0..=j {
                    out[layout.spin(c, i)] = spin_self[j - i];
                }
                for m in 0..nt {
                    let lo = m as f64 * dt;
                    let g = rule.integrate(lo, lo + dt, |tp| ks.cross(z, dur - tp));
                    out[layout.light(c, m)] = spin_couple[c] * g / l2s;
                }
            }
            out
        })
        .collect();
    let matrix = DMatrix::from_fn(dim, dim, |i, j| rows[i][j]);
    Ok(TransferMatrix {
        params: *params,
        grid: *grid,
        layout,
        matrix,
    })
}
