//! SQL-normalized variances of the readout and memory observables.
//!
//! Readout measures the output light mode ∫0^T cos(ωt) Ξ(L,t) dt; memory
//! measures the stored spin mode ∫0^L cos(qz) J(z,T) dz. Inputs are coherent
//! (Poissonian) and mutually uncorrelated: white light noise of density Ξ̄3
//! and white spin noise of density J̄x/2. In units of the SQL each variance
//! splits as
//!
//! ```text
//! v1 = F + 2rκc·Γ        (β-coupled: Ξ1 for readout, Jy for memory)
//! v2 = F + 2κc/r·Γ       (ε-coupled: Ξ2 for readout, Jz for memory)
//! ```
//!
//! where F is the retained fraction of the measured input mode and Γ the
//! normalized overlap with the conjugate input. On the red wing
//! F + 2κcΓ = 1 exactly; on the blue wing F − 2|κc|Γ = 1.
//!
//! With κ2 = Ω = 0 both quantities come from the kernels by nested
//! quadrature (the kernel path); otherwise the lattice transfer matrix is
//! contracted with the filter (the matrix path).

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{finite, Result};
use crate::kernels::KernelSet;
use crate::model::{DimensionlessGroups, Grid, PhysicalParams};
use crate::oracle::build_transfer_matrix;
use crate::quadrature::{GaussLegendre, PANEL_ORDER};
use crate::transfer::{BinScale, TransferMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Input spin modes to output temporal light modes.
    Readout,
    /// Input temporal light modes to output spatial spin modes.
    Memory,
}

/// Variances of both observables at one κc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBreakdown {
    pub protocol: Protocol,
    pub kappa_c: f64,
    /// βJ for readout, βΞ̄3T for memory.
    pub abscissa: f64,
    /// Retained fraction F of the measured input mode.
    pub f: f64,
    /// Conjugate-input overlap Γ.
    pub gamma: f64,
    /// β-coupled observable (Ξ1 or Jy).
    pub v1: f64,
    /// ε-coupled observable (Ξ2 or Jz).
    pub v2: f64,
    /// Input-mode variance that normalizes v1 and v2.
    pub sql: f64,
}

impl VarianceBreakdown {
    /// Rescales `sql` from canonical units (Ξ̄3 = J̄x = L = T = 1) to the
    /// units of `params`.
    pub fn in_units(mut self, params: &PhysicalParams) -> Self {
        self.sql *= match self.protocol {
            Protocol::Readout => params.xi3_bar * params.duration,
            Protocol::Memory => params.jx_bar * params.length,
        };
        self
    }
}

/// One observable decomposed by noise source, all in SQL units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelVariance {
    pub variance: f64,
    /// Contribution of the input that the observable is made of.
    pub self_noise: f64,
    /// Contribution of the other species.
    pub cross_noise: f64,
}

/// Both observables of both protocols from one transfer matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralVariances {
    /// [Ξ1, Ξ2].
    pub readout: [ChannelVariance; 2],
    /// [Jz, Jy].
    pub memory: [ChannelVariance; 2],
}

/// Matrix-path variances for arbitrary κ2 and Ω. `time_filter` weights the
/// output light at time t, `space_filter` the output spin at position z.
pub fn general_variances(
    params: &PhysicalParams,
    grid: &Grid,
    time_filter: impl Fn(f64) -> f64,
    space_filter: impl Fn(f64) -> f64,
) -> Result<GeneralVariances> {
    let m = build_transfer_matrix(params, grid)?;
    Ok(contract(&m, time_filter, space_filter))
}

/// Contracts a transfer matrix with readout and memory filters.
pub fn contract(
    m: &TransferMatrix,
    time_filter: impl Fn(f64) -> f64,
    space_filter: impl Fn(f64) -> f64,
) -> GeneralVariances {
    let (p, g, l) = (&m.params, &m.grid, m.layout);
    let scale = BinScale::new(p, g);
    let dt = g.dt(p.duration);
    let dz = g.dz(p.length);
    let channel = |row: &dyn Fn(usize) -> usize, n: usize, weight: &dyn Fn(usize) -> f64, light_out: bool| {
        let mut u = DVector::zeros(l.dim());
        for k in 0..n {
            u[row(k)] = weight(k);
        }
        let norm = u.norm_squared();
        let back = m.matrix.tr_mul(&u);
        let light: f64 = back.rows_range(l.light_range()).norm_squared() / norm;
        let spin: f64 = back.rows_range(l.spin_range()).norm_squared() / norm;
        let (self_noise, cross_noise) = if light_out { (light, spin) } else { (spin, light) };
        ChannelVariance {
            variance: light + spin,
            self_noise,
            cross_noise,
        }
    };
    let tw = |k: usize| time_filter(g.time_at(k, p.duration)) * dt / scale.light;
    let zw = |k: usize| space_filter(g.position_at(k, p.length)) * dz / scale.spin;
    GeneralVariances {
        readout: [
            channel(&|k| l.xi1(k), l.n_time, &tw, true),
            channel(&|k| l.xi2(k), l.n_time, &tw, true),
        ],
        memory: [
            channel(&|k| l.jz(k), l.n_space, &zw, false),
            channel(&|k| l.jy(k), l.n_space, &zw, false),
        ],
    }
}

/// Kernel-path integrals in unit geometry: (∫f², ∫g², ∫cos²) where
/// f is the retained mode profile and g the conjugate overlap profile.
struct ModeIntegrals {
    retained: f64,
    overlap: f64,
    norm: f64,
}

/// Readout integrals for the output mode cos(xτ):
/// f(τ') = cos(xτ') − ∫τ'^1 cos(xτ) K(τ−τ') dτ,
/// g(ζ') = ∫0^1 cos(xτ) G(1−ζ', τ) dτ.
fn readout_integrals(kappa_c: f64, x: f64, grid: &Grid) -> ModeIntegrals {
    let ks = KernelSet::scaled(kappa_c);
    let rule = GaussLegendre::new(PANEL_ORDER);
    let (nt, nz) = (grid.n_time, grid.n_space);
    let ht = 1.0 / nt as f64;
    let mut retained = 0.0;
    let mut norm = 0.0;
    rule.visit_composite(0.0, 1.0, nt, |tp, w| {
        let tail = rule.integrate_on_mesh(tp, 1.0, ht, |t| (x * t).cos() * ks.k_time(t - tp));
        let f = (x * tp).cos() - tail;
        retained += w * f * f;
        norm += w * (x * tp).cos().powi(2);
    });
    let mut overlap = 0.0;
    rule.visit_composite(0.0, 1.0, nz, |zp, w| {
        let g = rule.integrate_composite(0.0, 1.0, nt, |t| (x * t).cos() * ks.cross(1.0 - zp, t));
        overlap += w * g * g;
    });
    ModeIntegrals { retained, overlap, norm }
}

/// Memory integrals for the stored mode cos(xζ):
/// f(ζ') = cos(xζ') − ∫ζ'^1 cos(xζ) Kspace(ζ−ζ') dζ,
/// g(τ') = ∫0^1 cos(xζ) G(ζ, 1−τ') dζ.
fn memory_integrals(kappa_c: f64, x: f64, grid: &Grid) -> ModeIntegrals {
    let ks = KernelSet::scaled(kappa_c);
    let rule = GaussLegendre::new(PANEL_ORDER);
    let (nt, nz) = (grid.n_time, grid.n_space);
    let hz = 1.0 / nz as f64;
    let mut retained = 0.0;
    let mut norm = 0.0;
    rule.visit_composite(0.0, 1.0, nz, |zp, w| {
        let tail = rule.integrate_on_mesh(zp, 1.0, hz, |z| (x * z).cos() * ks.k_space(z - zp));
        let f = (x * zp).cos() - tail;
        retained += w * f * f;
        norm += w * (x * zp).cos().powi(2);
    });
    let mut overlap = 0.0;
    rule.visit_composite(0.0, 1.0, nt, |tp, w| {
        let g = rule.integrate_composite(0.0, 1.0, nz, |z| (x * z).cos() * ks.cross(z, 1.0 - tp));
        overlap += w * g * g;
    });
    ModeIntegrals { retained, overlap, norm }
}

/// Variances for one protocol at the groups' κc. Uses the kernel path when
/// κ2L = ΩT = 0 and the matrix path on `grid` otherwise; in the latter
/// case F and Γ are read from the β-coupled observable.
pub fn variances(protocol: Protocol, groups: &DimensionlessGroups, grid: &Grid) -> Result<VarianceBreakdown> {
    grid.validate()?;
    finite("kappa_c", groups.kappa_c)?;
    let x = match protocol {
        Protocol::Readout => groups.omega_t,
        Protocol::Memory => groups.q_l,
    };
    finite("mode frequency", x)?;
    let abscissa = match protocol {
        Protocol::Readout => groups.beta_j,
        Protocol::Memory => groups.beta_xi3_t,
    };
    let spin_sql_factor = match protocol {
        Protocol::Readout => 1.0,
        Protocol::Memory => 0.5,
    };
    if groups.kappa2_l == 0.0 && groups.omega_total_t == 0.0 {
        let ints = match protocol {
            Protocol::Readout => readout_integrals(groups.kappa_c, x, grid),
            Protocol::Memory => memory_integrals(groups.kappa_c, x, grid),
        };
        let f = ints.retained / ints.norm;
        let gamma = 0.5 * ints.overlap / ints.norm;
        return Ok(VarianceBreakdown {
            protocol,
            kappa_c: groups.kappa_c,
            abscissa,
            f,
            gamma,
            v1: f + groups.strong_weight() * gamma,
            v2: f + groups.weak_weight() * gamma,
            sql: spin_sql_factor * cos_squared_integral(x),
        });
    }
    let params = PhysicalParams::canonical(groups)?;
    let gv = general_variances(&params, grid, |t| (x * t).cos(), |z| (x * z).cos())?;
    let (strong, weak) = match protocol {
        Protocol::Readout => (gv.readout[0], gv.readout[1]),
        Protocol::Memory => (gv.memory[1], gv.memory[0]),
    };
    let weight = groups.strong_weight();
    Ok(VarianceBreakdown {
        protocol,
        kappa_c: groups.kappa_c,
        abscissa,
        f: strong.self_noise,
        gamma: if weight != 0.0 { strong.cross_noise / weight } else { 0.0 },
        v1: strong.variance,
        v2: weak.variance,
        sql: spin_sql_factor * cos_squared_integral(x),
    })
}

/// ∫0^1 cos²(xτ) dτ.
pub fn cos_squared_integral(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        0.5 + (2.0 * x).sin() / (4.0 * x)
    }
}

pub fn readout_variances(groups: &DimensionlessGroups, grid: &Grid) -> Result<VarianceBreakdown> {
    variances(Protocol::Readout, groups, grid)
}

pub fn memory_variances(groups: &DimensionlessGroups, grid: &Grid) -> Result<VarianceBreakdown> {
    variances(Protocol::Memory, groups, grid)
}

/// Evaluates `variances` at every κc in `kappas` (in parallel, rows kept
/// in input order).
pub fn scan(
    protocol: Protocol,
    base: &DimensionlessGroups,
    kappas: &[f64],
    grid: &Grid,
) -> Result<Vec<VarianceBreakdown>> {
    kappas
        .par_iter()
        .map(|&k| variances(protocol, &base.with_kappa_c(k), grid))
        .collect()
}

/// Normalized overlap between the light input profile that feeds the
/// stored spin mode cos(qLζ) and the temporal mode cos(ωTτ):
/// |⟨g, cos⟩| / (‖g‖‖cos‖) with g(τ') = ∫0^1 cos(qLζ) G(ζ, 1−τ') dζ.
pub fn memory_mode_overlap(kappa_c: f64, q_l: f64, omega_t: f64, panels: usize) -> f64 {
    let ks = KernelSet::scaled(kappa_c);
    let rule = GaussLegendre::new(PANEL_ORDER);
    let (mut dot, mut gg, mut cc) = (0.0, 0.0, 0.0);
    rule.visit_composite(0.0, 1.0, panels, |tp, w| {
        let g = rule.integrate_composite(0.0, 1.0, panels, |z| (q_l * z).cos() * ks.cross(z, 1.0 - tp));
        let c = (omega_t * tp).cos();
        dot += w * g * c;
        gg += w * g * g;
        cc += w * c * c;
    });
    dot.abs() / (gg * cc).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn groups(kappa_c: f64, r: f64, x: f64) -> DimensionlessGroups {
        DimensionlessGroups::from_reduced(kappa_c, r, x, x, 0.0, 0.0, 0.5, 0.5).unwrap()
    }

    #[test]
    fn coupling_off_gives_sql() {
        let grid = Grid::square(32).unwrap();
        let v = readout_variances(&groups(0.0, 10.0, 0.5), &grid).unwrap();
        assert!((v.v1 - 1.0).abs() < 1e-14 && (v.v2 - 1.0).abs() < 1e-14);
        assert!((v.sql - (0.5 + 1f64.sin() / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn red_wing_identity() {
        let grid = Grid::square(64).unwrap();
        for &k in &[0.1, 0.7, 2.0] {
            for protocol in [Protocol::Readout, Protocol::Memory] {
                let v = variances(protocol, &groups(k, 3.0, 1.3), &grid).unwrap();
                assert!((v.f + 2.0 * k * v.gamma - 1.0).abs() < 1e-10, "{protocol:?} κ = {k}");
            }
        }
    }

    #[test]
    fn blue_wing_identity() {
        let grid = Grid::square(64).unwrap();
        let v = readout_variances(&groups(-1.5, -3.0, 0.5), &grid).unwrap();
        assert!((v.f - 3.0 * v.gamma - 1.0).abs() < 1e-9);
        assert!(v.v1 > v.v2 && v.v2 > 1.0);
    }

    #[test]
    fn weak_precession_is_continuous() {
        let grid = Grid::square(96).unwrap();
        let g0 = groups(1.0, 4.0, 0.5);
        let mut g1 = g0;
        g1.omega_total_t = 1e-6;
        let a = readout_variances(&g0, &grid).unwrap();
        let b = readout_variances(&g1, &grid).unwrap();
        assert!(((a.v1 - b.v1) / a.v1).abs() < 1e-3);
        assert!(((a.v2 - b.v2) / a.v2).abs() < 1e-3);
    }

    #[test]
    fn memory_overlap_has_a_local_peak_near_omega_t_four() {
        let ws: Vec<f64> = (1..=120).map(|i| 0.1 * i as f64).collect();
        let o: Vec<f64> = ws.iter().map(|&w| memory_mode_overlap(2.0, 0.5, w, 24)).collect();
        let peak = (1..o.len() - 1)
            .find(|&i| o[i] > o[i - 1] && o[i] > o[i + 1])
            .map(|i| ws[i])
            .unwrap();
        assert!((3.5..=5.0).contains(&peak), "first local maximum at {peak}");
    }
}
