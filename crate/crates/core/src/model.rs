//! Physical parameters of the light/spin system and their dimensionless
//! reductions.
//!
//! The coupled equations solved throughout the crate are
//!
//! ```text
//! ∂z Ξ1 = −κ2 Ξ2 + 2β Ξ̄3 Jz        ∂t Jz =  Ω Jy − ε J̄x Ξ1
//! ∂z Ξ2 =  κ2 Ξ1 − 2ε Ξ̄3 Jy        ∂t Jy = −Ω Jz + β J̄x Ξ2
//! ```
//!
//! with Ω = Ω0 + Ω2 and the 1/c transport term dropped. Light enters at
//! z = 0 for t ∈ [0, T]; spins are prepared at t = 0 for z ∈ [0, L].

use serde::{Deserialize, Serialize};

use crate::error::{finite, positive, Error, Result};

/// Coupling constants, mean polarizations and extents, in caller-chosen
/// but self-consistent units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    /// Faraday rotation angle per spin flip along z.
    pub beta: f64,
    /// Cotton-Mouton ellipticity per spin flip along y.
    pub epsilon: f64,
    /// Birefringence rate (per unit length).
    #[serde(default)]
    pub kappa2: f64,
    /// Larmor precession frequency.
    #[serde(default)]
    pub omega0: f64,
    /// Light-shift frequency.
    #[serde(default)]
    pub omega2: f64,
    /// Mean third Stokes component (photon flux).
    pub xi3_bar: f64,
    /// Mean spin linear density along x.
    pub jx_bar: f64,
    /// Sample length L.
    #[serde(rename = "length_L")]
    pub length: f64,
    /// Pulse duration T.
    #[serde(rename = "time_T")]
    pub duration: f64,
}

impl PhysicalParams {
    /// Checks the invariants: every field finite, L, T, Ξ̄3, J̄x strictly
    /// positive. β and ε may carry either sign.
    pub fn validate(&self) -> Result<()> {
        finite("beta", self.beta)?;
        finite("epsilon", self.epsilon)?;
        finite("kappa2", self.kappa2)?;
        finite("omega0", self.omega0)?;
        finite("omega2", self.omega2)?;
        positive("xi3_bar", self.xi3_bar)?;
        positive("jx_bar", self.jx_bar)?;
        positive("length_L", self.length)?;
        positive("time_T", self.duration)?;
        Ok(())
    }

    /// Total precession frequency Ω = Ω0 + Ω2.
    pub fn omega(&self) -> f64 {
        self.omega0 + self.omega2
    }

    /// a = 2βεΞ̄3J̄x = −A. Positive on the red wing (βε > 0).
    pub fn a_coupling(&self) -> f64 {
        2.0 * self.beta * self.epsilon * self.xi3_bar * self.jx_bar
    }

    /// Dispersion constant A = −2βεΞ̄3J̄x, with p(s) = A/s.
    pub fn dispersion_constant(&self) -> f64 {
        -self.a_coupling()
    }

    /// Light-from-spin coupling 2βΞ̄3 of the Ξ1 equation.
    pub fn light_from_jz(&self) -> f64 {
        2.0 * self.beta * self.xi3_bar
    }

    /// Light-from-spin coupling −2εΞ̄3 of the Ξ2 equation.
    pub fn light_from_jy(&self) -> f64 {
        -2.0 * self.epsilon * self.xi3_bar
    }

    /// Spin-from-light coupling −εJ̄x of the Jz equation.
    pub fn jz_from_light(&self) -> f64 {
        -self.epsilon * self.jx_bar
    }

    /// Spin-from-light coupling βJ̄x of the Jy equation.
    pub fn jy_from_light(&self) -> f64 {
        self.beta * self.jx_bar
    }

    /// True when κ2 = Ω = 0, the regime with a closed-form solution.
    pub fn is_kernel_regime(&self) -> bool {
        self.kappa2 == 0.0 && self.omega() == 0.0
    }

    /// Unit-normalized parameter set (L = T = Ξ̄3 = J̄x = 1) reproducing the
    /// given dimensionless groups.
    pub fn canonical(groups: &DimensionlessGroups) -> Result<Self> {
        let (beta, epsilon) = groups.split_couplings()?;
        Ok(Self {
            beta,
            epsilon,
            kappa2: groups.kappa2_l,
            omega0: groups.omega_total_t,
            omega2: 0.0,
            xi3_bar: 1.0,
            jx_bar: 1.0,
            length: 1.0,
            duration: 1.0,
        })
    }
}

/// Reduced parameters that fully determine SQL-normalized outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessGroups {
    /// a = 2βεΞ̄3J̄x (units 1/(length·time)); equals −A.
    pub a_coupling: f64,
    /// κc = aLT = −ALT.
    pub kappa_c: f64,
    /// r = β/ε. Infinite when ε = 0.
    pub ratio_r: f64,
    /// Readout detection frequency ωT.
    pub omega_t: f64,
    /// Memory spatial wavenumber qL.
    pub q_l: f64,
    /// κ2L.
    pub kappa2_l: f64,
    /// (Ω0 + Ω2)T.
    pub omega_total_t: f64,
    /// βJ with J = J̄xL.
    pub beta_j: f64,
    /// βΞ̄3T.
    pub beta_xi3_t: f64,
}

/// Default εΞ̄3T and εJ̄xL used to relabel κc as βJ or βΞ̄3T when only
/// dimensionless groups are supplied. With 1/2, βJ = βΞ̄3T = κc.
pub const DEFAULT_EPSILON_PRODUCT: f64 = 0.5;

impl DimensionlessGroups {
    /// Builds the groups directly from reduced inputs. `eps_xi3_t` (εΞ̄3T) and
    /// `eps_jx_l` (εJ̄xL) only affect the βJ / βΞ̄3T abscissa labels.
    #[allow(clippy::too_many_arguments)]
    pub fn from_reduced(
        kappa_c: f64,
        ratio_r: f64,
        omega_t: f64,
        q_l: f64,
        kappa2_l: f64,
        omega_total_t: f64,
        eps_xi3_t: f64,
        eps_jx_l: f64,
    ) -> Result<Self> {
        finite("kappa_c", kappa_c)?;
        finite("omega_T", omega_t)?;
        finite("q_L", q_l)?;
        finite("kappa2_L", kappa2_l)?;
        finite("Omega_T", omega_total_t)?;
        finite("eps_xi3_T", eps_xi3_t)?;
        finite("eps_jx_L", eps_jx_l)?;
        if ratio_r.is_nan() || ratio_r == 0.0 {
            return Err(Error::InvalidParameter {
                name: "r",
                value: ratio_r,
                reason: "must be nonzero",
            });
        }
        if eps_xi3_t == 0.0 || eps_jx_l == 0.0 {
            return Err(Error::InvalidParameter {
                name: "eps_xi3_T/eps_jx_L",
                value: 0.0,
                reason: "abscissa relabeling needs a nonzero ε product",
            });
        }
        Ok(Self {
            a_coupling: kappa_c,
            kappa_c,
            ratio_r,
            omega_t,
            q_l,
            kappa2_l,
            omega_total_t,
            beta_j: kappa_c / (2.0 * eps_xi3_t),
            beta_xi3_t: kappa_c / (2.0 * eps_jx_l),
        })
    }

    /// Returns the same groups at a different κc (ratio and frequencies
    /// kept). βJ and βΞ̄3T are rescaled proportionally.
    pub fn with_kappa_c(&self, kappa_c: f64) -> Self {
        let scale_j = if self.kappa_c != 0.0 {
            self.beta_j / self.kappa_c
        } else {
            1.0 / (2.0 * DEFAULT_EPSILON_PRODUCT)
        };
        let scale_t = if self.kappa_c != 0.0 {
            self.beta_xi3_t / self.kappa_c
        } else {
            1.0 / (2.0 * DEFAULT_EPSILON_PRODUCT)
        };
        Self {
            a_coupling: kappa_c * self.a_per_kappa(),
            kappa_c,
            beta_j: kappa_c * scale_j,
            beta_xi3_t: kappa_c * scale_t,
            ..*self
        }
    }

    fn a_per_kappa(&self) -> f64 {
        if self.kappa_c != 0.0 {
            self.a_coupling / self.kappa_c
        } else {
            1.0
        }
    }

    /// 2rκc: weight of the spin input in the β-coupled observable (Ξ1 for
    /// readout, Jy for memory). Equals 4β²Ξ̄3J̄xLT.
    pub fn strong_weight(&self) -> f64 {
        2.0 * self.ratio_r * self.kappa_c
    }

    /// 2κc/r: weight in the ε-coupled observable. Equals 4ε²Ξ̄3J̄xLT.
    pub fn weak_weight(&self) -> f64 {
        if self.ratio_r.is_infinite() {
            0.0
        } else {
            2.0 * self.kappa_c / self.ratio_r
        }
    }

    /// (β, ε) in canonical units (Ξ̄3 = J̄x = L = T = 1).
    fn split_couplings(&self) -> Result<(f64, f64)> {
        if self.kappa_c == 0.0 {
            return Ok((0.0, 0.0));
        }
        if !self.ratio_r.is_finite() || self.ratio_r.signum() != self.kappa_c.signum() {
            return Err(Error::InvalidParameter {
                name: "r",
                value: self.ratio_r,
                reason: "must be finite with the sign of kappa_c (sign of βε)",
            });
        }
        let epsilon = (self.kappa_c / (2.0 * self.ratio_r)).sqrt();
        Ok((self.ratio_r * epsilon, epsilon))
    }
}

/// Derives every reduced group from physical parameters plus the chosen
/// detection frequency ωT and spatial wavenumber qL.
pub fn derive_groups(params: &PhysicalParams, omega_t: f64, q_l: f64) -> Result<DimensionlessGroups> {
    params.validate()?;
    finite("omega_T", omega_t)?;
    finite("q_L", q_l)?;
    let a = params.a_coupling();
    let ratio_r = params.beta / params.epsilon;
    if ratio_r.is_nan() {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: params.epsilon,
            reason: "β = ε = 0 leaves r undefined",
        });
    }
    Ok(DimensionlessGroups {
        a_coupling: a,
        kappa_c: a * params.length * params.duration,
        ratio_r,
        omega_t,
        q_l,
        kappa2_l: params.kappa2 * params.length,
        omega_total_t: params.omega() * params.duration,
        beta_j: params.beta * params.jx_bar * params.length,
        beta_xi3_t: params.beta * params.xi3_bar * params.duration,
    })
}

/// Uniform binning of [0, T] and [0, L]. Records are sampled at bin
/// midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub n_time: usize,
    pub n_space: usize,
}

impl Grid {
    pub const MIN_BINS: usize = 2;

    pub fn new(n_time: usize, n_space: usize) -> Result<Self> {
        let grid = Self { n_time, n_space };
        grid.validate()?;
        Ok(grid)
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn validate(&self) -> Result<()> {
        self.require(Self::MIN_BINS)
    }

    /// Rejects grids with fewer than `min` bins along either axis.
    pub fn require(&self, min: usize) -> Result<()> {
        if self.n_time < min {
            return Err(Error::GridTooCoarse {
                axis: "n_time",
                count: self.n_time,
                min,
            });
        }
        if self.n_space < min {
            return Err(Error::GridTooCoarse {
                axis: "n_space",
                count: self.n_space,
                min,
            });
        }
        Ok(())
    }

    pub fn dt(&self, duration: f64) -> f64 {
        duration / self.n_time as f64
    }

    pub fn dz(&self, length: f64) -> f64 {
        length / self.n_space as f64
    }

    /// Midpoint of time bin `k` for a pulse of the given duration.
    pub fn time_at(&self, k: usize, duration: f64) -> f64 {
        (k as f64 + 0.5) * self.dt(duration)
    }

    /// Midpoint of space bin `k` for a sample of the given length.
    pub fn position_at(&self, k: usize, length: f64) -> f64 {
        (k as f64 + 0.5) * self.dz(length)
    }

    /// Same grid with every bin split into `factor` sub-bins.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_time: self.n_time * factor,
            n_space: self.n_space * factor,
        }
    }
}
