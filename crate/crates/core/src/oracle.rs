//! Direct lattice integration of the coupled equations, valid for any κ2
//! and Ω.
//!
//! Each (Δz × Δt) cell carries light through its time edge and spins
//! through its space edge. The cell update is the implicit midpoint (box)
//! rule applied to both pairs at once,
//!
//! ```text
//! Xo − Xi = Δz [R (Xi+Xo)/2 + B (Yi+Yo)/2]
//! Yo − Yi = Δt [S (Yi+Yo)/2 + C (Xi+Xo)/2]
//! ```
//!
//! with X = (Ξ1, Ξ2), Y = (Jz, Jy). It is second order and exactly
//! preserves the discrete commutator form. The 4×4 cell map is solved once
//! and reused for every cell, sweeping planes in z and steps in t.

use nalgebra::{DMatrix, Matrix2, Matrix4, Vector4};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Grid, PhysicalParams};
use crate::quadrature::MidpointSamples;
use crate::records::{FieldRecord, SpinRecord};
use crate::transfer::{BinScale, Layout, TransferMatrix};

/// Largest admitted value of |κ2|Δz, |Ω|Δt and √(|a|ΔzΔt).
pub const STABILITY_LIMIT: f64 = 0.5;

/// Odd sub-division used by [`integrate_extrapolated`], so that the centre
/// sub-bin midpoint coincides with the coarse midpoint.
pub const REFINE_FACTOR: usize = 3;

/// The per-cell map (Xi, Yi) ↦ (Xo, Yo).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMap {
    map: Matrix4<f64>,
}

impl CellMap {
    pub fn new(params: &PhysicalParams, grid: &Grid) -> Result<Self> {
        params.validate()?;
        grid.validate()?;
        check_resolution(params, grid)?;
        let hz = grid.dz(params.length);
        let ht = grid.dt(params.duration);
        let omega = params.omega();
        let r = Matrix2::new(0.0, -params.kappa2, params.kappa2, 0.0);
        let b = Matrix2::new(params.light_from_jz(), 0.0, 0.0, params.light_from_jy());
        let s = Matrix2::new(0.0, omega, -omega, 0.0);
        let c = Matrix2::new(params.jz_from_light(), 0.0, 0.0, params.jy_from_light());
        let id = Matrix2::identity();
        let mut lhs = Matrix4::zeros();
        let mut rhs = Matrix4::zeros();
        let blocks = [
            (0, 0, id - r * (0.5 * hz), id + r * (0.5 * hz)),
            (0, 2, -b * (0.5 * hz), b * (0.5 * hz)),
            (2, 0, -c * (0.5 * ht), c * (0.5 * ht)),
            (2, 2, id - s * (0.5 * ht), id + s * (0.5 * ht)),
        ];
        for (i, j, l, rr) in blocks {
            lhs.fixed_view_mut::<2, 2>(i, j).copy_from(&l);
            rhs.fixed_view_mut::<2, 2>(i, j).copy_from(&rr);
        }
        let inv = lhs.try_inverse().ok_or(Error::Pole)?;
        Ok(Self { map: inv * rhs })
    }

    #[inline]
    pub fn step(&self, x: [f64; 2], y: [f64; 2]) -> ([f64; 2], [f64; 2]) {
        let v = self.map * Vector4::new(x[0], x[1], y[0], y[1]);
        ([v[0], v[1]], [v[2], v[3]])
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.map
    }
}

fn check_resolution(params: &PhysicalParams, grid: &Grid) -> Result<()> {
    let hz = grid.dz(params.length);
    let ht = grid.dt(params.duration);
    let checks = [
        ("|kappa2|*dz", params.kappa2.abs() * hz),
        ("|omega|*dt", params.omega().abs() * ht),
        ("sqrt(|a|*dz*dt)", (params.a_coupling().abs() * hz * ht).sqrt()),
    ];
    for (product, value) in checks {
        if value.is_nan() || value > STABILITY_LIMIT {
            return Err(Error::Unstable {
                product,
                value,
                limit: STABILITY_LIMIT,
            });
        }
    }
    Ok(())
}

/// Integrates raw boundary data on the given grid. Light samples are read at
/// z = 0 and returned at z = L; spin samples at t = 0 and returned at t = T.
pub fn integrate(
    params: &PhysicalParams,
    grid: &Grid,
    field_in: &FieldRecord,
    spin_in: &SpinRecord,
) -> Result<(FieldRecord, SpinRecord)> {
    field_in.check(grid)?;
    spin_in.check(grid)?;
    let cell = CellMap::new(params, grid)?;
    let mut x: Vec<[f64; 2]> = (0..grid.n_time)
        .map(|n| [field_in.xi1[n], field_in.xi2[n]])
        .collect();
    let mut spin_out = SpinRecord::zeros(grid.n_space);
    for j in 0..grid.n_space {
        let mut y = [spin_in.jz[j], spin_in.jy[j]];
        for xn in x.iter_mut() {
            let (xo, yo) = cell.step(*xn, y);
            *xn = xo;
            y = yo;
        }
        spin_out.jz[j] = y[0];
        spin_out.jy[j] = y[1];
    }
    let field_out = FieldRecord {
        xi1: x.iter().map(|v| v[0]).collect(),
        xi2: x.iter().map(|v| v[1]).collect(),
    };
    Ok((field_out, spin_out))
}

/// Integrates on a grid refined `factor` times (odd) with inputs
/// interpolated to the sub-bins, and returns outputs at the coarse
/// midpoints.
pub fn integrate_refined(
    params: &PhysicalParams,
    grid: &Grid,
    field_in: &FieldRecord,
    spin_in: &SpinRecord,
    factor: usize,
) -> Result<(FieldRecord, SpinRecord)> {
    if factor.is_multiple_of(2) {
        return Err(Error::InvalidParameter {
            name: "factor",
            value: factor as f64,
            reason: "refinement factor must be odd",
        });
    }
    field_in.check(grid)?;
    spin_in.check(grid)?;
    if factor == 1 {
        return integrate(params, grid, field_in, spin_in);
    }
    let fine = grid.refined(factor);
    let (len, dur) = (params.length, params.duration);
    let fi1 = MidpointSamples::new(&field_in.xi1, dur);
    let fi2 = MidpointSamples::new(&field_in.xi2, dur);
    let sz = MidpointSamples::new(&spin_in.jz, len);
    let sy = MidpointSamples::new(&spin_in.jy, len);
    let f = FieldRecord::sample(&fine, dur, |t| (fi1.at(t), fi2.at(t)));
    let s = SpinRecord::sample(&fine, len, |z| (sz.at(z), sy.at(z)));
    let (fo, so) = integrate(params, &fine, &f, &s)?;
    let mid = factor / 2;
    let pick = |v: &[f64], n: usize| -> Vec<f64> { (0..n).map(|k| v[k * factor + mid]).collect() };
    Ok((
        FieldRecord {
            xi1: pick(&fo.xi1, grid.n_time),
            xi2: pick(&fo.xi2, grid.n_time),
        },
        SpinRecord {
            jz: pick(&so.jz, grid.n_space),
            jy: pick(&so.jy, grid.n_space),
        },
    ))
}

/// Richardson combination (9·u₃ − u₁)/8 of the base and 3× refined runs,
/// cancelling the leading h² error of the box rule.
pub fn integrate_extrapolated(
    params: &PhysicalParams,
    grid: &Grid,
    field_in: &FieldRecord,
    spin_in: &SpinRecord,
) -> Result<(FieldRecord, SpinRecord)> {
    let (f1, s1) = integrate(params, grid, field_in, spin_in)?;
    let (f3, s3) = integrate_refined(params, grid, field_in, spin_in, REFINE_FACTOR)?;
    let k = (REFINE_FACTOR * REFINE_FACTOR) as f64;
    let mix = |fine: &[f64], coarse: &[f64]| -> Vec<f64> {
        fine.iter().zip(coarse).map(|(a, b)| (k * a - b) / (k - 1.0)).collect()
    };
    Ok((
        FieldRecord {
            xi1: mix(&f3.xi1, &f1.xi1),
            xi2: mix(&f3.xi2, &f1.xi2),
        },
        SpinRecord {
            jz: mix(&s3.jz, &s1.jz),
            jy: mix(&s3.jy, &s1.jy),
        },
    ))
}

/// Responses to a unit raw impulse in the first bin of one input, recorded
/// at every plane (light) and every step (spin).
struct ImpulseHistory {
    /// light[plane][component][time bin], planes 0..=n_space.
    light: Vec<[Vec<f64>; 2]>,
    /// spin[level][component][space bin], levels 0..=n_time.
    spin: Vec<[Vec<f64>; 2]>,
}

fn record_impulse(cell: &CellMap, grid: &Grid, source: usize) -> ImpulseHistory {
    let (nt, nz) = (grid.n_time, grid.n_space);
    let zeros = |n| [vec![0.0; n], vec![0.0; n]];
    let mut light = vec![zeros(nt); nz + 1];
    let mut spin = vec![zeros(nz); nt + 1];
    let mut x = vec![[0.0; 2]; nt];
    if source < 2 {
        x[0][source] = 1.0;
    }
    for n in 0..nt {
        light[0][0][n] = x[n][0];
        light[0][1][n] = x[n][1];
    }
    for j in 0..nz {
        let mut y = [0.0; 2];
        if source >= 2 && j == 0 {
            y[source - 2] = 1.0;
        }
        spin[0][0][j] = y[0];
        spin[0][1][j] = y[1];
        for (n, xn) in x.iter_mut().enumerate() {
            let (xo, yo) = cell.step(*xn, y);
            *xn = xo;
            y = yo;
            spin[n + 1][0][j] = y[0];
            spin[n + 1][1][j] = y[1];
        }
        for n in 0..nt {
            light[j + 1][0][n] = x[n][0];
            light[j + 1][1][n] = x[n][1];
        }
    }
    ImpulseHistory { light, spin }
}

/// Full bin-to-bin map from the lattice. Because every cell is identical,
/// four impulse sweeps (one per input component, in its first bin) give
/// every column by translation.
pub fn build_transfer_matrix(params: &PhysicalParams, grid: &Grid) -> Result<TransferMatrix> {
    let cell = CellMap::new(params, grid)?;
    let layout = Layout::new(grid);
    let scale = BinScale::new(params, grid);
    let (nt, nz) = (grid.n_time, grid.n_space);
    let hist: Vec<ImpulseHistory> = (0..4)
        .into_par_iter()
        .map(|source| record_impulse(&cell, grid, source))
        .collect();
    let l2s = scale.light / scale.spin;
    let dim = layout.dim();
    let columns: Vec<Vec<f64>> = (0..dim)
        .into_par_iter()
        .map(|col| {
            let mut out = vec![0.0; dim];
            if col < 2 * nt {
                let (c, m) = (col / nt, col % nt);
                let h = &hist[c];
                for oc in 0..2 {
                    for n in m..nt {
                        out[layout.light(oc, n)] = h.light[nz][oc][n - m];
                    }
                    for j in 0..nz {
                        out[layout.spin(oc, j)] = h.spin[nt - m][oc][j] / l2s;
                    }
                }
            } else {
                let r = col - 2 * nt;
                let (c, j0) = (r / nz, r % nz);
                let h = &hist[2 + c];
                for oc in 0..2 {
                    for n in 0..nt {
                        out[layout.light(oc, n)] = h.light[nz - j0][oc][n] * l2s;
                    }
                    for j in j0..nz {
                        out[layout.spin(oc, j)] = h.spin[nt][oc][j - j0];
                    }
                }
            }
            out
        })
        .collect();
    let matrix = DMatrix::from_fn(dim, dim, |i, j| columns[j][i]);
    Ok(TransferMatrix {
        params: *params,
        grid: *grid,
        layout,
        matrix,
    })
}
