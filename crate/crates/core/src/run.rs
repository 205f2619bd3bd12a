//! Executes a [`RunConfig`], writing a CSV table and a `.meta.json` sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Mode, RunConfig};
use crate::model::Grid;
use crate::records::{random_compact_inputs, random_smooth_inputs};
use crate::spectral::{group_velocity, laplace_identity_residual, measure_packet_velocity, paired_wavenumber};
use crate::variance::{scan, Protocol};
use crate::{kernels, oracle};

/// Smallest grid accepted for readout and memory scans.
pub const MIN_SCAN_BINS: usize = 64;
/// Pass threshold of symplectic-check.
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-8;
/// Pass threshold of oracle-compare.
pub const ORACLE_TOLERANCE: f64 = 1e-6;
/// Pass threshold of laplace-check.
pub const LAPLACE_TOLERANCE: f64 = 1e-5;
/// Pass threshold of packet-velocity (relative).
pub const PACKET_TOLERANCE: f64 = 0.05;

pub const READOUT_HEADER: [&str; 7] = ["kappa_c", "beta_J", "F_light", "Gamma", "v1", "v2", "sql"];
pub const MEMORY_HEADER: [&str; 7] = ["kappa_c", "beta_xi3_T", "F_spin", "Gamma", "v_y", "v_z", "sql"];

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    /// Human-readable lines for stdout.
    pub lines: Vec<String>,
    /// False when a check mode exceeded its tolerance.
    pub passed: bool,
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
}

#[derive(Serialize)]
struct Meta<'a> {
    mode: &'a str,
    config_sha256: String,
    grid: Grid,
    version: &'static str,
}

/// Formats a value with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// SHA-256 of the canonical JSON form of the effective config.
pub fn config_hash(config: &RunConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Path of the metadata sidecar for a CSV path.
pub fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write(&self, path: &Path) -> anyhow::Result<()> {
        let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs `config`, writing the CSV to `out` and metadata beside it.
pub fn run(config: &RunConfig, out: &Path) -> anyhow::Result<RunReport> {
    let mut lines = Vec::new();
    let mut passed = true;
    let table = match config.mode {
        Mode::Readout | Mode::Memory => scan_table(config, &mut lines)?,
        Mode::Dispersion => dispersion_table(config, &mut lines)?,
        Mode::OracleCompare => oracle_table(config, &mut lines, &mut passed)?,
        Mode::SymplecticCheck => symplectic_table(config, &mut lines, &mut passed)?,
        Mode::PacketVelocity => packet_table(config, &mut lines, &mut passed)?,
        Mode::LaplaceCheck => laplace_table(config, &mut lines, &mut passed)?,
    };
    table.write(out)?;
    let meta = Meta {
        mode: config.mode.name(),
        config_sha256: config_hash(config),
        grid: config.grid,
        version: env!("CARGO_PKG_VERSION"),
    };
    let mpath = meta_path(out);
    let mut f = File::create(&mpath).with_context(|| format!("cannot write {}", mpath.display()))?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    writeln!(f)?;
    Ok(RunReport {
        lines,
        passed,
        csv_path: out.to_path_buf(),
        meta_path: mpath,
    })
}

fn scan_table(config: &RunConfig, lines: &mut Vec<String>) -> anyhow::Result<Table> {
    config
        .grid
        .require(MIN_SCAN_BINS)
        .context("readout and memory scans need at least 64 bins per axis")?;
    let protocol = if config.mode == Mode::Readout {
        Protocol::Readout
    } else {
        Protocol::Memory
    };
    let base = config.groups()?;
    let range = config.scan.expect("scan block validated");
    let kappas = range.values();
    if kappas.is_empty() {
        bail!(crate::Error::EmptyRange);
    }
    if kappas.iter().any(|&k| k != 0.0 && k.signum() != base.ratio_r.signum()) {
        bail!("scan range crosses zero: κc must keep the sign of r");
    }
    let physical = match &config.model {
        crate::config::ModelBlock::Physical(p) => Some(*p),
        crate::config::ModelBlock::Groups(_) => None,
    };
    let rows = scan(protocol, &base, &kappas, &config.grid)?;
    let mut table = Table::new(if protocol == Protocol::Readout {
        &READOUT_HEADER
    } else {
        &MEMORY_HEADER
    });
    for row in rows {
        let row = match &physical {
            Some(p) => row.in_units(p),
            None => row,
        };
        table.push(
            [row.kappa_c, row.abscissa, row.f, row.gamma, row.v1, row.v2, row.sql]
                .into_iter()
                .map(fmt17)
                .collect(),
        );
    }
    lines.push(format!("{} scan: {} rows", config.mode.name(), table.rows.len()));
    Ok(table)
}

fn dispersion_table(config: &RunConfig, lines: &mut Vec<String>) -> anyhow::Result<Table> {
    let g = config.groups()?;
    let abs_a_lt = g.kappa_c.abs();
    let q_l = paired_wavenumber(abs_a_lt, g.omega_t)?;
    // v_g in units of L/T with A·LT = −κc
    let v_g = group_velocity(-g.kappa_c, q_l)?;
    lines.push(format!("|A|LT = {abs_a_lt}, omega_T = {} -> |q|L = {q_l}", g.omega_t));
    lines.push(format!("group velocity = {v_g} L/T"));
    let mut t = Table::new(&["abs_A_LT", "omega_T", "q_L", "group_velocity"]);
    t.push([abs_a_lt, g.omega_t, q_l, v_g].into_iter().map(fmt17).collect());
    Ok(t)
}

fn oracle_table(config: &RunConfig, lines: &mut Vec<String>, passed: &mut bool) -> anyhow::Result<Table> {
    let p = config.physical()?;
    let grid = config.grid;
    let profiles = config.probe.profiles.unwrap_or(20);
    let seed = config.probe.seed.unwrap_or(0);
    let mut t = Table::new(&["profile", "seed", "max_rel_deviation"]);
    let mut worst: f64 = 0.0;
    for i in 0..profiles {
        let s = seed + i as u64;
        let (f, sp) = random_smooth_inputs(&grid, p.length, p.duration, s);
        let kf = kernels::output_field(&p, &grid, &f, &sp)?;
        let ks = kernels::output_spin(&p, &grid, &f, &sp)?;
        let (of, os) = oracle::integrate_extrapolated(&p, &grid, &f, &sp)?;
        let scale = kf.max_abs().max(ks.max_abs()).max(f64::MIN_POSITIVE);
        let dev = kf.max_abs_diff(&of).max(ks.max_abs_diff(&os)) / scale;
        worst = worst.max(dev);
        t.push(vec![i.to_string(), s.to_string(), fmt17(dev)]);
    }
    *passed = worst <= ORACLE_TOLERANCE;
    lines.push(format!(
        "kernel vs oracle: max relative deviation {worst:.3e} over {profiles} profiles ({})",
        verdict(*passed)
    ));
    Ok(t)
}

fn symplectic_table(config: &RunConfig, lines: &mut Vec<String>, passed: &mut bool) -> anyhow::Result<Table> {
    let p = config.physical()?;
    let m = oracle::build_transfer_matrix(&p, &config.grid)?;
    let residual = m.symplectic_residual();
    *passed = residual <= SYMPLECTIC_TOLERANCE;
    lines.push(format!("max symplectic residual {residual:.3e} ({})", verdict(*passed)));
    let g = config.groups()?;
    let mut t = Table::new(&["kappa_c", "kappa2_L", "Omega_T", "residual"]);
    t.push(
        [g.kappa_c, g.kappa2_l, g.omega_total_t, residual]
            .into_iter()
            .map(fmt17)
            .collect(),
    );
    Ok(t)
}

fn packet_table(config: &RunConfig, lines: &mut Vec<String>, passed: &mut bool) -> anyhow::Result<Table> {
    let p = config.physical()?;
    let q0 = config.probe.q0_l.unwrap_or(8.0) / p.length;
    let bandwidth = config.probe.bandwidth.unwrap_or(0.1 * q0.abs());
    if bandwidth > 0.2 * q0.abs() {
        bail!("probe.bandwidth: packet must be narrowband (bandwidth <= 0.2·|q0|)");
    }
    let m = measure_packet_velocity(&p, &config.grid, q0, bandwidth)?;
    *passed = p.a_coupling() == 0.0 || m.relative_error() <= PACKET_TOLERANCE;
    lines.push(format!(
        "q0 = {q0}: measured {:.6e}, predicted {:.6e} ({})",
        m.speed,
        m.predicted,
        verdict(*passed)
    ));
    let mut t = Table::new(&["q0", "v_measured", "v_predicted"]);
    t.push([q0, m.speed, m.predicted].into_iter().map(fmt17).collect());
    Ok(t)
}

fn laplace_table(config: &RunConfig, lines: &mut Vec<String>, passed: &mut bool) -> anyhow::Result<Table> {
    let p = config.physical()?;
    let grid = config.grid;
    let seed = config.probe.seed.unwrap_or(0);
    let (f, sp) = random_compact_inputs(&grid, p.length, p.duration, seed);
    let s_t = config.probe.s_t.clone().unwrap_or_else(|| vec![2.0, 5.0, 10.0]);
    let mut t = Table::new(&["s", "residual"]);
    let mut worst: f64 = 0.0;
    for st in s_t {
        let s = st / p.duration;
        let r = laplace_identity_residual(&p, &grid, &f, &sp, s)?;
        worst = worst.max(r);
        t.push(vec![fmt17(s), fmt17(r)]);
    }
    *passed = worst <= LAPLACE_TOLERANCE;
    lines.push(format!("Laplace identity: max residual {worst:.3e} ({})", verdict(*passed)));
    Ok(t)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
