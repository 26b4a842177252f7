//! Run configuration: a TOML document with `ensemble`, `couplings`,
//! `protocol`, `metrology`, `output` and (for `sweep`) `sweep` sections.
//! Coupling reports use `double_well`, `geometry`, `cgb` and `bmv` instead.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use qudit_net::gid::{GidSchedule, Orientation};
use qudit_net::params::{Barrier, DoubleWellSpec, Grid};
use qudit_net::params::constants::{AMU, HBAR};
use qudit_net::protocol::{Spacing, TauGrid};
use qudit_net::{Couplings, EnsembleDim};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Gie,
    Gid,
}

/// An angle in radians, or a string such as `"pi/24"` or `"0.5*pi"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Expr(String),
}

impl Angle {
    pub fn radians(&self) -> Result<f64, String> {
        match self {
            Angle::Radians(v) => Ok(*v),
            Angle::Expr(s) => parse_angle(s),
        }
    }
}

fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read angle {s:?}; use radians or a form like \"pi/24\" or \"0.5*pi\"");
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let factor = match num {
        "pi" => 1.0,
        _ => match num.strip_suffix("*pi") {
            Some(f) => f.parse::<f64>().map_err(|_| bad())?,
            None => return t.parse::<f64>().map_err(|_| bad()),
        },
    };
    Ok(factor * PI / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub spacing: Spacing,
}

fn linear() -> Spacing {
    Spacing::Linear
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    pub kind: Kind,
    pub tau_grid: GridSection,
    #[serde(default)]
    pub tau_rot: Option<f64>,
    #[serde(default)]
    pub beta: Option<Angle>,
    #[serde(default)]
    pub theta: Option<Angle>,
    /// Points on the preparation segment before the rotation.
    #[serde(default)]
    pub prep_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetrologySection {
    /// Local Fisher information from the exact reduced state (and purity for the dephasing run).
    #[serde(default)]
    pub compute_tilde: bool,
    /// Largest `N` for which reduced-state quantities are computed.
    #[serde(default = "default_reduced_cap")]
    pub reduced_cap: usize,
}

fn default_reduced_cap() -> usize {
    400
}

impl Default for MetrologySection {
    fn default() -> Self {
        Self { compute_tilde: false, reduced_cap: default_reduced_cap() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    N,
    M,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub values: Vec<usize>,
    /// Scale the tau grid bounds by `ensemble.n / N` for every swept `N`.
    #[serde(default)]
    pub scale_tau_with_n: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub ensemble: EnsembleSection,
    #[serde(default = "Couplings::dimensionless_nonlocal")]
    pub couplings: Couplings,
    pub protocol: ProtocolSection,
    #[serde(default)]
    pub metrology: MetrologySection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

/// Everything a run needs, checked.
#[derive(Debug, Clone)]
pub struct Validated {
    pub dim: EnsembleDim,
    pub sites: usize,
    pub couplings: Couplings,
    pub kind: Kind,
    pub taus: Vec<f64>,
    pub schedule: Option<GidSchedule>,
    pub prep_points: usize,
    pub tilde: bool,
    pub reduced_cap: usize,
}

fn config_error(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {msg}", path.display()))
}

pub fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error(path, e))?;
    toml::from_str(&text).map_err(|e| config_error(path, e))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let cfg: RunConfig = read_toml(path)?;
        cfg.validate().map_err(|e| config_error(path, e))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<Validated, String> {
        let dim = EnsembleDim::new(self.ensemble.n).map_err(|e| format!("ensemble.n: {e}"))?;
        if self.ensemble.m < 2 {
            return Err(format!("ensemble.m: at least 2 ensembles required (got {})", self.ensemble.m));
        }
        self.couplings.validate().map_err(|e| format!("couplings: {e}"))?;
        let g = &self.protocol.tau_grid;
        let grid = TauGrid { start: g.start, stop: g.stop, count: g.count, spacing: g.spacing };
        let taus = grid.points().map_err(|e| format!("protocol.tau_grid: {e}"))?;
        let p = &self.protocol;
        let schedule = match p.kind {
            Kind::Gie => {
                if p.tau_rot.is_some() || p.beta.is_some() || p.theta.is_some() || p.prep_points > 0 {
                    return Err("protocol: tau_rot, beta, theta and prep_points apply to kind = \"gid\" only".into());
                }
                None
            }
            Kind::Gid => {
                let tau_rot = p.tau_rot.ok_or("protocol.tau_rot: required for kind = \"gid\"")?;
                if !(tau_rot.is_finite() && tau_rot >= 0.0) {
                    return Err(format!("protocol.tau_rot: must be finite and >= 0 (got {tau_rot})"));
                }
                let orientation = match (&p.beta, &p.theta) {
                    (Some(b), None) => Orientation::Beta(b.radians().map_err(|e| format!("protocol.beta: {e}"))?),
                    (None, Some(t)) => Orientation::Theta(t.radians().map_err(|e| format!("protocol.theta: {e}"))?),
                    _ => return Err("protocol: give exactly one of beta or theta for kind = \"gid\"".into()),
                };
                if taus[0] < 0.0 {
                    return Err("protocol.tau_grid: post-rotation times must be >= 0".into());
                }
                Some(GidSchedule { tau_rot, orientation })
            }
        };
        Ok(Validated {
            dim,
            sites: self.ensemble.m,
            couplings: self.couplings,
            kind: p.kind,
            taus,
            schedule,
            prep_points: p.prep_points,
            tilde: self.metrology.compute_tilde,
            reduced_cap: self.metrology.reduced_cap,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSection {
    pub kind: String,
    /// Gaussian barrier height in J, or `height_hz` in units of `h * Hz`.
    pub height: Option<f64>,
    pub height_hz: Option<f64>,
    pub width: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub v: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleWellSection {
    /// Atomic mass in atomic mass units.
    pub mass_amu: f64,
    /// Trap frequencies `(f_x, f_y, f_z)` in Hz.
    pub trap_hz: [f64; 3],
    pub barrier: BarrierSection,
    /// Grid in m; defaults to `+-9` oscillator lengths with 512 points.
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    /// Position of double well B relative to A, m.
    pub displacement: [f64; 3],
    /// Dipolar constant in J m^3; defaults to one Bohr magneton per atom.
    pub c_dd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CgbSection {
    pub delta_e: f64,
    pub d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BmvSection {
    pub mass: f64,
    pub d: f64,
    pub d_prime: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub double_well: Option<DoubleWellSection>,
    pub geometry: Option<GeometrySection>,
    pub cgb: Option<CgbSection>,
    pub bmv: Option<BmvSection>,
    pub t_min: Option<TminSection>,
    #[serde(default)]
    pub output: OutputSection,
}

/// Wall-clock time of the witness minimum for two ensembles of `n` atoms.
/// `chi_nloc_hz` overrides the coupling computed from the double well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TminSection {
    pub n: usize,
    pub chi_nloc_hz: Option<f64>,
}

impl DoubleWellSection {
    pub fn spec(&self) -> Result<DoubleWellSpec, String> {
        let mass = self.mass_amu * AMU;
        let [fx, fy, fz] = self.trap_hz.map(|f| 2.0 * PI * f);
        let b = &self.barrier;
        let barrier = match b.kind.as_str() {
            "none" => Barrier::None,
            "gaussian" => {
                let height = match (b.height, b.height_hz) {
                    (Some(h), None) => h,
                    (None, Some(f)) => 2.0 * PI * HBAR * f,
                    _ => return Err("double_well.barrier: give exactly one of height or height_hz".into()),
                };
                let width = b.width.ok_or("double_well.barrier.width: required for a gaussian barrier")?;
                Barrier::Gaussian { height, width }
            }
            "tabulated" => match (&b.x, &b.v) {
                (Some(x), Some(v)) => Barrier::Tabulated { x: x.clone(), v: v.clone() },
                _ => return Err("double_well.barrier: tabulated barrier needs x and v".into()),
            },
            other => return Err(format!("double_well.barrier.kind: unknown kind {other:?} (none, gaussian, tabulated)")),
        };
        let grid = self.grid.unwrap_or_else(|| {
            let ell = (HBAR / (mass * fx)).sqrt();
            Grid { x_min: -9.0 * ell, x_max: 9.0 * ell, n_points: 512 }
        });
        let spec = DoubleWellSpec { mass, omega_x: fx, omega_y: fy, omega_z: fz, barrier, grid };
        spec.validate().map_err(|e| format!("double_well: {e}"))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/24").unwrap(), PI / 24.0);
        assert_eq!(parse_angle(" 0.5 * pi ").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau/2").is_err());
    }

    fn gid(extra: &str) -> String {
        format!(
            "[ensemble]\nn = 10\nm = 2\n[protocol]\nkind = \"gid\"\n{extra}\n[protocol.tau_grid]\nstart = 0.0\nstop = 0.1\ncount = 5\n"
        )
    }

    #[test]
    fn gid_needs_exactly_one_orientation() {
        let ok: RunConfig = toml::from_str(&gid("tau_rot = 0.01\nbeta = \"pi/2\"")).unwrap();
        assert!(ok.validate().is_ok());
        let both: RunConfig = toml::from_str(&gid("tau_rot = 0.01\nbeta = 0.1\ntheta = 0.2")).unwrap();
        assert!(both.validate().unwrap_err().contains("exactly one"));
        let none: RunConfig = toml::from_str(&gid("tau_rot = 0.01")).unwrap();
        assert!(none.validate().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = gid("tau_rot = 0.01\nbeta = 0.1\nbogus = 3");
        assert!(toml::from_str::<RunConfig>(&text).is_err());
    }
}
