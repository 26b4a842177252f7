//! One-dimensional double-well eigenproblem and left/right mode construction.
//!
//! The Hamiltonian `-hbar^2/(2m) d^2/dx^2 + V_DW(x) + m omega_x^2 x^2 / 2` is
//! discretized with the fourth-order five-point stencil on a uniform grid
//! with hard walls beyond its ends, and solved in oscillator units.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::params::constants::HBAR;
use crate::tolerances::Tolerances;

/// Barrier added to the harmonic confinement along the double-well axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Barrier {
    None,
    /// `height * exp(-x^2 / (2 width^2))`, height in J and width in m.
    Gaussian { height: f64, width: f64 },
    /// Linear interpolation of `(x, V)` samples in (m, J); zero outside the table.
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

impl Barrier {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Barrier::None => 0.0,
            Barrier::Gaussian { height, width } => height * (-0.5 * (x / width).powi(2)).exp(),
            Barrier::Tabulated { x: xs, v } => {
                if xs.is_empty() || x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let k = xs.partition_point(|&p| p <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[k - 1], xs[k]);
                if x1 == x0 {
                    return v[k];
                }
                v[k - 1] + (v[k] - v[k - 1]) * (x - x0) / (x1 - x0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Barrier::None => Ok(()),
            Barrier::Gaussian { height, width } => {
                if height.is_finite() && width.is_finite() && *width > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("gaussian barrier needs finite height and width > 0".into()))
                }
            }
            Barrier::Tabulated { x, v } => {
                if x.len() != v.len() || x.len() < 2 {
                    return Err(Error::InvalidParameter("tabulated barrier needs >= 2 paired samples".into()));
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::InvalidParameter("tabulated barrier abscissae must increase".into()));
                }
                if v.iter().any(|e| !e.is_finite()) {
                    return Err(Error::InvalidParameter("tabulated barrier values must be finite".into()));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points).map(|i| self.x_min + i as f64 * h).collect()
    }

    /// Same interval with half the spacing.
    pub fn refined(&self) -> Grid {
        Grid { n_points: 2 * self.n_points - 1, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleWellSpec {
    /// Atomic mass, kg.
    pub mass: f64,
    /// Trap angular frequencies, rad/s.
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_z: f64,
    pub barrier: Barrier,
    pub grid: Grid,
}

impl DoubleWellSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("mass", self.mass), ("omega_x", self.omega_x), ("omega_y", self.omega_y), ("omega_z", self.omega_z)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be finite and > 0 (got {v})")));
            }
        }
        if self.grid.n_points < 256 {
            return Err(Error::InvalidParameter(format!("grid needs at least 256 points (got {})", self.grid.n_points)));
        }
        if !(self.grid.x_max > self.grid.x_min) {
            return Err(Error::InvalidParameter("grid needs x_max > x_min".into()));
        }
        self.barrier.validate()
    }

    /// Oscillator length `sqrt(hbar / (m omega))`.
    pub fn length(&self, omega: f64) -> f64 {
        (HBAR / (self.mass * omega)).sqrt()
    }
}

/// Left and right modes on the grid plus transverse Gaussian widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModePair {
    pub x: Vec<f64>,
    pub dx: f64,
    pub psi_l: Vec<f64>,
    pub psi_r: Vec<f64>,
    /// Transverse oscillator lengths; the densities are `exp(-y^2/sigma^2) / (sqrt(pi) sigma)`.
    pub sigma_y: f64,
    pub sigma_z: f64,
    pub e_gs: f64,
    pub e_ex: f64,
}

impl ModePair {
    pub fn overlap(&self) -> f64 {
        self.psi_l.iter().zip(&self.psi_r).map(|(a, b)| a * b).sum::<f64>() * self.dx
    }

    pub fn norm_l(&self) -> f64 {
        self.psi_l.iter().map(|a| a * a).sum::<f64>() * self.dx
    }

    pub fn norm_r(&self) -> f64 {
        self.psi_r.iter().map(|a| a * a).sum::<f64>() * self.dx
    }
}

/// Five-point Hamiltonian in oscillator units (length `ell`, energy `hbar omega_x`).
fn hamiltonian(spec: &DoubleWellSpec, grid: &Grid) -> Mat<f64> {
    let ell = spec.length(spec.omega_x);
    let unit = HBAR * spec.omega_x;
    let n = grid.n_points;
    let h = grid.spacing() / ell;
    let k = 0.5 / (12.0 * h * h);
    let xs = grid.points();
    let mut m = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let xi = xs[i] / ell;
        m[(i, i)] = 30.0 * k + 0.5 * xi * xi + spec.barrier.eval(xs[i]) / unit;
        if i + 1 < n {
            m[(i, i + 1)] = -16.0 * k;
            m[(i + 1, i)] = -16.0 * k;
        }
        if i + 2 < n {
            m[(i, i + 2)] = k;
            m[(i + 2, i)] = k;
        }
    }
    m
}

/// Two lowest eigenpairs, the refinement check, and the left/right modes.
pub fn solve_double_well(spec: &DoubleWellSpec) -> Result<ModePair> {
    solve_double_well_with(spec, Tolerances::DEFAULT.refinement_drift)
}

pub fn solve_double_well_with(spec: &DoubleWellSpec, drift_tolerance: f64) -> Result<ModePair> {
    spec.validate()?;
    let unit = HBAR * spec.omega_x;
    let (values, vectors) = linalg::symmetric_eigen(&hamiltonian(spec, &spec.grid));
    let fine = linalg::symmetric_eigenvalues(&hamiltonian(spec, &spec.grid.refined()));
    let drift = (0..2).map(|i| ((fine[i] - values[i]) / values[i]).abs()).fold(0.0, f64::max);
    if drift > drift_tolerance {
        return Err(Error::Refinement { drift, tolerance: drift_tolerance });
    }

    let x = spec.grid.points();
    let dx = spec.grid.spacing();
    let n = x.len();
    let column = |j: usize| -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|i| vectors[(i, j)]).collect();
        let norm = (v.iter().map(|a| a * a).sum::<f64>() * dx).sqrt();
        v.into_iter().map(|a| a / norm).collect()
    };
    let mut gs = column(0);
    let mut ex = column(1);
    if gs.iter().sum::<f64>() < 0.0 {
        gs.iter_mut().for_each(|a| *a = -*a);
    }
    // Orient the excited state so that (gs + ex) sits in the left well.
    let left: f64 = (0..n).filter(|&i| x[i] < 0.0).map(|i| gs[i] * ex[i]).sum();
    if left < 0.0 {
        ex.iter_mut().for_each(|a| *a = -*a);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi_l = gs.iter().zip(&ex).map(|(g, e)| s * (g + e)).collect();
    let psi_r = gs.iter().zip(&ex).map(|(g, e)| s * (g - e)).collect();
    Ok(ModePair {
        x,
        dx,
        psi_l,
        psi_r,
        sigma_y: spec.length(spec.omega_y),
        sigma_z: spec.length(spec.omega_z),
        e_gs: values[0] * unit,
        e_ex: values[1] * unit,
    })
}

/// `I = int |psi_L(r)|^4 dr = (int psi_L^4 dx) / (2 pi sigma_y sigma_z)`.
pub fn contact_integral(mode: &ModePair) -> f64 {
    let ix: f64 = mode.psi_l.iter().map(|a| a.powi(4)).sum::<f64>() * mode.dx;
    ix / (2.0 * std::f64::consts::PI * mode.sigma_y * mode.sigma_z)
}
