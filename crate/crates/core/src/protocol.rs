//! Protocol drivers: time grids, witness series for the entanglement (GIE)
//! and dephasing (GID) sequences, and the derived dephasing time.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::gie_moments;
use crate::error::{Error, Result};
use crate::gid::{dephased_state, gid_moments_with, GidSchedule, LocalKernel, ResolvedSchedule};
use crate::metrology::{analyze_pure, fisher_local, WitnessRecord};
use crate::network::Couplings;
use crate::spin::{build_spin_ops, css_x, EnsembleDim, Rotator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

impl TauGrid {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("tau grid must contain at least one point".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidParameter("tau grid bounds must be finite".into()));
        }
        if self.count > 1 && self.stop <= self.start {
            return Err(Error::InvalidParameter(format!("tau grid must increase (start {} >= stop {})", self.start, self.stop)));
        }
        if self.spacing == Spacing::Log && self.start <= 0.0 {
            return Err(Error::InvalidParameter("log-spaced tau grid needs start > 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let last = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|k| {
                let f = k as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + f * (self.stop - self.start),
                    Spacing::Log => self.start * (self.stop / self.start).powf(f),
                }
            })
            .collect())
    }
}

/// Witness series for `sites` coherent states evolved under `c`.
///
/// With `tilde` set, the local Fisher information is computed from the
/// exact single-site reduced state, costing `O(N^3 M)` per point.
pub fn run_gie(dim: EnsembleDim, sites: usize, c: &Couplings, taus: &[f64], tilde: bool) -> Result<Vec<WitnessRecord>> {
    c.validate()?;
    if sites < 2 {
        return Err(Error::TooFewEnsembles { min: 2, got: sites });
    }
    let spin = if tilde { Some(build_spin_ops(dim)) } else { None };
    let css = css_x(dim);
    taus.par_iter()
        .map(|&t| {
            let m = gie_moments(dim, sites, c, t);
            let f_loc = match &spin {
                Some(ops) => {
                    let rho = dephased_state(&css, &css, sites - 1, c.local() * t, c.chi_nloc * t);
                    Some(fisher_local(&rho, ops)?)
                }
                None => None,
            };
            analyze_pure(&m, f_loc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GidRecord {
    #[serde(flatten)]
    pub witness: WitnessRecord,
    /// Time since the rotation (negative on the preparation segment).
    pub tau_post: f64,
    pub beta: f64,
    pub theta: f64,
    pub theta0: f64,
    pub purity: Option<f64>,
}

/// Options for [`run_gid`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GidOptions {
    /// Number of evenly spaced points on the preparation segment `[0, tau_rot)`.
    pub prep_points: usize,
    /// Compute purity and local Fisher information from the reduced state (two sites only).
    pub reduced: bool,
}

/// Dephasing protocol on the composite axis: preparation points first, then
/// the post-rotation points at `tau_rot + tau` for each `tau` in `taus`.
pub fn run_gid(dim: EnsembleDim, sites: usize, schedule: &GidSchedule, taus: &[f64], opts: GidOptions) -> Result<(ResolvedSchedule, Vec<GidRecord>)> {
    if sites < 2 {
        return Err(Error::TooFewEnsembles { min: 2, got: sites });
    }
    let rotator = Rotator::new(dim);
    let res = schedule.resolve_with(&rotator)?;
    let spin = build_spin_ops(dim);
    let twist = Couplings { chi_cont: 0.0, chi_loc: 1.0, chi_nloc: 0.0, dimensionless: true };
    let prep: Vec<f64> = (0..opts.prep_points).map(|k| res.tau_rot * k as f64 / opts.prep_points as f64).collect();
    let mut records: Vec<GidRecord> = prep
        .par_iter()
        .map(|&t| {
            let m = gie_moments(dim, sites, &twist, t);
            let f_loc = if opts.reduced { Some(4.0 * crate::metrology::covariance(&m)?.gamma_loc()) } else { None };
            let witness = analyze_pure(&m, f_loc)?;
            Ok(GidRecord {
                witness,
                tau_post: t - res.tau_rot,
                beta: res.beta,
                theta: res.theta,
                theta0: res.theta0,
                purity: opts.reduced.then_some(1.0),
            })
        })
        .collect::<Result<_>>()?;
    let kernel = LocalKernel::new(&res.rotated);
    let post: Vec<GidRecord> = taus
        .par_iter()
        .map(|&tau| {
            let mut m = gid_moments_with(&kernel, sites, tau);
            m.t = res.tau_rot + tau;
            let (purity, f_loc) = if opts.reduced {
                let rho = dephased_state(&res.rotated, &res.rotated, sites - 1, 0.0, tau);
                (Some(rho.purity()), Some(fisher_local(&rho, &spin)?))
            } else {
                (None, None)
            };
            let witness = analyze_pure(&m, f_loc)?;
            Ok(GidRecord { witness, tau_post: tau, beta: res.beta, theta: res.theta, theta0: res.theta0, purity })
        })
        .collect::<Result<_>>()?;
    records.extend(post);
    Ok((res, records))
}

/// First post-rotation time at which `xi2_loc` reaches 1, linearly
/// interpolated between the bracketing grid points. `None` if it never does
/// on the grid.
pub fn dephasing_time(records: &[GidRecord]) -> Option<f64> {
    let post: Vec<&GidRecord> = records.iter().filter(|r| r.tau_post >= 0.0).collect();
    let first = post.first()?;
    if first.witness.xi2_loc >= 1.0 {
        return Some(first.tau_post);
    }
    post.windows(2).find_map(|w| {
        let (a, b) = (w[0], w[1]);
        if b.witness.xi2_loc >= 1.0 {
            let f = (1.0 - a.witness.xi2_loc) / (b.witness.xi2_loc - a.witness.xi2_loc);
            Some(a.tau_post + f * (b.tau_post - a.tau_post))
        } else {
            None
        }
    })
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter("log-log fit needs at least two paired points".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("log-log fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}
