//! Squeezing parameters, covariance and Fisher matrices, and the
//! entanglement witnesses built from them.
//!
//! Conventions:
//! - Covariances are symmetrized: same-site cross-axis entries use `<{A, B}>/2`.
//! - "Collective" refers to the summed spin `J^a = sum_i J^a_i`.
//! - `F_col` is the quantum Fisher information maximized over collective
//!   directions `n . J`; for a pure global state it equals four times the
//!   largest eigenvalue of the collective covariance `sum_{ij} Gamma_ij`.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{self, min_quadrature};
use crate::moments::MomentTable;
use crate::spin::{Axis, SpinOps};
use crate::tolerances::Tolerances;

/// Symmetrized `3M x 3M` covariance, site-major with axis order `(x, y, z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    sites: usize,
    entries: Mat<f64>,
}

impl CovarianceMatrix {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn get(&self, (i, a): (usize, Axis), (j, b): (usize, Axis)) -> f64 {
        self.entries[(3 * i + a.index(), 3 * j + b.index())]
    }

    /// The `3 x 3` block of site `i`.
    pub fn site_block(&self, i: usize) -> Mat<f64> {
        Mat::from_fn(3, 3, |a, b| self.entries[(3 * i + a, 3 * i + b)])
    }

    /// Covariance of the summed spin, `sum_{ij} Gamma_ij`.
    pub fn collective(&self) -> Mat<f64> {
        Mat::from_fn(3, 3, |a, b| {
            let mut acc = 0.0;
            for i in 0..self.sites {
                for j in 0..self.sites {
                    acc += self.entries[(3 * i + a, 3 * j + b)];
                }
            }
            acc
        })
    }

    pub fn lambda_min(&self) -> f64 {
        linalg::symmetric_eigenvalues(&self.entries).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        linalg::lambda_max(&self.entries)
    }

    /// Largest eigenvalue of each site block.
    pub fn local_maxima(&self) -> Vec<f64> {
        (0..self.sites).map(|i| linalg::lambda_max(&self.site_block(i))).collect()
    }

    /// `Gamma_loc`: the largest local-block eigenvalue over all sites.
    pub fn gamma_loc(&self) -> f64 {
        self.local_maxima().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn covariance(m: &MomentTable) -> Result<CovarianceMatrix> {
    let k = 3 * m.sites;
    let mut entries = Mat::<f64>::zeros(k, k);
    for p in 0..k {
        let (i, a) = (p / 3, Axis::ALL[p % 3]);
        let mean_p = m.first(i, a)?;
        for q in p..k {
            let (j, b) = (q / 3, Axis::ALL[q % 3]);
            let v = m.second((i, a), (j, b))? - mean_p * m.first(j, b)?;
            entries[(p, q)] = v;
            entries[(q, p)] = v;
        }
    }
    Ok(CovarianceMatrix { sites: m.sites, entries })
}

/// Squeezing parameter with its optimal quadrature angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Squeezing {
    pub xi2: f64,
    /// Angle `theta` minimizing `Var(cos(theta) J^y - sin(theta) J^z)`, in `[-pi/2, pi/2)`.
    pub theta: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingResult {
    pub xi2_loc: f64,
    pub theta_loc: f64,
    pub xi2_col: f64,
    pub theta_col: f64,
}

/// Wineland parameter of site `site`: `N lambda_min(C_yz) / <J^x>^2`.
pub fn local_squeezing(m: &MomentTable, site: usize) -> Result<Squeezing> {
    if site >= m.sites {
        return Err(Error::SiteOutOfRange { site, sites: m.sites });
    }
    let x = m.first(site, Axis::X)?;
    if x == 0.0 || !x.is_finite() {
        return Err(Error::ZeroPolarization { site, axis: Axis::X });
    }
    let cov = |a, b| -> Result<f64> { Ok(m.second((site, a), (site, b))? - m.first(site, a)? * m.first(site, b)?) };
    let (lmin, _, theta, degenerate) = min_quadrature(
        cov(Axis::Y, Axis::Y)?,
        cov(Axis::Y, Axis::Z)?,
        cov(Axis::Z, Axis::Z)?,
        Tolerances::DEFAULT.isotropy,
    );
    Ok(Squeezing { xi2: m.atoms as f64 * lmin / (x * x), theta, degenerate })
}

/// Wineland parameter of the summed spin with a common quadrature angle.
pub fn collective_squeezing(m: &MomentTable) -> Result<Squeezing> {
    let cov = covariance(m)?;
    collective_squeezing_from(m, &cov)
}

pub fn collective_squeezing_from(m: &MomentTable, cov: &CovarianceMatrix) -> Result<Squeezing> {
    let mut x = 0.0;
    for i in 0..m.sites {
        x += m.first(i, Axis::X)?;
    }
    if x == 0.0 || !x.is_finite() {
        return Err(Error::ZeroCollectivePolarization);
    }
    let c = cov.collective();
    let (lmin, _, theta, degenerate) = min_quadrature(c[(1, 1)], c[(1, 2)], c[(2, 2)], Tolerances::DEFAULT.isotropy);
    let total = (m.atoms * m.sites) as f64;
    Ok(Squeezing { xi2: total * lmin / (x * x), theta, degenerate })
}

/// `F_col` of a pure global state: `4 lambda_max` of the collective covariance.
pub fn fisher_collective_pure(g: &CovarianceMatrix) -> f64 {
    4.0 * linalg::lambda_max(&g.collective())
}

/// Quantum Fisher matrix of `rho` for the Hermitian generators `ops`.
///
/// `F_ab = 2 sum_{kl} (p_k - p_l)^2 / (p_k + p_l) Re(<k|A|l><l|B|k>)`, skipping
/// pairs with `p_k + p_l` at or below the configured floor.
pub fn fisher_matrix(rho: &DensityMatrix, ops: &[&Mat<Complex64>]) -> Result<Mat<f64>> {
    fisher_matrix_with(rho, ops, &Tolerances::DEFAULT)
}

pub fn fisher_matrix_with(rho: &DensityMatrix, ops: &[&Mat<Complex64>], tol: &Tolerances) -> Result<Mat<f64>> {
    let d = rho.dim();
    for op in ops {
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: op.nrows() });
        }
    }
    let (p, u) = rho.eigen();
    if let Some(&lowest) = p.first() {
        if lowest < tol.psd_floor {
            return Err(Error::NotPositive { eigenvalue: lowest });
        }
    }
    // Generators in the eigenbasis: U^dagger A U.
    let rotated: Vec<Mat<Complex64>> = ops.iter().map(|op| u.adjoint() * *op * &u).collect();
    let n = ops.len();
    let mut f = Mat::<f64>::zeros(n, n);
    for k in 0..d {
        for l in 0..d {
            let s = p[k] + p[l];
            if s <= tol.fisher_weight_floor {
                continue;
            }
            let w = 2.0 * (p[k] - p[l]).powi(2) / s;
            if w == 0.0 {
                continue;
            }
            for a in 0..n {
                for b in a..n {
                    let v = w * (rotated[a][(k, l)] * rotated[b][(l, k)]).re;
                    f[(a, b)] += v;
                    if a != b {
                        f[(b, a)] += v;
                    }
                }
            }
        }
    }
    Ok(f)
}

/// `F_loc`: largest eigenvalue of the `3 x 3` Fisher matrix of a single-site state.
pub fn fisher_local(rho: &DensityMatrix, spin: &SpinOps) -> Result<f64> {
    let f = fisher_matrix(rho, &[&spin.jx, &spin.jy, &spin.jz])?;
    Ok(linalg::lambda_max(&f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub tau: f64,
    pub xi2_loc: f64,
    pub xi2_col: f64,
    pub gamma_loc: f64,
    pub f_col: f64,
    pub c1: f64,
    pub c2: f64,
    pub f_loc: Option<f64>,
    pub c1_tilde: Option<f64>,
    pub c2_tilde: Option<f64>,
}

/// Inputs to [`witnesses`] beyond the time stamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessInputs {
    pub gamma_loc: f64,
    pub f_col: f64,
    pub xi2_col: f64,
    pub xi2_loc: f64,
    pub atoms: usize,
    pub sites: usize,
    pub f_loc: Option<f64>,
}

/// `C1 = 4 M Gamma_loc / F_col`, `C2 = 4 xi2_col Gamma_loc / N`, plus the
/// Fisher-based variants `M F_loc / F_col` and `xi2_col F_loc / N`.
pub fn witnesses(tau: f64, w: &WitnessInputs) -> Result<WitnessRecord> {
    if !(w.f_col > 0.0) {
        return Err(Error::InvalidParameter(format!("collective Fisher information must be positive (got {})", w.f_col)));
    }
    if w.atoms == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if w.sites < 2 {
        return Err(Error::TooFewEnsembles { min: 2, got: w.sites });
    }
    let n = w.atoms as f64;
    let m = w.sites as f64;
    let c1_tilde = w.f_loc.map(|f| m * f / w.f_col);
    let c2_tilde = w.f_loc.map(|f| w.xi2_col * f / n);
    Ok(WitnessRecord {
        tau,
        xi2_loc: w.xi2_loc,
        xi2_col: w.xi2_col,
        gamma_loc: w.gamma_loc,
        f_col: w.f_col,
        c1: 4.0 * m * w.gamma_loc / w.f_col,
        c2: 4.0 * w.xi2_col * w.gamma_loc / n,
        f_loc: w.f_loc,
        c1_tilde,
        c2_tilde,
    })
}

/// Full record for a pure global state described by its moment table.
pub fn analyze_pure(m: &MomentTable, f_loc: Option<f64>) -> Result<WitnessRecord> {
    let cov = covariance(m)?;
    let loc = local_squeezing(m, 0)?;
    let col = collective_squeezing_from(m, &cov)?;
    witnesses(
        m.t,
        &WitnessInputs {
            gamma_loc: cov.gamma_loc(),
            f_col: fisher_collective_pure(&cov),
            xi2_col: col.xi2,
            xi2_loc: loc.xi2,
            atoms: m.atoms,
            sites: m.sites,
            f_loc,
        },
    )
}
