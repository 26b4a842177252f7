//! Moments for the dephasing protocol at a cost independent of the network size.
//!
//! Each ensemble is prepared by one-axis twisting `exp(-i tau_rot (J^z)^2)`
//! from the `+x` coherent state, rotated by `exp(-i theta J^x)`, and then
//! evolved only by `sum_{i<j} J^z_i J^z_j` for dimensionless time `tau`.
//! All global moments reduce to the local functions
//!
//! - `W(s)  = <e^{i s J^z}>`
//! - `A(s)  = <J^+ e^{i s J^z}>`, `B(s) = <e^{i s J^z} J^+>`
//! - `Zs(s) = <J^z e^{i s J^z}>`
//!
//! evaluated in the rotated local state, raised to powers that carry the
//! dependence on `M`. The time-reversal pairs `V_az`, `V_za` in
//! [`VQuantities`] are the Cartesian components of `A` and `B`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linalg::{complex_pow, min_quadrature};
use crate::moments::MomentTable;
use crate::spin::{build_spin_ops, css_x, Axis, EnsembleDim, LocalMoments, LocalState, Rotator};
use crate::tolerances::Tolerances;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Rotation angle given either directly or relative to the squeezed quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Theta(f64),
    Beta(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GidSchedule {
    pub tau_rot: f64,
    pub orientation: Orientation,
}

/// A schedule with the rotation angle resolved against the prepared state.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSchedule {
    pub tau_rot: f64,
    pub theta: f64,
    pub theta0: f64,
    pub beta: f64,
    /// `theta0` came from an isotropic covariance and is arbitrary.
    pub degenerate: bool,
    /// Prepared state before the rotation.
    pub prepared: LocalState,
    /// Prepared state after the rotation.
    pub rotated: LocalState,
}

impl GidSchedule {
    pub fn resolve(&self, dim: EnsembleDim) -> Result<ResolvedSchedule> {
        self.resolve_with(&Rotator::new(dim))
    }

    pub fn resolve_with(&self, rotator: &Rotator) -> Result<ResolvedSchedule> {
        if !(self.tau_rot.is_finite() && self.tau_rot >= 0.0) {
            return Err(Error::InvalidParameter(format!("tau_rot must be finite and >= 0 (got {})", self.tau_rot)));
        }
        let prepared = prepare_local(rotator.dim(), self.tau_rot);
        let (theta0, degenerate) = optimal_angle(&prepared)?;
        let (theta, beta) = match self.orientation {
            Orientation::Theta(theta) => (theta, theta - theta0 - FRAC_PI_2),
            Orientation::Beta(beta) => (beta + theta0 + FRAC_PI_2, beta),
        };
        if !theta.is_finite() {
            return Err(Error::InvalidParameter("rotation angle must be finite".into()));
        }
        let rotated = rotator.rotate(&prepared, Axis::X, theta);
        Ok(ResolvedSchedule { tau_rot: self.tau_rot, theta, theta0, beta, degenerate, prepared, rotated })
    }
}

/// `exp(-i tau_rot (J^z)^2) |CSS_x>`.
pub fn prepare_local(dim: EnsembleDim, tau_rot: f64) -> LocalState {
    css_x(dim).apply_diagonal_phase(|k| tau_rot * dim.mu(k) * dim.mu(k))
}

/// Angle `theta0` minimizing `Var(cos(theta) J^y - sin(theta) J^z)`, in `[-pi/2, pi/2)`.
///
/// The flag is set when the transverse covariance is isotropic, in which
/// case `theta0 = 0`.
pub fn optimal_angle(state: &LocalState) -> Result<(f64, bool)> {
    let ops = build_spin_ops(state.dim());
    let m = LocalMoments::of(state, &ops);
    if m.mean[0].abs() < 1e-300 {
        return Err(Error::ZeroPolarization { site: 0, axis: Axis::X });
    }
    let (_, _, angle, degenerate) = min_quadrature(
        m.covariance(Axis::Y, Axis::Y),
        m.covariance(Axis::Y, Axis::Z),
        m.covariance(Axis::Z, Axis::Z),
        Tolerances::DEFAULT.isotropy,
    );
    Ok((angle, degenerate))
}

/// Local quantities at one time, all evaluated in the pre-rotation state
/// with the rotated operators `J~^a(theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VQuantities {
    pub v_z: Complex64,
    /// `<J~^a exp(i tau J~^z)>` for `a = x, y, z`.
    pub v_az: [Complex64; 3],
    /// `<exp(i tau J~^z) J~^a>`.
    pub v_za: [Complex64; 3],
}

impl VQuantities {
    pub fn r_az(&self, a: Axis) -> f64 {
        self.v_az[a.index()].re
    }

    pub fn i_az(&self, a: Axis) -> f64 {
        self.v_az[a.index()].im
    }

    pub fn r_za(&self, a: Axis) -> f64 {
        self.v_za[a.index()].re
    }

    pub fn i_za(&self, a: Axis) -> f64 {
        self.v_za[a.index()].im
    }
}

/// Rotated local state together with the ladder data it needs, reused across a time grid.
#[derive(Debug, Clone)]
pub struct LocalKernel {
    dim: EnsembleDim,
    amps: Vec<Complex64>,
    /// `<k-1| J^+ |k>` for `k >= 1`.
    ladder: Vec<f64>,
}

impl LocalKernel {
    pub fn new(rotated: &LocalState) -> Self {
        let dim = rotated.dim();
        let s = dim.spin();
        let ladder = (0..dim.dim())
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    let mu = dim.mu(k);
                    (s * (s + 1.0) - mu * (mu + 1.0)).max(0.0).sqrt()
                }
            })
            .collect();
        Self { dim, amps: rotated.amplitudes().to_vec(), ladder }
    }

    fn phase(&self, s: f64, k: usize) -> Complex64 {
        Complex64::from_polar(1.0, s * self.dim.mu(k))
    }

    /// `<e^{i s J^z}>`.
    pub fn w(&self, s: f64) -> Complex64 {
        self.amps.iter().enumerate().map(|(k, a)| a.norm_sqr() * self.phase(s, k)).sum()
    }

    /// `<J^z e^{i s J^z}>`.
    pub fn zs(&self, s: f64) -> Complex64 {
        self.amps.iter().enumerate().map(|(k, a)| a.norm_sqr() * self.dim.mu(k) * self.phase(s, k)).sum()
    }

    /// `(<J^+ e^{i s J^z}>, <e^{i s J^z} J^+>)`.
    pub fn ladder_pair(&self, s: f64) -> (Complex64, Complex64) {
        let mut a = ZERO;
        let mut b = ZERO;
        for k in 1..self.amps.len() {
            // <k-1| J^+ |k> connects amplitude k to k-1.
            let m = self.amps[k - 1].conj() * self.amps[k] * self.ladder[k];
            a += m * self.phase(s, k);
            b += m * self.phase(s, k - 1);
        }
        (a, b)
    }

    /// `<J^+ J^+>`.
    fn raise2(&self) -> Complex64 {
        (2..self.amps.len())
            .map(|k| self.amps[k - 2].conj() * self.amps[k] * self.ladder[k] * self.ladder[k - 1])
            .sum()
    }

    /// `(<J^+ J^->, <J^- J^+>)`.
    fn raise_lower(&self) -> (f64, f64) {
        let mut pm = 0.0;
        let mut mp = 0.0;
        for k in 0..self.amps.len() {
            let p = self.amps[k].norm_sqr();
            // J^+ J^- |k> = c_{k+1}^2 |k>,  J^- J^+ |k> = c_k^2 |k>
            if k + 1 < self.amps.len() {
                pm += p * self.ladder[k + 1].powi(2);
            }
            mp += p * self.ladder[k].powi(2);
        }
        (pm, mp)
    }

    fn quantities(&self, tau: f64) -> VQuantities {
        let (a, b) = self.ladder_pair(tau);
        let (am, bm) = self.ladder_pair(-tau);
        // <J^- e^{isJz}> = conj <e^{-isJz} J^+>
        let (lower_a, lower_b) = (bm.conj(), am.conj());
        let zs = self.zs(tau);
        let x_az = 0.5 * (a + lower_a);
        let y_az = Complex64::new(0.0, -0.5) * (a - lower_a);
        let x_za = 0.5 * (b + lower_b);
        let y_za = Complex64::new(0.0, -0.5) * (b - lower_b);
        VQuantities { v_z: self.w(tau), v_az: [x_az, y_az, zs], v_za: [x_za, y_za, zs] }
    }
}

/// `V_z`, `V_az` and `V_za` for the prepared state `psi`, rotation `theta` and time `tau`.
pub fn v_quantities(psi: &LocalState, theta: f64, tau: f64) -> VQuantities {
    let rotated = Rotator::new(psi.dim()).rotate(psi, Axis::X, theta);
    LocalKernel::new(&rotated).quantities(tau)
}

/// Coefficients of `J^x`, `J^y`, `J^z` over `(J^+, J^-, J^z)`.
const CART: [[Complex64; 3]; 3] = [
    [Complex64 { re: 0.5, im: 0.0 }, Complex64 { re: 0.5, im: 0.0 }, ZERO],
    [Complex64 { re: 0.0, im: -0.5 }, Complex64 { re: 0.0, im: 0.5 }, ZERO],
    [ZERO, ZERO, Complex64 { re: 1.0, im: 0.0 }],
];

fn to_cartesian(g: &[[Complex64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            let mut acc = ZERO;
            for p in 0..3 {
                for q in 0..3 {
                    acc += CART[a][p] * CART[b][q] * g[p][q];
                }
            }
            out[a][b] = acc.re;
        }
    }
    // Same-site entries become the symmetrized value; cross-site entries are already symmetric.
    for a in 0..3 {
        for b in 0..a {
            let s = 0.5 * (out[a][b] + out[b][a]);
            out[a][b] = s;
            out[b][a] = s;
        }
    }
    out
}

/// Moment table at dimensionless time `tau` after the rotation.
pub fn gid_moments_with(kernel: &LocalKernel, sites: usize, tau: f64) -> MomentTable {
    assert!(sites >= 2, "network needs at least two ensembles");
    let dim = kernel.dim;
    let m1 = (sites - 1) as u64;
    let m2 = (sites - 2) as u64;
    let w1 = kernel.w(tau);
    let w2 = kernel.w(2.0 * tau);
    let (a_plus, b_plus) = kernel.ladder_pair(tau);
    let (a_minus, _) = kernel.ladder_pair(-tau);
    let (plus0, _) = kernel.ladder_pair(0.0);
    let z = kernel.zs(0.0).re;
    let zs = kernel.zs(tau);
    let (pm, mp) = kernel.raise_lower();
    let z2: f64 = kernel.amps.iter().enumerate().map(|(k, a)| a.norm_sqr() * dim.mu(k).powi(2)).sum();
    // <J^+ J^z> and <J^z J^+> in the rotated state.
    let mut pz = ZERO;
    let mut zp = ZERO;
    for k in 1..kernel.amps.len() {
        let m = kernel.amps[k - 1].conj() * kernel.amps[k] * kernel.ladder[k];
        pz += m * dim.mu(k);
        zp += m * dim.mu(k - 1);
    }

    let wp1 = complex_pow(w1, m1);
    let wp2_local = complex_pow(w2, m1);
    let plus = plus0 * wp1;
    let pp = kernel.raise2() * wp2_local;
    let pz_t = pz * wp1;
    let zp_t = zp * wp1;

    // Same-site <O_p O_q> over (J^+, J^-, J^z).
    let local = [
        [pp, Complex64::from(pm), pz_t],
        [Complex64::from(mp), pp.conj(), zp_t.conj()],
        [zp_t, pz_t.conj(), Complex64::from(z2)],
    ];

    let pp_x = a_plus * b_plus * complex_pow(w2, m2);
    let pm_x = Complex64::from(a_minus.norm_sqr());
    let pz_x = plus0 * zs * complex_pow(w1, m2);
    let zz_x = Complex64::from(z * z);
    let cross = [
        [pp_x, pm_x, pz_x],
        [pm_x, pp_x.conj(), pz_x.conj()],
        [pz_x, pz_x.conj(), zz_x],
    ];

    let first = [plus.re, plus.im, z];
    let mut table = MomentTable::new(dim.atoms(), sites, tau);
    table.fill_symmetric(first, to_cartesian(&local), to_cartesian(&cross));
    table
}

/// Moment table for `sites` ensembles following `schedule`, at time `tau` after the rotation.
pub fn gid_moments(dim: EnsembleDim, sites: usize, schedule: &GidSchedule, tau: f64) -> Result<MomentTable> {
    let resolved = schedule.resolve(dim)?;
    Ok(gid_moments_with(&LocalKernel::new(&resolved.rotated), sites, tau))
}

/// [`gid_moments_with`] over a time grid, in parallel, in grid order.
pub fn gid_series(kernel: &LocalKernel, sites: usize, taus: &[f64]) -> Vec<MomentTable> {
    taus.par_iter().map(|&tau| gid_moments_with(kernel, sites, tau)).collect()
}

/// Distribution of `2 * sum_j mu_j` over `count` independent sites with populations `pops`.
///
/// Entry `s` corresponds to `2 sum mu = count * N - 2 s`.
fn sum_distribution(pops: &[f64], count: usize) -> Vec<f64> {
    let mut dist = vec![1.0];
    for _ in 0..count {
        let mut next = vec![0.0; dist.len() + pops.len() - 1];
        for (i, p) in dist.iter().enumerate() {
            for (k, q) in pops.iter().enumerate() {
                next[i + k] += p * q;
            }
        }
        dist = next;
    }
    dist
}

/// Reduced state of one site when every other site carries the same `J^z`
/// populations as `partner` and the network evolves by
/// `exp(-i (twist (J^z)^2 + tau sum_{i<j} J^z_i J^z_j))`.
///
/// The partners act only through their total `J^z`, so the result is the
/// mixture `sum_s p(s) U_s |psi><psi| U_s^dagger` with `U_s = exp(-i (twist (J^z)^2 + tau s J^z))`.
pub fn dephased_state(psi: &LocalState, partner: &LocalState, others: usize, twist: f64, tau: f64) -> DensityMatrix {
    let dim = psi.dim();
    let d = dim.dim();
    let n = dim.atoms() as i64;
    let dist = sum_distribution(&partner.populations(), others);
    let amps = psi.amplitudes();
    let mut rho = faer::Mat::<Complex64>::zeros(d, d);
    let twist_phase: Vec<Complex64> = (0..d).map(|k| Complex64::from_polar(1.0, -twist * dim.mu(k).powi(2))).collect();
    for (s, p) in dist.iter().enumerate() {
        if *p == 0.0 {
            continue;
        }
        let total = (others as i64 * n - 2 * s as i64) as f64 / 2.0;
        let v: Vec<Complex64> = (0..d)
            .map(|k| amps[k] * twist_phase[k] * Complex64::from_polar(1.0, -tau * total * dim.mu(k)))
            .collect();
        for i in 0..d {
            let vi = v[i] * *p;
            for j in 0..d {
                rho[(i, j)] += vi * v[j].conj();
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(rho)
}

/// Reduced state of ensemble A for two ensembles, both prepared per the resolved schedule.
pub fn reduced_state_gid(resolved: &ResolvedSchedule, tau: f64) -> DensityMatrix {
    dephased_state(&resolved.rotated, &resolved.rotated, 1, 0.0, tau)
}

/// Wraps an angle into `[-pi/2, pi/2)`.
pub fn wrap_half_turn(angle: f64) -> f64 {
    let mut a = (angle + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if a >= FRAC_PI_2 {
        a -= PI;
    }
    a
}
