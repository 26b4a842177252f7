//! Dipolar interaction integrals
//! `D_ab = int int n_a(r) U(r - r') n_b(r') dr dr'` with
//! `U(u) = (1 - 3 cos^2 Theta) / (4 pi |u|^3)` for dipoles along `z`.
//!
//! The momentum-space kernel `k_z^2/k^2 - 1/3` is written as
//! `int_0^inf k_z^2 e^{-s k^2} ds - 1/3`, which turns the integral into
//!
//! `D = -Q(0)/3 + int_0^inf X(s) Y(s) Z(s) ds`
//!
//! where `Q` is the distribution of `r - r'`, `X` and `Y` are its heat-kernel
//! smoothings along `x` and `y` at the origin, and `Z` is minus the second
//! derivative of the smoothing along `z`. The transverse factors are
//! Gaussian in closed form; `X` comes from the sampled densities. No
//! regularization of the `k = 0` mode or of overlapping densities is needed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::double_well::ModePair;

/// Density sampled on a uniform grid along `x`, Gaussian along `y` and `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cloud {
    /// Position of the first sample.
    pub x0: f64,
    pub dx: f64,
    /// Normalized so that `sum(density) * dx = 1`.
    pub density: Vec<f64>,
    /// Variances of the transverse densities.
    pub var_y: f64,
    pub var_z: f64,
}

impl Cloud {
    /// Density `|psi|^2` of a grid mode with harmonic transverse ground states.
    pub fn from_mode(psi: &[f64], x0: f64, dx: f64, sigma_y: f64, sigma_z: f64) -> Self {
        let raw: Vec<f64> = psi.iter().map(|a| a * a).collect();
        Self::normalized(x0, dx, raw, 0.5 * sigma_y * sigma_y, 0.5 * sigma_z * sigma_z)
    }

    /// Left-well cloud of a mode pair.
    pub fn left(m: &ModePair) -> Self {
        Self::from_mode(&m.psi_l, m.x[0], m.dx, m.sigma_y, m.sigma_z)
    }

    pub fn right(m: &ModePair) -> Self {
        Self::from_mode(&m.psi_r, m.x[0], m.dx, m.sigma_y, m.sigma_z)
    }

    /// Centred Gaussian density with standard deviations `(sx, sy, sz)`,
    /// sampled with spacing `dx` over at least `+-half_width * sx`.
    pub fn gaussian(sx: f64, sy: f64, sz: f64, dx: f64, half_width: f64) -> Self {
        let half = (half_width * sx / dx).ceil() as usize;
        let points = 2 * half + 1;
        let x0 = -(half as f64) * dx;
        let raw = (0..points).map(|i| (-0.5 * ((x0 + i as f64 * dx) / sx).powi(2)).exp()).collect();
        Self::normalized(x0, dx, raw, sy * sy, sz * sz)
    }

    fn normalized(x0: f64, dx: f64, raw: Vec<f64>, var_y: f64, var_z: f64) -> Self {
        let total: f64 = raw.iter().sum::<f64>() * dx;
        Self { x0, dx, density: raw.into_iter().map(|v| v / total).collect(), var_y, var_z }
    }

    fn validate(&self) -> Result<()> {
        if self.density.len() < 2 || !(self.dx > 0.0) || !(self.var_y > 0.0) || !(self.var_z > 0.0) {
            return Err(Error::InvalidParameter("cloud needs >= 2 samples, dx > 0 and positive transverse variances".into()));
        }
        Ok(())
    }
}

fn gaussian_at(mean: f64, var: f64) -> f64 {
    (-0.5 * mean * mean / var).exp() / (2.0 * PI * var).sqrt()
}

/// Distribution of `x_a - x_b` along the grid axis as lattice weights.
struct Lag {
    offset: f64,
    dx: f64,
    /// `weights[j]` sits at `offset + (j - shift) dx`; sums to 1.
    weights: Vec<f64>,
    shift: usize,
}

impl Lag {
    fn new(a: &Cloud, b: &Cloud, displacement: f64) -> Self {
        let (na, nb) = (a.density.len(), b.density.len());
        let mut weights = vec![0.0; na + nb - 1];
        let w = a.dx * a.dx;
        for (i, pa) in a.density.iter().enumerate() {
            for (k, pb) in b.density.iter().enumerate() {
                weights[i + nb - 1 - k] += w * pa * pb;
            }
        }
        Self { offset: a.x0 - (b.x0 + displacement), dx: a.dx, weights, shift: nb - 1 }
    }

    fn position(&self, j: usize) -> f64 {
        self.offset + (j as f64 - self.shift as f64) * self.dx
    }

    /// Smallest variance `2s` for which the lattice sum is used directly.
    fn direct_threshold(&self) -> f64 {
        1.125 * self.dx * self.dx
    }

    /// `E[Q(U)]` for `U ~ N(0, 2s)`, i.e. the heat-kernel smoothing at the origin.
    fn smoothed(&self, s: f64) -> f64 {
        if s >= self.direct_threshold() {
            let var = 2.0 * s;
            let norm = 1.0 / (2.0 * PI * var).sqrt();
            let cut = 40.0 * var.sqrt();
            let mut acc = 0.0;
            for (j, w) in self.weights.iter().enumerate() {
                let u = self.position(j);
                if u.abs() <= cut {
                    acc += w * norm * (-0.5 * u * u / var).exp();
                }
            }
            acc
        } else {
            self.local_expectation(s)
        }
    }

    /// Gaussian expectation of the degree-8 interpolant of `Q` through the nine samples nearest 0.
    fn local_expectation(&self, s: f64) -> f64 {
        const NODES: usize = 9;
        let len = self.weights.len();
        let centre = ((self.shift as f64 * self.dx - self.offset) / self.dx).round() as i64;
        let start = (centre - (NODES as i64) / 2).clamp(0, len.saturating_sub(NODES) as i64) as usize;
        let nodes = NODES.min(len);
        // Interpolate in t = u / dx.
        let ts: Vec<f64> = (start..start + nodes).map(|j| self.position(j) / self.dx).collect();
        let qs: Vec<f64> = (start..start + nodes).map(|j| self.weights[j] / self.dx).collect();
        let mut coeffs = vec![0.0; nodes];
        for m in 0..nodes {
            let mut poly = vec![1.0];
            let mut denom = 1.0;
            for l in 0..nodes {
                if l == m {
                    continue;
                }
                let mut next = vec![0.0; poly.len() + 1];
                for (p, c) in poly.iter().enumerate() {
                    next[p + 1] += c;
                    next[p] -= c * ts[l];
                }
                poly = next;
                denom *= ts[m] - ts[l];
            }
            for (p, c) in poly.iter().enumerate() {
                coeffs[p] += qs[m] * c / denom;
            }
        }
        // E[t^k] for t ~ N(0, 2s/dx^2).
        let var = 2.0 * s / (self.dx * self.dx);
        let mut moment = 1.0;
        let mut acc = coeffs[0];
        for k in (2..nodes).step_by(2) {
            moment *= var * (k - 1) as f64;
            acc += coeffs[k] * moment;
        }
        acc
    }
}

/// `D_ab` for cloud `b` displaced by `displacement` relative to cloud `a`, in m^-3.
pub fn dipolar_integral(a: &Cloud, b: &Cloud, displacement: [f64; 3]) -> Result<f64> {
    a.validate()?;
    b.validate()?;
    if ((a.dx - b.dx) / a.dx).abs() > 1e-12 {
        return Err(Error::InvalidParameter("clouds must share the grid spacing".into()));
    }
    let lag = Lag::new(a, b, displacement[0]);
    let (my, mz) = (-displacement[1], -displacement[2]);
    let (vy0, vz0) = (a.var_y + b.var_y, a.var_z + b.var_z);

    let q0 = lag.smoothed(0.0) * gaussian_at(my, vy0) * gaussian_at(mz, vz0);

    let integrand = |s: f64| -> f64 {
        let vy = vy0 + 2.0 * s;
        let vz = vz0 + 2.0 * s;
        let z = gaussian_at(mz, vz) * (1.0 / vz - mz * mz / (vz * vz));
        lag.smoothed(s) * gaussian_at(my, vy) * z
    };

    // s = e^w, trapezoid in w.
    let span = lag.weights.len() as f64 * lag.dx + displacement.iter().map(|d| d.abs()).sum::<f64>();
    let small = (lag.dx * lag.dx).min(vy0).min(vz0);
    let large = (span * span).max(vy0).max(vz0);
    let (w_lo, w_hi) = ((1e-10 * small).ln(), (1e8 * large).ln());
    let steps = ((w_hi - w_lo) / 0.02).ceil() as usize;
    let h = (w_hi - w_lo) / steps as f64;
    let mut acc = 0.0;
    for k in 0..=steps {
        let s = (w_lo + k as f64 * h).exp();
        let weight = if k == 0 || k == steps { 0.5 } else { 1.0 };
        acc += weight * integrand(s) * s;
    }
    Ok(-q0 / 3.0 + acc * h)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Real-space evaluation of `int U(u) Q(u) du` by spherical quadrature about `u = 0`.
///
/// `q` is the distribution of `r - r'`, concentrated within `extent` of
/// `centre`. The angular integral of the kernel vanishes, so the radial
/// integrand stays finite at the origin. Slow; meant for validation.
pub fn dipolar_integral_real_space(q: &dyn Fn([f64; 3]) -> f64, centre: [f64; 3], extent: f64) -> f64 {
    let r_max = (centre[0].powi(2) + centre[1].powi(2) + centre[2].powi(2)).sqrt() + extent;
    let panels = 48;
    let (gx, gw) = gauss_legendre(16);
    let (cx, cw) = gauss_legendre(96);
    let n_phi = 128;
    let mut total = 0.0;
    for p in 0..panels {
        let (a, b) = (r_max * p as f64 / panels as f64, r_max * (p + 1) as f64 / panels as f64);
        for (xi, wi) in gx.iter().zip(&gw) {
            let r = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let mut angular = 0.0;
            for (c, wc) in cx.iter().zip(&cw) {
                let sin = (1.0 - c * c).sqrt();
                let kernel = 1.0 - 3.0 * c * c;
                let mut ring = 0.0;
                for k in 0..n_phi {
                    let phi = 2.0 * PI * k as f64 / n_phi as f64;
                    ring += q([r * sin * phi.cos(), r * sin * phi.sin(), r * c]);
                }
                angular += wc * kernel * ring * 2.0 * PI / n_phi as f64;
            }
            total += 0.5 * (b - a) * wi * angular / r;
        }
    }
    total / (4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((int - 2.0 / 19.0).abs() < 1e-14);
    }

    #[test]
    fn spherical_self_term_vanishes() {
        let c = Cloud::gaussian(1.0, 1.0, 1.0, 0.05, 8.0);
        let d = dipolar_integral(&c, &c, [0.0; 3]).unwrap();
        let leading = 1.0 / (3.0 * (4.0 * PI).powf(1.5));
        assert!(d.abs() < 1e-6 * leading, "{d}");
    }

    #[test]
    fn point_dipole_ratio() {
        let c = Cloud::gaussian(0.01, 0.01, 0.01, 0.001, 8.0);
        let along_z = dipolar_integral(&c, &c, [0.0, 0.0, 1.0]).unwrap();
        let along_x = dipolar_integral(&c, &c, [1.0, 0.0, 0.0]).unwrap();
        assert!((along_x - 1.0 / (4.0 * PI)).abs() < 1e-3 / (4.0 * PI));
        assert!((along_z / along_x + 2.0).abs() < 1e-3);
    }
}
