//! Coupling constants in rad/s for the three physical scenarios.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::constants::{A0, C, G, HBAR, MU0, MU_B};
use crate::params::dipolar::{dipolar_integral, Cloud};
use crate::params::double_well::{contact_integral, ModePair};

/// `C_dd = mu0 mu_B^2` for atoms carrying one Bohr magneton.
pub fn c_dd_bohr() -> f64 {
    MU0 * MU_B * MU_B
}

fn hz(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * PI)
}

/// Double-well couplings and the integrals they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingResult {
    /// Contact coupling per unit `a / a0`.
    pub chi_cont_per_a0: f64,
    pub chi_loc: f64,
    pub chi_nloc: f64,
    pub chi_nz_ab: f64,
    pub chi_nz_ba: f64,
    /// Contact integral, m^-3.
    pub i_contact: f64,
    /// Dipolar integrals, m^-3. `d_self` is the same-well term, `d_lr` the
    /// left/right term within site A.
    pub d_self: f64,
    pub d_lr: f64,
    pub d_lalb: f64,
    pub d_rarb: f64,
    pub d_ralb: f64,
    pub d_larb: f64,
}

impl CouplingResult {
    pub fn chi_cont(&self, a_over_a0: f64) -> f64 {
        self.chi_cont_per_a0 * a_over_a0
    }

    /// `(chi_cont per a0, chi_loc, chi_nloc)` in Hz.
    pub fn in_hz(&self) -> (f64, f64, f64) {
        (hz(self.chi_cont_per_a0), hz(self.chi_loc), hz(self.chi_nloc))
    }

    /// Scattering length (in `a0`) that cancels the local coupling.
    pub fn cancelling_scattering_length(&self) -> f64 {
        -self.chi_loc / self.chi_cont_per_a0
    }
}

/// Couplings between double well `a` and double well `b`, the latter
/// displaced by `displacement` (m). Dipoles point along `z`.
pub fn couplings_dw(a: &ModePair, b: &ModePair, displacement: [f64; 3], mass: f64, c_dd: f64) -> Result<CouplingResult> {
    if !(mass > 0.0) || !c_dd.is_finite() {
        return Err(Error::InvalidParameter("mass must be positive and C_dd finite".into()));
    }
    let (la, ra) = (Cloud::left(a), Cloud::right(a));
    let (lb, rb) = (Cloud::left(b), Cloud::right(b));
    let d_self = dipolar_integral(&la, &la, [0.0; 3])?;
    let d_lr = dipolar_integral(&la, &ra, [0.0; 3])?;
    let d_lalb = dipolar_integral(&la, &lb, displacement)?;
    let d_rarb = dipolar_integral(&ra, &rb, displacement)?;
    let d_ralb = dipolar_integral(&ra, &lb, displacement)?;
    let d_larb = dipolar_integral(&la, &rb, displacement)?;

    let i_contact = contact_integral(a);
    let g_per_a0 = 4.0 * PI * HBAR * HBAR * A0 / mass;
    let k = c_dd / HBAR;
    Ok(CouplingResult {
        chi_cont_per_a0: g_per_a0 * i_contact / HBAR,
        chi_loc: k * (d_self - d_lr),
        chi_nloc: k * (d_lalb + d_rarb - d_ralb - d_larb),
        chi_nz_ab: 0.5 * k * (d_lalb - d_rarb + d_ralb - d_larb),
        chi_nz_ba: 0.5 * k * (d_lalb - d_rarb - d_ralb + d_larb),
        i_contact,
        d_self,
        d_lr,
        d_lalb,
        d_rarb,
        d_ralb,
        d_larb,
    })
}

/// Nonlocal coupling `G dE^2 / (d c^4 hbar)` between two clocks with level spacing `delta_e` (J) at distance `d` (m).
pub fn cgb_coupling(delta_e: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) || !delta_e.is_finite() {
        return Err(Error::InvalidParameter(format!("distance must be positive (got {d})")));
    }
    Ok(G * delta_e * delta_e / (d * C.powi(4) * HBAR))
}

/// Couplings of two interferometers with near-arm distance `d` and arm separation `d_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmvCouplings {
    /// `G m^2 / d'` over hbar; subtract a self-energy term separately if needed.
    pub chi_loc: f64,
    pub chi_nloc: f64,
    pub chi_nz: f64,
}

pub fn bmv_couplings(mass: f64, d: f64, d_prime: f64) -> Result<BmvCouplings> {
    if !(d > 0.0) || !(d_prime > 0.0) || !(mass > 0.0) {
        return Err(Error::InvalidParameter("mass, d and d' must be positive".into()));
    }
    let gm2 = G * mass * mass / HBAR;
    Ok(BmvCouplings {
        chi_loc: gm2 / d_prime,
        chi_nloc: -gm2 * 2.0 * d_prime * d_prime / (d * (d + d_prime) * (d + 2.0 * d_prime)),
        chi_nz: -gm2 * d_prime / (d * (d + 2.0 * d_prime)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cgb_regression() {
        let chi = cgb_coupling(1.0, 1.0).unwrap();
        let expected = 6.674_30e-11 / (299_792_458f64.powi(4) * 1.054_571_817e-34);
        assert!((chi / expected - 1.0).abs() < 1e-14);
        assert!((chi / 7.835_139_8e-11 - 1.0).abs() < 1e-7, "{chi}");
        let half = cgb_coupling(1.0, 2.0).unwrap();
        assert!((half / chi - 0.5).abs() < 1e-15);
        let small = cgb_coupling(1e-3, 1.0).unwrap();
        assert!((small / chi - 1e-6).abs() < 1e-18);
        assert!(cgb_coupling(1.0, 0.0).is_err());
        assert!(cgb_coupling(1.0, -1.0).is_err());
    }

    #[test]
    fn bmv_limits() {
        let (m, d) = (1e-14, 1e-4);
        let far = -G * m * m / (d * HBAR);
        let r = bmv_couplings(m, d, 100.0 * d).unwrap();
        assert!((r.chi_nloc / far - 20000.0 / 20301.0).abs() < 1e-12);
        let mut last = 0.0;
        for k in 1..8 {
            let ratio = bmv_couplings(m, d, 10f64.powi(k) * d).unwrap().chi_nloc / far;
            assert!(ratio > last && ratio < 1.0);
            last = ratio;
        }
        assert!(1.0 - last < 1e-6);
        let near = bmv_couplings(m, d, 1e-9 * d).unwrap().chi_nloc / far;
        assert!(near.abs() < 1e-17);
        assert!(bmv_couplings(m, 0.0, d).is_err());
    }
}
