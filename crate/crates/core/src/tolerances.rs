//! Default numerical tolerances and size caps, collected in one record.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed departure of a gate from unitarity in `apply_local`.
    pub unitarity: f64,
    /// Largest number of amplitudes the brute-force oracle will allocate.
    pub oracle_cap: usize,
    /// Eigenvalue pairs with `p_k + p_l` below this are skipped in the Fisher matrix.
    pub fisher_weight_floor: f64,
    /// Most negative eigenvalue tolerated in a density matrix.
    pub psd_floor: f64,
    /// Relative eigenvalue drift allowed when the double-well grid is refined.
    pub refinement_drift: f64,
    /// Spread of the transverse covariance below which the squeezing angle is degenerate.
    pub isotropy: f64,
    /// Largest deviation accepted by `oracle-check`.
    pub oracle_agreement: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        unitarity: 1e-10,
        oracle_cap: 1_000_000,
        fisher_weight_floor: 1e-12,
        psd_floor: -1e-9,
        refinement_drift: 1e-6,
        isotropy: 1e-12,
        oracle_agreement: 1e-8,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
