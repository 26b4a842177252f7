use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::EnsembleDim;

/// Coupling constants of the network Hamiltonian
/// `(chi_cont + chi_loc) sum_i (J^z_i)^2 + chi_nloc sum_{i<j} J^z_i J^z_j`.
///
/// Values are angular frequencies (rad/s) with times in seconds, or pure
/// numbers with dimensionless times when `dimensionless` is set. The
/// evolution phases are `chi * t` either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub chi_cont: f64,
    pub chi_loc: f64,
    pub chi_nloc: f64,
    #[serde(default)]
    pub dimensionless: bool,
}

impl Couplings {
    /// Pure nonlocal coupling with `chi_nloc = 1`, times measured as `tau = chi_nloc t`.
    pub fn dimensionless_nonlocal() -> Self {
        Self { chi_cont: 0.0, chi_loc: 0.0, chi_nloc: 1.0, dimensionless: true }
    }

    /// Net one-axis-twisting strength `chi_cont + chi_loc`.
    pub fn local(&self) -> f64 {
        self.chi_cont + self.chi_loc
    }

    pub fn validate(&self) -> Result<()> {
        if [self.chi_cont, self.chi_loc, self.chi_nloc].iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("couplings must be finite".into()))
        }
    }
}

/// `M` identical ensembles of `N` atoms each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub dim: EnsembleDim,
    pub sites: usize,
}

impl NetworkSpec {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        let dim = EnsembleDim::new(n)?;
        if m < 2 {
            return Err(Error::TooFewEnsembles { min: 2, got: m });
        }
        Ok(Self { dim, sites: m })
    }

    pub fn atoms(&self) -> usize {
        self.dim.atoms()
    }
}
