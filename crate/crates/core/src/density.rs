//! Single-site density matrices.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spin::LocalState;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: Mat<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity before wrapping.
    pub fn from_matrix(rho: Mat<Complex64>) -> Result<Self> {
        let n = rho.nrows();
        if rho.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: rho.ncols() });
        }
        let mut herm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                herm = herm.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        if herm > 1e-10 {
            return Err(Error::InvalidParameter(format!("density matrix not Hermitian ({herm:e})")));
        }
        let dm = Self { rho };
        let tr = dm.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr} != 1")));
        }
        let lmin = dm.min_eigenvalue();
        if lmin < Tolerances::DEFAULT.psd_floor {
            return Err(Error::NotPositive { eigenvalue: lmin });
        }
        Ok(dm)
    }

    pub(crate) fn from_matrix_unchecked(rho: Mat<Complex64>) -> Self {
        Self { rho }
    }

    /// `|psi><psi|`.
    pub fn pure(state: &LocalState) -> Self {
        let a = state.amplitudes();
        let n = a.len();
        Self { rho: Mat::from_fn(n, n, |i, j| a[i] * a[j].conj()) }
    }

    /// The maximally mixed state of dimension `n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self { rho: Mat::from_fn(n, n, |i, j| if i == j { Complex64::new(1.0 / n as f64, 0.0) } else { Complex64::new(0.0, 0.0) }) }
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).sum()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.rho[(i, j)].norm_sqr();
            }
        }
        acc
    }

    /// Eigenvalues ascending and eigenvectors as columns.
    pub fn eigen(&self) -> (Vec<f64>, Mat<Complex64>) {
        linalg::hermitian_eigen(&self.rho)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.rho).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// `Tr(rho A)`.
    pub fn expect(&self, op: &Mat<Complex64>) -> Complex64 {
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.rho[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// Entry-wise largest absolute difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let n = self.dim();
        if other.dim() != n {
            return f64::INFINITY;
        }
        let mut d = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                d = d.max((self.rho[(i, j)] - other.rho[(i, j)]).norm());
            }
        }
        d
    }
}
