//! Brute-force reference simulation on the full `(N+1)^M` tensor space.
//!
//! Amplitudes are stored row-major over the site index with site 0 the
//! slowest-varying factor; each factor uses the descending-`mu` basis of
//! [`crate::spin`]. Every fast engine in the crate is validated against
//! this module.

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::network::Couplings;
use crate::spin::{build_spin_ops, Axis, EnsembleDim, LocalState, SpinOps};
use crate::tolerances::Tolerances;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalState {
    dim: EnsembleDim,
    sites: usize,
    amps: Vec<Complex64>,
}

/// Number of amplitudes for `sites` factors of dimension `dim`, checked against the cap.
pub fn checked_size(dim: EnsembleDim, sites: usize, cap: usize) -> Result<usize> {
    let total = (dim.dim() as u128).checked_pow(sites as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(Error::SizeCap { amplitudes: total, cap });
    }
    Ok(total as usize)
}

impl GlobalState {
    /// Tensor product of local states, with the default size cap.
    pub fn product(locals: &[LocalState]) -> Result<Self> {
        Self::product_capped(locals, Tolerances::DEFAULT.oracle_cap)
    }

    pub fn product_capped(locals: &[LocalState], cap: usize) -> Result<Self> {
        let first = locals.first().ok_or(Error::TooFewEnsembles { min: 1, got: 0 })?;
        let dim = first.dim();
        for l in locals {
            if l.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim.dim(), got: l.dim().dim() });
            }
        }
        checked_size(dim, locals.len(), cap)?;
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for l in locals {
            let mut next = Vec::with_capacity(amps.len() * dim.dim());
            for a in &amps {
                next.extend(l.amplitudes().iter().map(|b| a * b));
            }
            amps = next;
        }
        Ok(Self { dim, sites: locals.len(), amps })
    }

    /// Product of `sites` copies of one local state.
    pub fn uniform(local: &LocalState, sites: usize) -> Result<Self> {
        Self::product(&vec![local.clone(); sites])
    }

    pub fn from_amplitudes(dim: EnsembleDim, sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        let expected = checked_size(dim, sites, usize::MAX)?;
        if amps.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: amps.len() });
        }
        Ok(Self { dim, sites, amps })
    }

    pub fn dim(&self) -> EnsembleDim {
        self.dim
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &GlobalState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Basis index decomposed into per-site local indices.
    pub fn local_indices(&self, mut index: usize) -> Vec<usize> {
        let d = self.dim.dim();
        let mut out = vec![0; self.sites];
        for slot in out.iter_mut().rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    /// Block layout `(outer, d, inner)` of the factor at `site`.
    fn strides(&self, site: usize) -> (usize, usize, usize) {
        let d = self.dim.dim();
        let inner = d.pow((self.sites - 1 - site) as u32);
        let outer = self.amps.len() / (d * inner);
        (outer, d, inner)
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.sites {
            return Err(Error::SiteOutOfRange { site, sites: self.sites });
        }
        Ok(())
    }

    /// Applies an `(N+1) x (N+1)` matrix to one tensor factor without any checks.
    fn apply_matrix(&self, site: usize, op: &Mat<Complex64>) -> Vec<Complex64> {
        let (outer, d, inner) = self.strides(site);
        let mut out = vec![ZERO; self.amps.len()];
        out.par_chunks_mut(d * inner).enumerate().for_each(|(o, block)| {
            let src = &self.amps[o * d * inner..(o + 1) * d * inner];
            for col in 0..d {
                for row in 0..d {
                    let g = op[(row, col)];
                    if g == ZERO {
                        continue;
                    }
                    for k in 0..inner {
                        block[row * inner + k] += g * src[col * inner + k];
                    }
                }
            }
        });
        debug_assert_eq!(out.len(), outer * d * inner);
        out
    }
}

/// Phase evolution under the diagonal network Hamiltonian for time `t`.
///
/// Each basis amplitude picks up
/// `exp(-i t [(chi_cont + chi_loc) sum mu_i^2 + chi_nloc sum_{i<j} mu_i mu_j])`,
/// with the `mu` sums formed exactly in integers.
pub fn evolve_diagonal(state: &GlobalState, c: &Couplings, t: f64) -> GlobalState {
    let dim = state.dim;
    let d = dim.dim();
    let sites = state.sites;
    let local = c.local();
    let amps = state
        .amps
        .par_iter()
        .enumerate()
        .map(|(index, a)| {
            let mut rest = index;
            let mut sum = 0i64;
            let mut sum_sq = 0i64;
            for _ in 0..sites {
                let two_mu = dim.two_mu(rest % d);
                rest /= d;
                sum += two_mu;
                sum_sq += two_mu * two_mu;
            }
            // sum_{i<j} (2mu_i)(2mu_j) = (sum^2 - sum_sq) / 2
            let pairs = (sum * sum - sum_sq) / 2;
            let energy = local * sum_sq as f64 / 4.0 + c.chi_nloc * pairs as f64 / 4.0;
            a * Complex64::from_polar(1.0, -energy * t)
        })
        .collect();
    GlobalState { dim, sites, amps }
}

/// Applies a unitary gate to the factor at `site`.
pub fn apply_local(state: &GlobalState, site: usize, gate: &Mat<Complex64>) -> Result<GlobalState> {
    apply_local_with(state, site, gate, Tolerances::DEFAULT.unitarity)
}

pub fn apply_local_with(
    state: &GlobalState,
    site: usize,
    gate: &Mat<Complex64>,
    unitarity: f64,
) -> Result<GlobalState> {
    state.check_site(site)?;
    let d = state.dim.dim();
    if gate.nrows() != d || gate.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: gate.nrows() });
    }
    let prod = gate.adjoint() * gate;
    let mut deviation = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((prod[(i, j)] - target).norm());
        }
    }
    if deviation > unitarity {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(GlobalState { dim: state.dim, sites: state.sites, amps: state.apply_matrix(site, gate) })
}

/// `<state| prod_k J^{a_k}_{i_k} |state>`, operators applied right to left.
pub fn expect(state: &GlobalState, ops: &[(usize, Axis)]) -> Result<Complex64> {
    let spin = build_spin_ops(state.dim);
    expect_with(state, &spin, ops)
}

pub fn expect_with(state: &GlobalState, spin: &SpinOps, ops: &[(usize, Axis)]) -> Result<Complex64> {
    for &(site, _) in ops {
        state.check_site(site)?;
    }
    let mut v = state.clone();
    for &(site, axis) in ops.iter().rev() {
        v.amps = v.apply_matrix(site, spin.get(axis));
    }
    Ok(state.inner(&v))
}

/// Reduced density matrix of one site.
pub fn reduce(state: &GlobalState, keep: usize) -> Result<DensityMatrix> {
    state.check_site(keep)?;
    let (outer, d, inner) = state.strides(keep);
    let mut rho = Mat::<Complex64>::zeros(d, d);
    for o in 0..outer {
        let block = &state.amps[o * d * inner..(o + 1) * d * inner];
        for a in 0..d {
            for b in 0..d {
                let mut acc = ZERO;
                for k in 0..inner {
                    acc += block[a * inner + k] * block[b * inner + k].conj();
                }
                rho[(a, b)] += acc;
            }
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(rho))
}

/// Complete moment table of a global state.
pub fn moment_table(state: &GlobalState, t: f64) -> MomentTable {
    let spin = build_spin_ops(state.dim);
    let sites = state.sites;
    let applied: Vec<Vec<Complex64>> = (0..sites)
        .flat_map(|i| Axis::ALL.map(|a| (i, a)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(i, a)| state.apply_matrix(i, spin.get(a)))
        .collect();
    let dot = |u: &[Complex64], v: &[Complex64]| -> Complex64 { u.iter().zip(v).map(|(x, y)| x.conj() * y).sum() };
    let mut table = MomentTable::new(state.dim.atoms(), sites, t);
    for p in 0..3 * sites {
        let (i, a) = (p / 3, Axis::ALL[p % 3]);
        table.set_first(i, a, dot(&state.amps, &applied[p]).re);
        for q in p..3 * sites {
            let (j, b) = (q / 3, Axis::ALL[q % 3]);
            // (A psi)^dagger (B psi) = <A B>; real part is the symmetrized value.
            let value = dot(&applied[p], &applied[q]).re;
            table.set_second((i, a), (j, b), value);
        }
    }
    table
}
