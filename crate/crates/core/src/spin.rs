//! Collective pseudo-spin algebra for one ensemble of `N` two-mode bosons.
//!
//! Basis convention, used everywhere in the crate: the `(N+1)`-dimensional
//! space is spanned by `J^z` eigenstates ordered by *descending* eigenvalue,
//! so index `k` holds `mu = N/2 - k` (index 0 is `mu = +N/2`).

use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Atom number of one ensemble, i.e. a qudit of dimension `N+1` and spin `N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnsembleDim {
    n: usize,
}

impl EnsembleDim {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        Ok(Self { n })
    }

    pub fn atoms(self) -> usize {
        self.n
    }

    pub fn dim(self) -> usize {
        self.n + 1
    }

    /// Spin length `S = N/2`; exact in binary floating point.
    pub fn spin(self) -> f64 {
        self.n as f64 / 2.0
    }

    /// Twice the `J^z` eigenvalue at basis index `k`, as an exact integer.
    pub fn two_mu(self, k: usize) -> i64 {
        self.n as i64 - 2 * k as i64
    }

    pub fn mu(self, k: usize) -> f64 {
        self.two_mu(k) as f64 / 2.0
    }

    /// Matrix element `<mu+1| J^+ |mu>` for the state at index `k`.
    fn raising(self, k: usize) -> f64 {
        let s = self.spin();
        let mu = self.mu(k);
        (s * (s + 1.0) - mu * (mu + 1.0)).max(0.0).sqrt()
    }
}

/// Dense `J^x`, `J^y`, `J^z` in the descending-`mu` basis.
#[derive(Debug, Clone)]
pub struct SpinOps {
    pub jx: Mat<Complex64>,
    pub jy: Mat<Complex64>,
    pub jz: Mat<Complex64>,
}

impl SpinOps {
    pub fn get(&self, axis: Axis) -> &Mat<Complex64> {
        match axis {
            Axis::X => &self.jx,
            Axis::Y => &self.jy,
            Axis::Z => &self.jz,
        }
    }
}

pub fn build_spin_ops(dim: EnsembleDim) -> SpinOps {
    let d = dim.dim();
    let mut jx = Mat::<Complex64>::zeros(d, d);
    let mut jy = Mat::<Complex64>::zeros(d, d);
    let mut jz = Mat::<Complex64>::zeros(d, d);
    for k in 0..d {
        jz[(k, k)] = Complex64::from(dim.mu(k));
    }
    // J^+ maps index k to k-1.
    for k in 1..d {
        let c = dim.raising(k);
        jx[(k - 1, k)] = Complex64::from(0.5 * c);
        jx[(k, k - 1)] = Complex64::from(0.5 * c);
        jy[(k - 1, k)] = -I * (0.5 * c);
        jy[(k, k - 1)] = I * (0.5 * c);
    }
    SpinOps { jx, jy, jz }
}

/// Pure state of one ensemble: amplitudes over the `J^z` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalState {
    dim: EnsembleDim,
    amps: Vec<Complex64>,
}

impl LocalState {
    pub fn from_amplitudes(dim: EnsembleDim, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != dim.dim() {
            return Err(Error::DimensionMismatch { expected: dim.dim(), got: amps.len() });
        }
        Ok(Self { dim, amps })
    }

    /// The `J^z` eigenstate with eigenvalue `N/2 - k`.
    pub fn basis(dim: EnsembleDim, k: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim.dim()];
        amps[k] = Complex64::new(1.0, 0.0);
        Self { dim, amps }
    }

    pub fn dim(&self) -> EnsembleDim {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &LocalState) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `<psi| op |psi>` for a dense operator.
    pub fn expect(&self, op: &Mat<Complex64>) -> Complex64 {
        let v = apply(op, &self.amps);
        self.amps.iter().zip(&v).map(|(a, b)| a.conj() * b).sum()
    }

    /// Populations `|<mu_k|psi>|^2`.
    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies amplitude `k` by `exp(-i phase(k))`.
    pub fn apply_diagonal_phase(&self, phase: impl Fn(usize) -> f64) -> LocalState {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::from_polar(1.0, -phase(k)))
            .collect();
        LocalState { dim: self.dim, amps }
    }
}

pub(crate) fn apply(op: &Mat<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let vj = v[j];
        if vj == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += op[(i, j)] * vj;
        }
    }
    out
}

/// Coherent spin state polarized along `+x`.
pub fn css_x(dim: EnsembleDim) -> LocalState {
    let n = dim.atoms();
    // ln k! by prefix sums keeps the binomial weights finite for large N.
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_norm = 0.5 * n as f64 * std::f64::consts::LN_2;
    let amps = (0..=n)
        .map(|k| {
            let ln_binom = ln_fact[n] - ln_fact[k] - ln_fact[n - k];
            Complex64::new((0.5 * ln_binom - ln_norm).exp(), 0.0)
        })
        .collect();
    LocalState { dim, amps }
}

/// Eigenstructure of `J^x`, shared by rotations about `x` and `y`.
///
/// `J^y = P J^x P^dagger` with `P = exp(-i pi/2 J^z)`, so one real symmetric
/// diagonalization per `N` serves both axes; `z` rotations are diagonal.
#[derive(Debug, Clone)]
pub struct Rotator {
    dim: EnsembleDim,
    eigenvalues: Arc<Vec<f64>>,
    eigenvectors: Arc<Mat<f64>>,
}

impl Rotator {
    pub fn new(dim: EnsembleDim) -> Self {
        let d = dim.dim();
        let mut jx = Mat::<f64>::zeros(d, d);
        for k in 1..d {
            let c = 0.5 * dim.raising(k);
            jx[(k - 1, k)] = c;
            jx[(k, k - 1)] = c;
        }
        let (mut values, vectors) = linalg::symmetric_eigen(&jx);
        // The spectrum is exactly {-S, ..., S}; snap away the solver's rounding.
        for (i, v) in values.iter_mut().enumerate() {
            let exact = -dim.spin() + i as f64;
            debug_assert!((*v - exact).abs() < 1e-6 * (1.0 + dim.spin()));
            *v = exact;
        }
        Self { dim, eigenvalues: Arc::new(values), eigenvectors: Arc::new(vectors) }
    }

    pub fn dim(&self) -> EnsembleDim {
        self.dim
    }

    /// `exp(-i angle J^x) v` on a raw amplitude vector.
    fn rotate_x_raw(&self, v: &[Complex64], angle: f64) -> Vec<Complex64> {
        let u = &*self.eigenvectors;
        let d = v.len();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); d];
        for (m, c) in coeffs.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..d {
                acc += v[k] * u[(k, m)];
            }
            *c = acc * Complex64::from_polar(1.0, -angle * self.eigenvalues[m]);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (m, c) in coeffs.iter().enumerate() {
            for (k, o) in out.iter_mut().enumerate() {
                *o += c * u[(k, m)];
            }
        }
        out
    }

    /// Returns `exp(-i angle J^axis) |state>`.
    pub fn rotate(&self, state: &LocalState, axis: Axis, angle: f64) -> LocalState {
        assert_eq!(state.dim, self.dim, "rotator built for a different ensemble size");
        let dim = self.dim;
        let amps = match axis {
            Axis::Z => {
                return state.apply_diagonal_phase(|k| angle * dim.mu(k));
            }
            Axis::X => self.rotate_x_raw(&state.amps, angle),
            Axis::Y => {
                // exp(-i a J^y) = P exp(-i a J^x) P^dagger, P = exp(-i pi/2 J^z)
                let half_pi = std::f64::consts::FRAC_PI_2;
                let pdag: Vec<Complex64> = state
                    .amps
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * Complex64::from_polar(1.0, half_pi * dim.mu(k)))
                    .collect();
                let rotated = self.rotate_x_raw(&pdag, angle);
                rotated
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * Complex64::from_polar(1.0, -half_pi * dim.mu(k)))
                    .collect()
            }
        };
        LocalState { dim, amps }
    }

    /// Dense unitary `exp(-i angle J^axis)`.
    pub fn unitary(&self, axis: Axis, angle: f64) -> Mat<Complex64> {
        let d = self.dim.dim();
        let mut out = Mat::<Complex64>::zeros(d, d);
        for k in 0..d {
            let col = self.rotate(&LocalState::basis(self.dim, k), axis, angle);
            for (i, a) in col.amps.iter().enumerate() {
                out[(i, k)] = *a;
            }
        }
        out
    }
}

/// One-shot rotation; build a [`Rotator`] to amortize the diagonalization.
pub fn rotate(state: &LocalState, axis: Axis, angle: f64) -> LocalState {
    Rotator::new(state.dim()).rotate(state, axis, angle)
}

/// First and second moments of one pure local state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMoments {
    /// `<J^a>`.
    pub mean: [f64; 3],
    /// Symmetrized `<{J^a, J^b}>/2`.
    pub second: [[f64; 3]; 3],
}

impl LocalMoments {
    pub fn of(state: &LocalState, ops: &SpinOps) -> Self {
        let mut mean = [0.0; 3];
        let mut second = [[0.0; 3]; 3];
        let applied: Vec<Vec<Complex64>> =
            Axis::ALL.iter().map(|&a| apply(ops.get(a), &state.amps)).collect();
        for a in 0..3 {
            mean[a] = state.amps.iter().zip(&applied[a]).map(|(x, y)| x.conj() * y).sum::<Complex64>().re;
            for b in 0..3 {
                // <A B> = (A psi)^dagger (B psi) for Hermitian A.
                let ab: Complex64 = applied[a].iter().zip(&applied[b]).map(|(x, y)| x.conj() * y).sum();
                second[a][b] = ab.re;
            }
        }
        Self { mean, second }
    }

    pub fn covariance(&self, a: Axis, b: Axis) -> f64 {
        self.second[a.index()][b.index()] - self.mean[a.index()] * self.mean[b.index()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn max_abs(m: &Mat<Complex64>) -> f64 {
        let mut best = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                best = best.max(m[(i, j)].norm());
            }
        }
        best
    }

    fn commutator(a: &Mat<Complex64>, b: &Mat<Complex64>) -> Mat<Complex64> {
        a * b - b * a
    }

    #[test]
    fn zero_atoms_rejected() {
        assert_eq!(EnsembleDim::new(0), Err(Error::EmptyEnsemble));
    }

    #[test]
    fn spin_half_jz() {
        let ops = build_spin_ops(EnsembleDim::new(1).unwrap());
        assert_eq!(ops.jz[(0, 0)], c(0.5));
        assert_eq!(ops.jz[(1, 1)], c(-0.5));
    }

    #[test]
    fn spin_one_jx() {
        let ops = build_spin_ops(EnsembleDim::new(2).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let want = [[0.0, s, 0.0], [s, 0.0, s], [0.0, s, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((ops.jx[(i, j)] - c(want[i][j])).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn commutation_and_casimir() {
        for n in [1usize, 2, 3, 4, 7, 16, 31, 50] {
            let dim = EnsembleDim::new(n).unwrap();
            let ops = build_spin_ops(dim);
            let triples = [(&ops.jx, &ops.jy, &ops.jz), (&ops.jy, &ops.jz, &ops.jx), (&ops.jz, &ops.jx, &ops.jy)];
            for (a, b, cc) in triples {
                let dev = commutator(a, b) - linalg::scaled(cc, I);
                assert!(max_abs(&dev) < 1e-11, "N={n}");
            }
            let s = dim.spin();
            let cas = &ops.jx * &ops.jx + &ops.jy * &ops.jy + &ops.jz * &ops.jz
                - linalg::scaled(&Mat::<Complex64>::identity(n + 1, n + 1), c(s * (s + 1.0)));
            assert!(max_abs(&cas) < 1e-10, "N={n}");
            let herm = &ops.jy - ops.jy.adjoint();
            assert!(max_abs(&herm) < 1e-12);
        }
    }

    #[test]
    fn css_amplitudes() {
        let s = css_x(EnsembleDim::new(2).unwrap());
        let want = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (a, w) in s.amplitudes().iter().zip(want) {
            assert!((a - c(w)).norm() < 1e-15);
        }
        let s1 = css_x(EnsembleDim::new(1).unwrap());
        for a in s1.amplitudes() {
            assert!((a - c(std::f64::consts::FRAC_1_SQRT_2)).norm() < 1e-15);
        }
    }

    #[test]
    fn css_polarization_and_variances() {
        for n in [1usize, 5, 20, 64, 301] {
            let dim = EnsembleDim::new(n).unwrap();
            let st = css_x(dim);
            assert!((st.norm() - 1.0).abs() < 1e-12);
            let m = LocalMoments::of(&st, &build_spin_ops(dim));
            assert!((m.mean[0] - n as f64 / 2.0).abs() < 1e-12 * n as f64);
            assert!(m.mean[1].abs() < 1e-12 && m.mean[2].abs() < 1e-12);
            assert!((m.covariance(Axis::Y, Axis::Y) - n as f64 / 4.0).abs() < 1e-10 * n as f64);
            assert!((m.covariance(Axis::Z, Axis::Z) - n as f64 / 4.0).abs() < 1e-10 * n as f64);
        }
    }

    #[test]
    fn rotation_about_polarization_axis() {
        let dim = EnsembleDim::new(20).unwrap();
        let ops = build_spin_ops(dim);
        let rot = Rotator::new(dim);
        let st = css_x(dim);
        for angle in [0.1, 1.3, -2.7] {
            let r = rot.rotate(&st, Axis::X, angle);
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!((r.expect(&ops.jx).re - 10.0).abs() < 1e-12 * 10.0);
        }
    }

    #[test]
    fn half_pi_pulse_prepares_css() {
        for n in [1usize, 2, 9, 40] {
            let dim = EnsembleDim::new(n).unwrap();
            let up = LocalState::basis(dim, 0);
            let r = rotate(&up, Axis::Y, PI / 2.0);
            let css = css_x(dim);
            for (a, b) in r.amplitudes().iter().zip(css.amplitudes()) {
                assert!((a - b).norm() < 1e-10, "N={n}");
            }
        }
    }

    #[test]
    fn full_z_turn_is_identity_for_integer_spin() {
        let dim = EnsembleDim::new(6).unwrap();
        let st = rotate(&css_x(dim), Axis::Y, 0.4);
        let r = rotate(&st, Axis::Z, 2.0 * PI);
        for (a, b) in r.amplitudes().iter().zip(st.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rotation_matches_dense_exponential() {
        // Independent route: Taylor series of exp(-i a J) summed to convergence.
        let dim = EnsembleDim::new(5).unwrap();
        let ops = build_spin_ops(dim);
        let rot = Rotator::new(dim);
        let angle = 0.83;
        for axis in Axis::ALL {
            let gen = linalg::scaled(ops.get(axis), Complex64::new(0.0, -angle));
            let mut term = Mat::<Complex64>::identity(6, 6);
            let mut sum = term.clone();
            for k in 1..80 {
                term = linalg::scaled(&(&term * &gen), c(1.0 / k as f64));
                sum = &sum + &term;
            }
            let u = rot.unitary(axis, angle);
            assert!(max_abs(&(&u - &sum)) < 1e-12, "{axis:?}");
        }
    }
}
