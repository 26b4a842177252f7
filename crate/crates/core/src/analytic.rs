//! Closed-form moments for a product of `+x` coherent states evolved under
//! the network Hamiltonian.
//!
//! With `a = chi_cont + chi_loc`, `b = chi_nloc` and all powers taken with
//! [`signed_pow`], every moment is a product of cosines. The cross-site
//! correlators here differ from older printed versions in their prefactors;
//! see `docs/FORMULA_ERRATA.md`.

use rayon::prelude::*;

use crate::linalg::signed_pow;
use crate::moments::MomentTable;
use crate::network::Couplings;
use crate::spin::EnsembleDim;

/// Moment table at time `t` for `sites` ensembles of `dim` atoms.
///
/// # Panics
/// If `sites < 2`.
pub fn gie_moments(dim: EnsembleDim, sites: usize, c: &Couplings, t: f64) -> MomentTable {
    assert!(sites >= 2, "network needs at least two ensembles");
    let n = dim.atoms() as u64;
    let nf = n as f64;
    let m = sites as u64;
    let a = c.local() * t;
    let b = c.chi_nloc * t;
    // Other sites seen by a single-site operator and by a two-site operator.
    let others1 = n * (m - 1);
    let others2 = n * (m - 2);

    let x = 0.5 * nf * signed_pow(a.cos(), n - 1) * signed_pow((0.5 * b).cos(), others1);

    let (xx, yy, yz) = if n >= 2 {
        let twist = nf * (nf - 1.0) / 8.0 * signed_pow((2.0 * a).cos(), n - 2) * signed_pow(b.cos(), others1);
        let yz = nf * (nf - 1.0) / 4.0
            * signed_pow(a.cos(), n - 2)
            * a.sin()
            * signed_pow((0.5 * b).cos(), others1);
        (nf * (nf + 1.0) / 8.0 + twist, nf * (nf + 1.0) / 8.0 - twist, yz)
    } else {
        // Spin one-half: (J^a)^2 = 1/4 and anticommutators vanish.
        (0.25, 0.25, 0.0)
    };
    let zz = nf / 4.0;

    let pair = nf * nf / 8.0
        * (signed_pow(((a - 0.5 * b) * 1.0).cos(), 2 * n - 2)
            - signed_pow((a + 0.5 * b).cos(), 2 * n - 2) * signed_pow(b.cos(), others2));
    let pair_sum = nf * nf / 8.0
        * (signed_pow((a - 0.5 * b).cos(), 2 * n - 2)
            + signed_pow((a + 0.5 * b).cos(), 2 * n - 2) * signed_pow(b.cos(), others2));
    let cross_yz = nf * nf / 4.0
        * signed_pow(a.cos(), n - 1)
        * (0.5 * b).sin()
        * signed_pow((0.5 * b).cos(), n - 1)
        * signed_pow((0.5 * b).cos(), others2);

    let mut table = MomentTable::new(dim.atoms(), sites, t);
    let local = [[xx, 0.0, 0.0], [0.0, yy, yz], [0.0, yz, zz]];
    let cross = [[pair_sum, 0.0, 0.0], [0.0, pair, cross_yz], [0.0, cross_yz, 0.0]];
    table.fill_symmetric([x, 0.0, 0.0], local, cross);
    table
}

/// [`gie_moments`] over a time grid, evaluated in parallel, in grid order.
pub fn gie_series(dim: EnsembleDim, sites: usize, c: &Couplings, times: &[f64]) -> Vec<MomentTable> {
    times.par_iter().map(|&t| gie_moments(dim, sites, c, t)).collect()
}
