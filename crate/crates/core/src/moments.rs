//! First and second moments of the site spin operators at one time point.
//!
//! This table is what the evolution engines produce and what the metrology
//! layer consumes. Same-site cross-axis entries hold the symmetrized value
//! `<{A, B}>/2`; entries on different sites hold plain products (the
//! operators commute).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::Axis;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub atoms: usize,
    pub sites: usize,
    pub t: f64,
    first: Vec<Option<f64>>,
    second: Vec<Option<f64>>,
}

impl MomentTable {
    pub fn new(atoms: usize, sites: usize, t: f64) -> Self {
        let k = 3 * sites;
        Self { atoms, sites, t, first: vec![None; k], second: vec![None; k * k] }
    }

    fn slot(site: usize, axis: Axis) -> usize {
        3 * site + axis.index()
    }

    pub fn set_first(&mut self, site: usize, axis: Axis, value: f64) {
        self.first[Self::slot(site, axis)] = Some(value);
    }

    /// Sets `<A_i B_j>` together with its mirror `<B_j A_i>`.
    pub fn set_second(&mut self, (i, a): (usize, Axis), (j, b): (usize, Axis), value: f64) {
        let k = 3 * self.sites;
        let (p, q) = (Self::slot(i, a), Self::slot(j, b));
        self.second[p * k + q] = Some(value);
        self.second[q * k + p] = Some(value);
    }

    pub fn first(&self, site: usize, axis: Axis) -> Result<f64> {
        self.first[Self::slot(site, axis)]
            .ok_or_else(|| Error::MissingMoment(format!("<J^{axis:?}_{site}>")))
    }

    pub fn second(&self, (i, a): (usize, Axis), (j, b): (usize, Axis)) -> Result<f64> {
        let k = 3 * self.sites;
        self.second[Self::slot(i, a) * k + Self::slot(j, b)]
            .ok_or_else(|| Error::MissingMoment(format!("<J^{a:?}_{i} J^{b:?}_{j}>")))
    }

    /// Fills every site with the same local moments (permutation-symmetric engines).
    pub fn fill_symmetric(&mut self, first: [f64; 3], local: [[f64; 3]; 3], cross: [[f64; 3]; 3]) {
        for i in 0..self.sites {
            for a in Axis::ALL {
                self.set_first(i, a, first[a.index()]);
            }
            for j in 0..self.sites {
                for a in Axis::ALL {
                    for b in Axis::ALL {
                        let v = if i == j { local[a.index()][b.index()] } else { cross[a.index()][b.index()] };
                        self.set_second((i, a), (j, b), v);
                    }
                }
            }
        }
    }

    /// Largest absolute difference over all entries; missing entries count as infinite.
    pub fn max_abs_diff(&self, other: &MomentTable) -> f64 {
        let diff = |a: &Option<f64>, b: &Option<f64>| match (a, b) {
            (Some(x), Some(y)) => (x - y).abs(),
            _ => f64::INFINITY,
        };
        if self.sites != other.sites {
            return f64::INFINITY;
        }
        self.first
            .iter()
            .zip(&other.first)
            .chain(self.second.iter().zip(&other.second))
            .map(|(a, b)| diff(a, b))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_entry_is_named() {
        let mut t = MomentTable::new(4, 2, 0.0);
        t.set_first(0, Axis::X, 2.0);
        assert_eq!(t.first(0, Axis::X), Ok(2.0));
        let err = t.second((0, Axis::Y), (1, Axis::Z)).unwrap_err();
        assert_eq!(err, Error::MissingMoment("<J^Y_0 J^Z_1>".into()));
    }

    #[test]
    fn second_moments_mirror() {
        let mut t = MomentTable::new(4, 2, 0.0);
        t.set_second((0, Axis::Y), (1, Axis::Z), 0.25);
        assert_eq!(t.second((1, Axis::Z), (0, Axis::Y)), Ok(0.25));
    }
}
