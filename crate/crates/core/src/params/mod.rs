//! Coupling constants from microscopic inputs: double-well modes, contact
//! and dipolar integrals, and the two gravitational scenarios (clock-type
//! energy superpositions and interferometric mass superpositions).

pub mod constants;
pub mod couplings;
pub mod dipolar;
pub mod double_well;

pub use couplings::{bmv_couplings, cgb_coupling, couplings_dw, BmvCouplings, CouplingResult};
pub use dipolar::{dipolar_integral, dipolar_integral_real_space, Cloud};
pub use double_well::{contact_integral, solve_double_well, Barrier, DoubleWellSpec, Grid, ModePair};
