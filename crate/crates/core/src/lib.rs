//! Simulation and metrology for networks of `M` coupled ensembles of `N`
//! two-mode bosons, each treated as a spin-`N/2` qudit.
//!
//! The network Hamiltonian is diagonal in the product `J^z` basis:
//! `(chi_cont + chi_loc) sum_i (J^z_i)^2 + chi_nloc sum_{i<j} J^z_i J^z_j`.
//!
//! Engines:
//! - [`oracle`]: brute force on the full tensor space, the reference for everything else.
//! - [`analytic`]: closed-form moments for coherent-state inputs (entanglement protocol).
//! - [`gid`]: local-cost moments for squeezed, rotated inputs (decoherence protocol).
//!
//! [`metrology`] turns a [`MomentTable`] into squeezing parameters, Fisher
//! information and the entanglement witnesses; [`params`] computes coupling
//! constants from microscopic inputs.

pub mod analytic;
pub mod density;
pub mod error;
pub mod gid;
pub mod linalg;
pub mod metrology;
pub mod moments;
pub mod network;
pub mod oracle;
pub mod params;
pub mod protocol;
pub mod spin;
pub mod tolerances;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use moments::MomentTable;
pub use network::{Couplings, NetworkSpec};
pub use spin::{build_spin_ops, css_x, rotate, Axis, EnsembleDim, LocalState, SpinOps};
pub use tolerances::Tolerances;
