//! CODATA 2018 values, SI units.

/// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
pub const G: f64 = 6.674_30e-11;
/// Speed of light, m/s.
pub const C: f64 = 299_792_458.0;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permeability, N A^-2.
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Bohr magneton, J/T.
pub const MU_B: f64 = 9.274_010_078_3e-24;
/// Bohr radius, m.
pub const A0: f64 = 5.291_772_109_03e-11;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
