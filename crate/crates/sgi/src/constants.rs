//! Physical constants (CODATA 2018), SI units throughout.

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054571817e-34;

/// Boltzmann constant [J/K].
pub const K_B: f64 = 1.380649e-23;

/// Magnetic flux quantum [Wb].
pub const PHI_0: f64 = 2.067833848e-15;

/// Vacuum permeability [H/m].
pub const MU_0: f64 = 1.25663706212e-6;

/// Bohr magneton [J/T], the default magnetic moment of the beam particles.
pub const MU_B: f64 = 9.274e-24;
