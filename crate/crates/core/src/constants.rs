//! SI physical constants.

/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
/// Vacuum permittivity (F/m).
pub const EPS0: f64 = 8.854_187_812_8e-12;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Free-electron gyromagnetic ratio magnitude (rad s^-1 T^-1).
pub const GAMMA_E: f64 = 1.76e11;
