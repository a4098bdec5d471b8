//! Physical constants shared across the crate.

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.9979e8;

/// Planck constant (J·s).
pub const PLANCK: f64 = 6.625e-34;

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.3806e-23;

use crate::scalar::Real;

/// Speed of light lifted into the working scalar type.
pub fn light_speed<R: Real>() -> R {
    R::of(SPEED_OF_LIGHT)
}
