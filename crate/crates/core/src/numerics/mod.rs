//! Frequency grids, spectral functions, line profiles and special functions.

mod grid;
mod profile;
pub mod reference;
mod special;

pub use grid::{FrequencyGrid, SpectralFunction};
pub use profile::{lorentzian_profile, LineProfile, ProfileKind};
pub use special::{complex_gamma, gauss_2f1_at_unity, is_gamma_pole, POLE_TOLERANCE};

/// Vacuum speed of light in cm/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e10;
