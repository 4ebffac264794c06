use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{require_positive, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Lorentzian,
}

/// Normalized inhomogeneous line shape G(Δ) in units of s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineProfile {
    kind: ProfileKind,
    width: f64,
}

/// Lorentzian with half width at half maximum `width` (s⁻¹).
pub fn lorentzian_profile(width: f64) -> Result<LineProfile> {
    Ok(LineProfile {
        kind: ProfileKind::Lorentzian,
        width: require_positive("width", width)?,
    })
}

impl LineProfile {
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// G(Δ) = Δ_n / (π (Δ_n² + Δ²)).
    pub fn density(&self, detuning: f64) -> f64 {
        match self.kind {
            ProfileKind::Lorentzian => {
                self.width / (PI * (self.width * self.width + detuning * detuning))
            }
        }
    }

    pub fn cdf(&self, detuning: f64) -> f64 {
        match self.kind {
            ProfileKind::Lorentzian => 0.5 + (detuning / self.width).atan() / PI,
        }
    }

    pub fn inverse_cdf(&self, p: f64) -> f64 {
        match self.kind {
            ProfileKind::Lorentzian => self.width * (PI * (p - 0.5)).tan(),
        }
    }

    /// K(u) = lim_{ε→0⁺} ∫ G(Δ') / (ε + i(Δ' − u)) dΔ' = πG(u) − i·PV∫ G(Δ')/(Δ' − u) dΔ'.
    ///
    /// The one-sided limit is taken from ε > 0 so Re K > 0 (absorption).
    pub fn cauchy_transform(&self, u: f64) -> Complex64 {
        match self.kind {
            ProfileKind::Lorentzian => Complex64::new(1.0, 0.0) / Complex64::new(self.width, -u),
        }
    }
}
