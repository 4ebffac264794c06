use std::f64::consts::PI;

use num_complex::Complex64;

use crate::control::Direction;
use crate::error::{invalid, require_positive, Result};
use crate::mapping::{Medium, PhotonState};
use crate::numerics::{FrequencyGrid, SpectralFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Depth in the medium, cm.
    pub z: f64,
    /// Optical detuning seen by forward-propagating light, s⁻¹.
    pub detuning: f64,
    /// Share of the line's atoms represented by this one.
    pub weight: f64,
}

/// Finite sample of the medium: N atoms with depths and detunings.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedEnsemble {
    atoms: Vec<Atom>,
    alpha0: f64,
    length: f64,
    omega31: f64,
    omega32: f64,
    speed_of_light: f64,
}

impl DiscretizedEnsemble {
    /// Equal-probability detuning bins of the profile truncated at
    /// ±`truncation`·Δ_n (bin midpoints through the inverse CDF), paired with
    /// depths from the Kronecker sequence frac(j(√2 − 1) + ½)·L so that
    /// neighbouring detunings land far apart in z.
    pub fn stratified(m: &Medium, count: usize, truncation: f64) -> Result<Self> {
        if count == 0 {
            return Err(invalid("count", "need at least one atom"));
        }
        let truncation = require_positive("truncation", truncation)?;
        let profile = m.profile();
        let lo = profile.cdf(-truncation * profile.width());
        let hi = profile.cdf(truncation * profile.width());
        let weight = (hi - lo) / count as f64;
        let step = std::f64::consts::SQRT_2 - 1.0;
        let atoms = (0..count)
            .map(|j| {
                let p = lo + (j as f64 + 0.5) * weight;
                let z = ((j as f64) * step + 0.5).fract() * m.length();
                Atom {
                    z,
                    detuning: profile.inverse_cdf(p),
                    weight,
                }
            })
            .collect();
        Self::from_atoms(m, atoms)
    }

    pub fn from_atoms(m: &Medium, atoms: Vec<Atom>) -> Result<Self> {
        for (j, a) in atoms.iter().enumerate() {
            if !(a.z >= 0.0 && a.z <= m.length()) {
                return Err(invalid("atoms", format!("atom {j} at z = {} is outside the medium", a.z)));
            }
            if !(a.weight >= 0.0 && a.weight.is_finite() && a.detuning.is_finite()) {
                return Err(invalid("atoms", format!("atom {j} has invalid weight or detuning")));
            }
        }
        Ok(Self {
            atoms,
            alpha0: m.alpha0(),
            length: m.length(),
            omega31: m.omega31(),
            omega32: m.omega32(),
            speed_of_light: m.speed_of_light(),
        })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn omega31(&self) -> f64 {
        self.omega31
    }

    pub fn detuning_ratio(&self) -> f64 {
        self.omega32 / self.omega31
    }

    pub fn speed_of_light(&self) -> f64 {
        self.speed_of_light
    }

    /// Per-atom coupling g_j² = α₀·c·L·w_j/(2π), which turns the sum over
    /// atoms into the continuum absorption α⁺ = α₀K.
    pub fn coupling_squared(&self, atom: &Atom) -> f64 {
        self.alpha0 * self.speed_of_light * self.length * atom.weight / (2.0 * PI)
    }

    /// Copy with every coupling switched off.
    pub fn decoupled(&self) -> Self {
        Self {
            alpha0: 0.0,
            ..self.clone()
        }
    }
}

/// Discrete field modes ω31 + u_k together with their amplitudes at `time`.
///
/// Amplitudes are normalized so that Σ|A_k|² is the photon probability; the
/// continuum spectrum is A_k/√du.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    grid: FrequencyGrid,
    direction: Direction,
    time: f64,
    amplitudes: Vec<Complex64>,
}

impl ModeGrid {
    pub fn empty(grid: FrequencyGrid, direction: Direction, time: f64) -> Self {
        Self {
            grid,
            direction,
            time,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Forward modes holding `photon` at t = 0, placed so that the leading
    /// edge of its causal envelope reaches z = 0 at `entry_time`.
    pub fn from_photon(photon: &PhotonState, entry_time: f64) -> Self {
        let grid = *photon.grid();
        let root = grid.step().sqrt();
        let amplitudes = grid
            .points()
            .zip(photon.spectrum().values())
            .map(|(u, f)| f * root * Complex64::from_polar(1.0, u * entry_time))
            .collect();
        Self {
            grid,
            direction: Direction::Forward,
            time: 0.0,
            amplitudes,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Σ_k |A_k|².
    pub fn probability(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Scaled copy; the equations are linear in the field.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
            ..self.clone()
        }
    }

    /// Spectrum with the free propagation since `reference` removed:
    /// A_k(t)·e^{iu_k(t − reference)}/√du.
    pub fn spectrum_since(&self, reference: f64) -> Result<SpectralFunction> {
        let root = self.grid.step().sqrt();
        let dt = self.time - reference;
        let values = self
            .grid
            .points()
            .zip(&self.amplitudes)
            .map(|(u, a)| a * Complex64::from_polar(1.0 / root, u * dt))
            .collect();
        SpectralFunction::new(self.grid, values)
    }

    pub(crate) fn set(&mut self, time: f64, amplitudes: Vec<Complex64>) {
        debug_assert_eq!(amplitudes.len(), self.grid.len());
        self.time = time;
        self.amplitudes = amplitudes;
    }
}
