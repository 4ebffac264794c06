//! Sech control pulses on the |2⟩–|3⟩ transition.
//!
//! A pulse Ω(t) = Ω₀ sech((t − t_m)/T) of area θ = πΩ₀T acting on an atom
//! whose control transition is detuned by δ leaves the optical coherence
//! multiplied by r = ₂F₁(θ/2π, −θ/2π; ½ + iδT/2; 1) and moves the amplitude
//! sin(θ/2)/cosh(πδT/2) into the spin coherence (Rosen–Zener solution).

use num_complex::Complex64;

use crate::error::{invalid, require_non_negative, require_positive, Result};
use crate::mapping::{atomic_amplitude, Medium, PhotonState};
use crate::numerics::gauss_2f1_at_unity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

impl Direction {
    /// +1 along the photon, −1 against it.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPulse {
    area: f64,
    duration: f64,
    time: f64,
    carrier: f64,
    direction: Direction,
    phase: f64,
}

impl ControlPulse {
    /// Pulse of area `area` (rad) and sech duration `duration` (s), centered on
    /// the entrance face z = 0 at `time`, with carrier ω_m = `carrier`.
    pub fn new(area: f64, duration: f64, time: f64, carrier: f64) -> Result<Self> {
        if !time.is_finite() {
            return Err(invalid("time", format!("must be finite, got {time}")));
        }
        Ok(Self {
            area: require_non_negative("area", area)?,
            duration: require_positive("duration", duration)?,
            time,
            carrier: require_positive("carrier", carrier)?,
            direction: Direction::Forward,
            phase: 0.0,
        })
    }

    /// Pulse resonant with the control transition: carrier ω32.
    pub fn resonant(m: &Medium, area: f64, duration: f64, time: f64) -> Result<Self> {
        Self::new(area, duration, time, m.omega32())
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn backward(self) -> Self {
        self.with_direction(Direction::Backward)
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_area(mut self, area: f64) -> Result<Self> {
        self.area = require_non_negative("area", area)?;
        Ok(self)
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Peak Rabi frequency Ω₀ = θ/(πT).
    pub fn peak_rabi(&self) -> f64 {
        self.area / (std::f64::consts::PI * self.duration)
    }

    /// Ω(s) at time `s` relative to the pulse center.
    pub fn rabi(&self, s: f64) -> f64 {
        self.peak_rabi() / (s / self.duration).cosh()
    }
}

/// Duration making the sech filter flat over `half_span` of optical detuning:
/// 2/(πT) = 10·half_span·ω32/ω31.
pub fn flat_filter_duration(m: &Medium, half_span: f64) -> Result<f64> {
    let half_span = require_positive("half_span", half_span)?;
    Ok(2.0 / (std::f64::consts::PI * 10.0 * half_span * m.detuning_ratio()))
}

/// Control-transition detuning δ = (ω32/ω31)·Δ of the atom class Δ.
pub fn control_detuning(m: &Medium, detuning: f64) -> f64 {
    m.detuning_ratio() * detuning
}

/// Factor left on the optical coherence by the pulse.
pub fn residual_factor(pulse: &ControlPulse, delta: f64) -> Result<Complex64> {
    let a = pulse.area / (2.0 * std::f64::consts::PI);
    let c = Complex64::new(0.5, 0.5 * delta * pulse.duration);
    gauss_2f1_at_unity(Complex64::new(a, 0.0), Complex64::new(-a, 0.0), c)
}

/// sin(θ/2)/cosh(πδT/2): the spectral filter on the transferred amplitude.
pub fn transfer_factor(pulse: &ControlPulse, delta: f64) -> f64 {
    (0.5 * pulse.area).sin() / (0.5 * std::f64::consts::PI * delta * pulse.duration).cosh()
}

/// Phase bookkeeping for the pulse pair.
///
/// For an atom at depth z with optical detuning Δ, pulse m arrives at
/// t_c = t_m + n_m z/c and imprints ψ_m = n_m k_m z + φ_m + ν_m t_c with
/// k_m = ω_m/c and ν_m = n_m(ω32/ω31)Δ. An ideal transfer maps the optical
/// amplitude B to i·B·e^{−iψ₁} and back to i·X·e^{iψ₂}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoragePhase {
    first: ControlPulse,
    second: ControlPulse,
    ratio: f64,
    speed_of_light: f64,
}

impl StoragePhase {
    pub fn new(m: &Medium, first: ControlPulse, second: ControlPulse) -> Self {
        Self {
            first,
            second,
            ratio: m.detuning_ratio(),
            speed_of_light: m.speed_of_light(),
        }
    }

    pub fn pulse_phase(&self, pulse: &ControlPulse, detuning: f64, z: f64) -> f64 {
        let n = pulse.direction.sign();
        let c = self.speed_of_light;
        let arrival = pulse.time + n * z / c;
        spatial_phase(n * pulse.carrier / c, z) + pulse.phase + n * self.ratio * detuning * arrival
    }

    /// ψ₁, the phase written by the first pulse (enters the spin wave).
    pub fn mu1(&self, detuning: f64, z: f64) -> f64 {
        self.pulse_phase(&self.first, detuning, z)
    }

    /// Ψ = ψ₂ − ψ₁, the phase accumulated between the two transfers.
    pub fn psi(&self, detuning: f64, z: f64) -> f64 {
        self.pulse_phase(&self.second, detuning, z) - self.mu1(detuning, z)
    }

    /// φ_se = ω₁t₁ − ω₂t₂ + φ₂₁ with φ₂₁ = φ₂ − φ₁, reduced mod 2π.
    pub fn phi_se(&self) -> f64 {
        let (a, b) = (&self.first, &self.second);
        let raw = (a.carrier * a.time).rem_euclid(std::f64::consts::TAU)
            - (b.carrier * b.time).rem_euclid(std::f64::consts::TAU)
            + (b.phase - a.phase);
        raw.rem_euclid(std::f64::consts::TAU)
    }
}

/// k·z reduced mod 2π before use; optical phases run to ~1e6 rad per cm.
pub(crate) fn spatial_phase(k: f64, z: f64) -> f64 {
    (k * z).rem_euclid(std::f64::consts::TAU)
}

/// Spin-wave amplitude ξ(Δ, z) = i·β(Δ, z)·t(δ)·e^{−iψ₁} left by the first pulse.
pub fn spin_wave(
    m: &Medium,
    p: &PhotonState,
    pulse1: &ControlPulse,
    detuning: f64,
    z: f64,
) -> Result<Complex64> {
    let beta = atomic_amplitude(m, p, detuning, z)?;
    let t = transfer_factor(pulse1, control_detuning(m, detuning));
    let phases = StoragePhase::new(m, *pulse1, *pulse1);
    let mu = phases.mu1(detuning, z);
    Ok(Complex64::i() * beta * t * Complex64::from_polar(1.0, -mu))
}

/// Survival of the stored spin coherence over `duration`. The model has no
/// relaxation on |2⟩, so this is 1; kept as the place to add decoherence.
pub fn storage_survival(duration: f64) -> Result<f64> {
    require_non_negative("duration", duration)?;
    Ok(1.0)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::numerics::{lorentzian_profile, FrequencyGrid};

    fn pulse(area: f64) -> ControlPulse {
        ControlPulse::new(area, 1e-12, 0.0, 3.19e15).unwrap()
    }

    #[test]
    fn residual_factor_limits() {
        let r0 = residual_factor(&pulse(0.0), 1e11).unwrap();
        assert!((r0 - 1.0).norm() < 1e-14);
        assert_eq!(residual_factor(&pulse(PI), 0.0).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn transfer_factor_values() {
        assert!((transfer_factor(&pulse(PI), 0.0) - 1.0).abs() < 1e-15);
        assert!(transfer_factor(&pulse(2.0 * PI), 3e11).abs() < 1e-15);
        let p = pulse(PI);
        let d = 2.0 / (PI * p.duration());
        assert!((transfer_factor(&p, d) - 1.0 / 1f64.cosh()).abs() < 1e-12);
        assert!((1.0 / 1f64.cosh() - 0.6481).abs() < 1e-4);
    }

    #[test]
    fn split_is_unitary() {
        for area in [0.3, PI / 2.0, PI, 1.7 * PI, 2.0 * PI] {
            for dt in [0.0, 0.5, 1.0, 3.0, -2.0] {
                let p = pulse(area);
                let d = dt / p.duration();
                let r = residual_factor(&p, d).unwrap();
                let t = transfer_factor(&p, d);
                assert!((r.norm_sqr() + t * t - 1.0).abs() < 1e-9, "θ={area} δT={dt}");
            }
        }
    }

    #[test]
    fn flat_filter_default() {
        let m = Medium::new(lorentzian_profile(1e9).unwrap(), 1.0, 1.0, 1e10).unwrap();
        let t = flat_filter_duration(&m, 2.5e10).unwrap();
        let p = ControlPulse::resonant(&m, PI, t, 0.0).unwrap();
        let edge = transfer_factor(&p, control_detuning(&m, 2.5e10));
        assert!(edge > 0.98, "{edge}");
    }

    #[test]
    fn spin_wave_scales_atomic_amplitude() {
        let m = Medium::new(lorentzian_profile(1e9).unwrap(), 1.0, 2.0, 1e10).unwrap();
        let grid = FrequencyGrid::symmetric(2.5e10, 1025).unwrap();
        let p = PhotonState::lorentzian(2e8, grid).unwrap();
        let beta = atomic_amplitude(&m, &p, 0.0, 0.0).unwrap().norm();
        let full = ControlPulse::resonant(&m, PI, 1e-12, 5e-9).unwrap();
        let xi = spin_wave(&m, &p, &full, 0.0, 0.0).unwrap().norm();
        assert!((xi - beta).abs() < 1e-12 * beta);
        let half = full.with_area(PI / 2.0).unwrap();
        let xi = spin_wave(&m, &p, &half, 0.0, 0.0).unwrap().norm();
        assert!((xi / beta - (PI / 4.0).sin()).abs() < 1e-12);
        let later = full.with_time(3e-6).with_phase(1.2);
        for (d, z) in [(3e8, 0.7), (-1e9, 1.9)] {
            let a = spin_wave(&m, &p, &full, d, z).unwrap().norm();
            let b = spin_wave(&m, &p, &later, d, z).unwrap().norm();
            assert!((a - b).abs() <= 4.0 * f64::EPSILON * a);
        }
    }

    #[test]
    fn storage_is_lossless() {
        for d in [0.0, 1e-9, 1e-3] {
            assert_eq!(storage_survival(d).unwrap(), 1.0);
        }
        assert!(storage_survival(-1.0).is_err());
    }
}
