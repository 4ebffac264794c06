//! Backward retrieval: the echo spectrum at the entrance face.
//!
//! After the second (counter-propagating) pulse the spin wave is mapped back
//! onto the optical coherence with reversed phase, and the medium emits a
//! backward photon whose amplitude at detuning u is governed by the input
//! amplitude at the mirrored detuning x = ω31 − ω'_ph − u:
//!
//! F(u) = t₁(x)t₂(x) · 1/(1 − iω21/(πcα₀G(x))) · f(x) · {1 − e^{i2ω21L/c − α⁺(x)L}} · e^{iΦ}
//!
//! with t_m the sech transfer factors. The bracket describes re-absorption of
//! the echo on its way out; the middle factor is the distortion caused by
//! the ω21 phase mismatch between the forward and backward waves.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::control::{
    control_detuning, residual_factor, spin_wave, transfer_factor, ControlPulse, Direction,
};
use crate::error::{invalid, require_positive, Error, Result};
use crate::mapping::{absorbed_density, absorption_coefficient, transmit, Medium, PhotonState};
use crate::numerics::{FrequencyGrid, SpectralFunction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolSchedule {
    t1: f64,
    t2: f64,
    tau: f64,
    echo_carrier_offset: f64,
    phi21: f64,
    phase_bar: f64,
}

impl ProtocolSchedule {
    /// Pulses at `t1` < `t2`; the photon precedes the first pulse by `tau`.
    pub fn new(t1: f64, t2: f64, tau: f64) -> Result<Self> {
        require_positive("t1", t1)?;
        require_positive("tau", tau)?;
        if !(t2.is_finite() && t2 > t1) {
            return Err(invalid("t2", format!("must exceed t1 = {t1:e}, got {t2:e}")));
        }
        Ok(Self {
            t1,
            t2,
            tau,
            echo_carrier_offset: 0.0,
            phi21: 0.0,
            phase_bar: 0.0,
        })
    }

    /// Echo carrier ω'_ph = ω31 + `offset`.
    pub fn with_echo_carrier_offset(mut self, offset: f64) -> Self {
        self.echo_carrier_offset = offset;
        self
    }

    /// φ₂₁ = φ₂ − φ₁.
    pub fn with_phi21(mut self, phi21: f64) -> Self {
        self.phi21 = phi21;
        self
    }

    /// The global detuning Δ̄ multiplying (t1 + t2) in the output phase.
    pub fn with_phase_bar(mut self, phase_bar: f64) -> Self {
        self.phase_bar = phase_bar;
        self
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn storage_time(&self) -> f64 {
        self.t2 - self.t1
    }

    pub fn echo_carrier_offset(&self) -> f64 {
        self.echo_carrier_offset
    }

    pub fn phi21(&self) -> f64 {
        self.phi21
    }

    /// Forward first pulse and backward second pulse, both on ω32, with the
    /// schedule's times and phases φ₁ = 0, φ₂ = φ₂₁.
    pub fn pulses(&self, m: &Medium, area: f64, duration: f64) -> Result<(ControlPulse, ControlPulse)> {
        let first = ControlPulse::resonant(m, area, duration, self.t1)?;
        let second = ControlPulse::resonant(m, area, duration, self.t2)?
            .backward()
            .with_phase(self.phi21);
        Ok((first, second))
    }

    /// Φ for output detuning u: (ω − ω31)(ω32/ω31)(t1 + t2) + φ₂₁ + Δ̄(t1 + t2).
    fn output_phase(&self, ratio: f64, u: f64) -> f64 {
        let sum = self.t1 + self.t2;
        let linear = ((u + self.echo_carrier_offset) * ratio * sum).rem_euclid(std::f64::consts::TAU);
        linear + self.phi21 + (self.phase_bar * sum).rem_euclid(std::f64::consts::TAU)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EchoResult {
    pub spectrum: SpectralFunction,
    pub total_probability: f64,
    /// |F(u)|²/|f(x(u))|² per grid point; 0 where the input vanishes.
    pub ratio_curve: Vec<f64>,
    /// |f(x(u))|², the mirrored input intensity used for `ratio_curve`.
    mirrored_intensity: Vec<f64>,
}

impl EchoResult {
    fn new(spectrum: SpectralFunction, mirrored_intensity: Vec<f64>) -> Self {
        let ratio_curve = spectrum
            .values()
            .iter()
            .zip(&mirrored_intensity)
            .map(|(v, &m)| if m > 0.0 { v.norm_sqr() / m } else { 0.0 })
            .collect();
        Self {
            total_probability: spectrum.norm(),
            spectrum,
            ratio_curve,
            mirrored_intensity,
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.spectrum.grid()
    }

    fn center_index(&self) -> usize {
        let g = self.grid();
        let i = ((-g.start()) / g.step()).round();
        i.clamp(0.0, (g.len() - 1) as f64) as usize
    }

    /// ratio_curve at the grid point nearest u = 0.
    pub fn center_ratio(&self) -> f64 {
        self.ratio_curve[self.center_index()]
    }

    /// |F(u)|² divided by the mirrored input intensity at the line center.
    pub fn figure_curve(&self) -> Vec<f64> {
        let norm = self.mirrored_intensity[self.center_index()];
        self.spectrum
            .values()
            .iter()
            .map(|v| if norm > 0.0 { v.norm_sqr() / norm } else { 0.0 })
            .collect()
    }

    /// Largest ratio over the grid.
    pub fn peak_ratio(&self) -> f64 {
        self.ratio_curve.iter().copied().fold(0.0, f64::max)
    }

    /// max over u of |curve(u) − curve(−u)| on a symmetric grid.
    pub fn asymmetry(curve: &[f64]) -> f64 {
        let n = curve.len();
        (0..n / 2)
            .map(|i| (curve[i] - curve[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }
}

/// ω21/(πcα₀G(x)): ≪ 1 means the phase mismatch barely distorts detuning x.
pub fn distortion_ratio(m: &Medium, x: f64) -> f64 {
    let denom = PI * m.speed_of_light() * m.alpha0() * m.profile().density(x);
    m.omega21() / denom
}

fn check_pulses(m: &Medium, pulses: (&ControlPulse, &ControlPulse)) -> Result<()> {
    let (a, b) = pulses;
    if a.direction() != Direction::Forward || b.direction() != Direction::Backward {
        return Err(invalid(
            "pulses",
            "the closed form covers a forward first pulse and a backward second pulse",
        ));
    }
    for p in [a, b] {
        if (p.carrier() - m.omega32()).abs() > 1e-9 * m.omega32() {
            return Err(invalid("pulses", format!("carrier {:e} differs from omega32", p.carrier())));
        }
    }
    Ok(())
}

/// Echo spectral amplitude on the photon's grid, evaluated at z = 0.
///
/// With equal pulses the prefactor is sin²(θ/2)/cosh²(π(ω32/ω31)xT/2); for
/// unequal pulses the two transfer factors are multiplied.
pub fn echo_spectrum(
    m: &Medium,
    p: &PhotonState,
    pulses: (&ControlPulse, &ControlPulse),
    sched: &ProtocolSchedule,
) -> Result<EchoResult> {
    check_pulses(m, pulses)?;
    let (p1, p2) = pulses;
    let grid = *p.grid();
    let input = p.spectrum();
    let l = m.length();
    let mismatch = Complex64::new(0.0, 2.0 * m.omega21() * l / m.speed_of_light());
    let ratio = m.detuning_ratio();
    let mirror_exact = grid.is_symmetric() && sched.echo_carrier_offset == 0.0;
    let pic = PI * m.speed_of_light() * m.alpha0();

    let mut values = Vec::with_capacity(grid.len());
    let mut mirrored = Vec::with_capacity(grid.len());
    for (i, u) in grid.points().enumerate() {
        let x = -sched.echo_carrier_offset - u;
        let g = m.profile().density(x);
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::SingularProfile(x));
        }
        let f = if mirror_exact { input.mirrored_at(i) } else { input.sample(x) };
        let delta = control_detuning(m, x);
        let filter = transfer_factor(p1, delta) * transfer_factor(p2, delta);
        // 1/(1 − iω21/(πcα₀G)) written so that α₀ = 0 gives 0 rather than 0/0
        let distortion = Complex64::new(pic * g, 0.0) / Complex64::new(pic * g, -m.omega21());
        let reabsorb = 1.0 - (mismatch - absorption_coefficient(m, x) * l).exp();
        let phase = Complex64::from_polar(1.0, sched.output_phase(ratio, u));
        values.push(filter * distortion * f * reabsorb * phase);
        mirrored.push(f.norm_sqr());
    }
    Ok(EchoResult::new(SpectralFunction::new(grid, values)?, mirrored))
}

/// Complete reconstruction: f⁽²⁾(u) = e^{iΦ}·f(x), the input mirrored about ω31.
pub fn ideal_limit_spectrum(
    m: &Medium,
    p: &PhotonState,
    sched: &ProtocolSchedule,
) -> Result<SpectralFunction> {
    let grid = *p.grid();
    let input = p.spectrum();
    let ratio = m.detuning_ratio();
    let exact = grid.is_symmetric() && sched.echo_carrier_offset == 0.0;
    let values = grid
        .points()
        .enumerate()
        .map(|(i, u)| {
            let f = if exact {
                input.mirrored_at(i)
            } else {
                input.sample(-sched.echo_carrier_offset - u)
            };
            f * Complex64::from_polar(1.0, sched.output_phase(ratio, u))
        })
        .collect();
    SpectralFunction::new(grid, values)
}

/// Spin-wave amplitudes on (photon grid detuning) × (uniform depth samples).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinWaveMap {
    pub detunings: FrequencyGrid,
    pub depths: Vec<f64>,
    /// Row-major: `values[i * depths.len() + k]` is ξ(detuning i, depth k).
    pub values: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub transmitted: SpectralFunction,
    pub input_norm: f64,
    pub transmitted_norm: f64,
    pub absorbed: f64,
    /// Probability moved to the spin coherence by the first pulse.
    pub stored: f64,
    /// Probability left in the optical coherence after both pulses (b⁽¹⁾),
    /// which is excluded from retrieval.
    pub residual_coherence: f64,
    pub spin_wave_map: SpinWaveMap,
    pub echo: EchoResult,
}

const MAP_DEPTHS: usize = 17;

/// Mapping → storage → retrieval, with the intermediate norms.
pub fn run_protocol(
    m: &Medium,
    p: &PhotonState,
    pulses: (&ControlPulse, &ControlPulse),
    sched: &ProtocolSchedule,
) -> Result<ProtocolReport> {
    let (p1, p2) = pulses;
    let transmitted = transmit(m, p)?;
    let input_norm = p.spectrum().norm();
    let transmitted_norm = transmitted.norm();

    let grid = *p.grid();
    let mut stored = Vec::with_capacity(grid.len());
    let mut residual = Vec::with_capacity(grid.len());
    for (u, &f) in grid.points().zip(p.spectrum().values()) {
        let absorbed = absorbed_density(m, u, f);
        let delta = control_detuning(m, u);
        let t = transfer_factor(p1, delta);
        let r = residual_factor(p1, delta)?.norm_sqr() * residual_factor(p2, delta)?.norm_sqr();
        stored.push(Complex64::new(absorbed * t * t, 0.0));
        residual.push(Complex64::new(absorbed * r, 0.0));
    }
    let stored = SpectralFunction::new(grid, stored)?.integrate().re;
    let residual_coherence = SpectralFunction::new(grid, residual)?.integrate().re;

    let depths: Vec<f64> = (0..MAP_DEPTHS)
        .map(|k| m.length() * k as f64 / (MAP_DEPTHS - 1) as f64)
        .collect();
    let mut map = Vec::with_capacity(grid.len() * depths.len());
    for d in grid.points() {
        for &z in &depths {
            map.push(spin_wave(m, p, p1, d, z)?);
        }
    }

    Ok(ProtocolReport {
        transmitted,
        input_norm,
        transmitted_norm,
        absorbed: (input_norm - transmitted_norm).clamp(0.0, 1.0),
        stored,
        residual_coherence,
        spin_wave_map: SpinWaveMap {
            detunings: grid,
            depths,
            values: map,
        },
        echo: echo_spectrum(m, p, pulses, sched)?,
    })
}
