use num_complex::Complex64;

use super::coupled::{run_coupled, TrajectoryRow};
use super::ensemble::{DiscretizedEnsemble, ModeGrid};
use super::integrator::{ComplexSystem, Dopri5, Stats, Tolerances};
use crate::control::{ControlPulse, Direction};
use crate::error::{invalid, require_positive, Result};
use crate::numerics::SpectralFunction;

/// Norm samples taken per coupled-stage run.
pub const TRAJECTORY_SAMPLES: usize = 200;

/// Tolerances used for the coupled field–atom stages.
pub fn coupled_tolerances() -> Tolerances {
    Tolerances {
        rtol: 1e-9,
        atol: 1e-12,
        ..Tolerances::default()
    }
}

/// Tolerances used for single-atom pulse integrations.
pub fn pulse_tolerances() -> Tolerances {
    Tolerances {
        rtol: 1e-12,
        atol: 1e-15,
        ..Tolerances::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionOutcome {
    /// Field modes at `t_end` (lab amplitudes in the ω31 frame).
    pub modes: ModeGrid,
    /// Atomic amplitudes β_j at `t_end`.
    pub atoms: Vec<Complex64>,
    pub trajectory: Vec<TrajectoryRow>,
    pub stats: Stats,
}

impl AbsorptionOutcome {
    pub fn initial_norm(&self) -> f64 {
        self.trajectory[0].total()
    }

    /// Largest |norm(t) − norm(0)| over the sampled trajectory.
    pub fn norm_drift(&self) -> f64 {
        norm_drift(&self.trajectory)
    }

    /// Σ_j |β_j|² at the end of the run.
    pub fn atomic_excitation(&self) -> f64 {
        self.atoms.iter().map(|b| b.norm_sqr()).sum()
    }

    /// Transmitted spectrum, comparable with the closed-form transmission of
    /// a photon that entered at `entry_time`.
    pub fn transmitted(&self, entry_time: f64) -> Result<SpectralFunction> {
        self.modes.spectrum_since(entry_time)
    }
}

fn norm_drift(trajectory: &[TrajectoryRow]) -> f64 {
    let n0 = trajectory[0].total();
    trajectory
        .iter()
        .map(|r| (r.total() - n0).abs())
        .fold(0.0, f64::max)
}

/// Forward modes interacting with the atoms from `modes.time()` to `t_end`;
/// atoms start in the ground state.
pub fn integrate_absorption(
    ens: &DiscretizedEnsemble,
    modes: &ModeGrid,
    t_end: f64,
) -> Result<AbsorptionOutcome> {
    integrate_absorption_with(ens, modes, t_end, coupled_tolerances())
}

pub fn integrate_absorption_with(
    ens: &DiscretizedEnsemble,
    modes: &ModeGrid,
    t_end: f64,
    tol: Tolerances,
) -> Result<AbsorptionOutcome> {
    if modes.direction() != Direction::Forward {
        return Err(invalid("modes", "absorption runs on the forward manifold"));
    }
    check_interval(modes.time(), t_end)?;
    let ground = vec![Complex64::new(0.0, 0.0); ens.len()];
    let run = run_coupled(ens, modes, &ground, modes.time(), t_end, TRAJECTORY_SAMPLES, tol)?;
    let mut out = modes.clone();
    out.set(t_end, run.field);
    Ok(AbsorptionOutcome {
        modes: out,
        atoms: run.atoms,
        trajectory: run.trajectory,
        stats: run.stats,
    })
}

fn check_interval(t0: f64, t1: f64) -> Result<()> {
    if !(t1.is_finite() && t1 > t0) {
        return Err(invalid("t_end", format!("must exceed the start time {t0:e}, got {t1:e}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseOutcome {
    /// Optical coherence after the pulse.
    pub b: Complex64,
    /// Spin coherence after the pulse.
    pub xi: Complex64,
    pub stats: Stats,
}

/// Two-level dynamics under one sech pulse, in the pulse's own frame:
///
///   χ' = (i/2)Ω(s) ζ e^{−iδs},  ζ' = (i/2)Ω(s) χ e^{iδs},
///
/// integrated over s ∈ [−`half_window`, `half_window`] around the pulse
/// center. For b_init = 1, ξ_init = 0 the magnitudes approach
/// |₂F₁(θ/2π, −θ/2π; ½ + iδT/2; 1)| and sin(θ/2)/cosh(πδT/2).
pub fn integrate_pulse(
    b_init: Complex64,
    xi_init: Complex64,
    pulse: &ControlPulse,
    delta: f64,
    half_window: f64,
) -> Result<PulseOutcome> {
    integrate_pulse_with(b_init, xi_init, pulse, delta, half_window, pulse_tolerances())
}

pub fn integrate_pulse_with(
    b_init: Complex64,
    xi_init: Complex64,
    pulse: &ControlPulse,
    delta: f64,
    half_window: f64,
    tol: Tolerances,
) -> Result<PulseOutcome> {
    let half_window = require_positive("half_window", half_window)?;
    let mut y = [b_init, xi_init];
    if pulse.area() == 0.0 {
        return Ok(PulseOutcome {
            b: y[0],
            xi: y[1],
            stats: Stats::default(),
        });
    }
    let mut sys = SechPulse {
        peak: pulse.peak_rabi(),
        duration: pulse.duration(),
        delta,
    };
    let tol = Tolerances {
        first_step: if tol.first_step > 0.0 { tol.first_step } else { 0.05 * pulse.duration() },
        ..tol
    };
    let stats = Dopri5::new(tol).integrate(&mut sys, -half_window, half_window, &mut y)?;
    Ok(PulseOutcome {
        b: y[0],
        xi: y[1],
        stats,
    })
}

struct SechPulse {
    peak: f64,
    duration: f64,
    delta: f64,
}

impl ComplexSystem for SechPulse {
    fn dim(&self) -> usize {
        2
    }

    fn derivative(&mut self, s: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let half = 0.5 * self.peak / (s / self.duration).cosh();
        let rot = Complex64::from_polar(half, self.delta * s);
        dy[0] = Complex64::i() * rot.conj() * y[1];
        dy[1] = Complex64::i() * rot * y[0];
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalOutcome {
    /// Backward modes at the end of the run.
    pub modes: ModeGrid,
    pub atoms: Vec<Complex64>,
    pub trajectory: Vec<TrajectoryRow>,
    pub stats: Stats,
}

impl RetrievalOutcome {
    pub fn norm_drift(&self) -> f64 {
        norm_drift(&self.trajectory)
    }

    /// Emitted probability Σ_k |A_k|².
    pub fn emitted(&self) -> f64 {
        self.modes.probability()
    }

    /// Midpoint of the sampling interval with the largest emission rate.
    pub fn peak_emission_time(&self) -> f64 {
        let mut best = (f64::NEG_INFINITY, self.trajectory[0].time);
        for w in self.trajectory.windows(2) {
            let rate = (w[1].field - w[0].field) / (w[1].time - w[0].time);
            if rate > best.0 {
                best = (rate, 0.5 * (w[0].time + w[1].time));
            }
        }
        best.1
    }
}

/// Emission into initially empty backward modes from atomic coherences
/// `b_init` (lab amplitudes at `modes.time()`), up to `t_end`.
///
/// A counter-propagating wave sees the Doppler shift reversed, so the atoms
/// enter with detuning −Δ_j.
pub fn integrate_retrieval(
    ens: &DiscretizedEnsemble,
    modes: &ModeGrid,
    b_init: &[Complex64],
    t_end: f64,
) -> Result<RetrievalOutcome> {
    integrate_retrieval_with(ens, modes, b_init, t_end, coupled_tolerances())
}

pub fn integrate_retrieval_with(
    ens: &DiscretizedEnsemble,
    modes: &ModeGrid,
    b_init: &[Complex64],
    t_end: f64,
    tol: Tolerances,
) -> Result<RetrievalOutcome> {
    if modes.direction() != Direction::Backward {
        return Err(invalid("modes", "retrieval runs on the backward manifold"));
    }
    if b_init.len() != ens.len() {
        return Err(invalid(
            "b_init",
            format!("{} amplitudes for {} atoms", b_init.len(), ens.len()),
        ));
    }
    check_interval(modes.time(), t_end)?;
    let run = run_coupled(ens, modes, b_init, modes.time(), t_end, TRAJECTORY_SAMPLES, tol)?;
    let mut out = modes.clone();
    out.set(t_end, run.field);
    Ok(RetrievalOutcome {
        modes: out,
        atoms: run.atoms,
        trajectory: run.trajectory,
        stats: run.stats,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::control::{residual_factor, transfer_factor};
    use crate::mapping::{Medium, PhotonState};
    use crate::numerics::{lorentzian_profile, FrequencyGrid};

    fn pulse(area: f64) -> ControlPulse {
        ControlPulse::new(area, 1e-11, 0.0, 3.19e15).unwrap()
    }

    #[test]
    fn pi_pulse_transfers_everything_on_resonance() {
        let p = pulse(PI);
        let out = integrate_pulse(1.0.into(), 0.0.into(), &p, 0.0, 40.0 * p.duration()).unwrap();
        assert!(out.b.norm() < 1e-6);
        assert!((out.xi.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn matches_rosen_zener_closed_form() {
        for area in [PI / 2.0, PI, 2.0 * PI] {
            for dt in [0.0, 1.0, 3.0] {
                let p = pulse(area);
                let d = dt / p.duration();
                let out = integrate_pulse(1.0.into(), 0.0.into(), &p, d, 40.0 * p.duration()).unwrap();
                let r = residual_factor(&p, d).unwrap().norm();
                let t = transfer_factor(&p, d).abs();
                assert!((out.b.norm() - r).abs() < 1e-6, "θ={area} δT={dt}");
                assert!((out.xi.norm() - t).abs() < 1e-6, "θ={area} δT={dt}");
                let total = out.b.norm_sqr() + out.xi.norm_sqr();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn decoupled_photon_propagates_freely() {
        let m = Medium::new(lorentzian_profile(1e9).unwrap(), 0.1, 10.0, 1e9).unwrap();
        let ens = DiscretizedEnsemble::stratified(&m, 50, 40.0).unwrap().decoupled();
        let grid = FrequencyGrid::symmetric(2.5e10, 128).unwrap();
        let photon = PhotonState::lorentzian(1e9, grid).unwrap();
        let modes = ModeGrid::from_photon(&photon, 2e-9);
        let out = integrate_absorption(&ens, &modes, 5e-9).unwrap();
        assert!(out.atoms.iter().all(|b| b.norm() == 0.0));
        let back = out.transmitted(2e-9).unwrap();
        for (a, b) in back.values().iter().zip(photon.spectrum().values()) {
            assert!((a - b).norm() < 1e-12 * b.norm());
        }
    }

    #[test]
    fn empty_atoms_emit_nothing() {
        let m = Medium::new(lorentzian_profile(1e9).unwrap(), 0.1, 10.0, 1e9).unwrap();
        let ens = DiscretizedEnsemble::stratified(&m, 40, 40.0).unwrap();
        let grid = FrequencyGrid::symmetric(1e10, 64).unwrap();
        let modes = ModeGrid::empty(grid, Direction::Backward, 0.0);
        let zero = vec![Complex64::new(0.0, 0.0); 40];
        let out = integrate_retrieval(&ens, &modes, &zero, 1e-8).unwrap();
        assert_eq!(out.emitted(), 0.0);
        let fwd = ModeGrid::empty(grid, Direction::Forward, 0.0);
        assert!(integrate_retrieval(&ens, &fwd, &zero, 1e-8).is_err());
        assert!(integrate_retrieval(&ens, &modes, &zero[..3], 1e-8).is_err());
    }
}
