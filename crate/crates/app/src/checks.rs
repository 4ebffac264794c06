//! Closed forms against the brute-force integrators, at fixed small scale.

use std::f64::consts::PI;
use std::fmt;

use echomem::control::{residual_factor, transfer_factor, ControlPulse, Direction};
use echomem::echo::{echo_spectrum, ProtocolSchedule};
use echomem::mapping::{transmit, Medium};
use echomem::numerics::lorentzian_profile;
use echomem::oracle::{
    complex_rms, integrate_absorption_with, integrate_pulse, magnitude_rms, run_protocol_oracle,
    AbsorptionOutcome, DiscretizedEnsemble, ModeGrid, OracleConfig, OracleReport, PULSE_WINDOW,
};

pub const PULSE_TOLERANCE: f64 = 1e-6;
pub const UNITARITY_TOLERANCE: f64 = 1e-9;
pub const ABSORPTION_RMS: f64 = 0.02;
pub const NORM_TOLERANCE: f64 = 1e-8;
pub const RETRIEVAL_RMS: f64 = 0.05;
pub const FORWARD_FRACTION: f64 = 0.1;
pub const DELAY_TOLERANCE: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Pulse,
    Absorption,
    Retrieval,
}

impl Stage {
    pub const ALL: [Stage; 3] = [Stage::Pulse, Stage::Absorption, Stage::Retrieval];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Pulse => "pulse",
            Stage::Absorption => "absorption",
            Stage::Retrieval => "retrieval",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsePoint {
    pub area: f64,
    pub delta_t: f64,
    pub residual_error: f64,
    pub transfer_error: f64,
    pub unitarity_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseCheck {
    pub points: Vec<PulsePoint>,
}

impl PulseCheck {
    pub fn max_factor_error(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.residual_error.max(p.transfer_error))
            .fold(0.0, f64::max)
    }

    pub fn max_unitarity_error(&self) -> f64 {
        self.points.iter().map(|p| p.unitarity_error).fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_factor_error() <= PULSE_TOLERANCE && self.max_unitarity_error() <= UNITARITY_TOLERANCE
    }
}

impl fmt::Display for PulseCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.points {
            writeln!(
                f,
                "  theta={:.4} dT={:.1}  |r| err {:.2e}  |t| err {:.2e}  unitarity {:.2e}",
                p.area, p.delta_t, p.residual_error, p.transfer_error, p.unitarity_error
            )?;
        }
        write!(
            f,
            "  max factor error {:.2e} (tol {PULSE_TOLERANCE:e}), max unitarity error {:.2e} (tol {UNITARITY_TOLERANCE:e})",
            self.max_factor_error(),
            self.max_unitarity_error()
        )
    }
}

/// Sech-pulse integrations over θ ∈ {π/2, π, 2π} × δT ∈ {0, 1, 3}.
pub fn check_pulse() -> echomem::Result<PulseCheck> {
    let mut points = Vec::new();
    for area in [PI / 2.0, PI, 2.0 * PI] {
        for delta_t in [0.0, 1.0, 3.0] {
            let pulse = ControlPulse::new(area, 1e-11, 0.0, 3.19e15)?;
            let delta = delta_t / pulse.duration();
            let out = integrate_pulse(
                1.0.into(),
                0.0.into(),
                &pulse,
                delta,
                PULSE_WINDOW * pulse.duration(),
            )?;
            let r = residual_factor(&pulse, delta)?.norm();
            let t = transfer_factor(&pulse, delta).abs();
            points.push(PulsePoint {
                area,
                delta_t,
                residual_error: (out.b.norm() - r).abs(),
                transfer_error: (out.xi.norm() - t).abs(),
                unitarity_error: (r * r + t * t - 1.0)
                    .abs()
                    .max((out.b.norm_sqr() + out.xi.norm_sqr() - 1.0).abs()),
            });
        }
    }
    Ok(PulseCheck { points })
}

/// 400 stratified atoms, 512 modes, αL = 1, δω_ph = Δ_n.
pub fn absorption_config() -> OracleConfig {
    let m = Medium::new(lorentzian_profile(1e9).expect("positive width"), 0.1, 10.0, 1e9)
        .expect("valid medium");
    OracleConfig::new(m, 1e9)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionCheck {
    pub rms: f64,
    pub norm_drift: f64,
    pub outcome: AbsorptionOutcome,
}

impl AbsorptionCheck {
    pub fn passed(&self) -> bool {
        self.rms <= ABSORPTION_RMS && self.norm_drift <= NORM_TOLERANCE
    }
}

impl fmt::Display for AbsorptionCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "  transmitted spectrum RMS {:.4} (tol {ABSORPTION_RMS}), norm drift {:.2e} (tol {NORM_TOLERANCE:e}), {} steps",
            self.rms, self.norm_drift, self.outcome.stats.accepted
        )
    }
}

pub fn check_absorption(cfg: &OracleConfig) -> echomem::Result<AbsorptionCheck> {
    let sched = cfg.schedule()?;
    let photon = cfg.photon()?;
    let ens = DiscretizedEnsemble::stratified(&cfg.medium, cfg.atoms, cfg.truncation)?;
    let modes = ModeGrid::from_photon(&photon, sched.entry);
    let outcome = integrate_absorption_with(&ens, &modes, sched.absorption_end, cfg.tolerances)?;
    let expected = transmit(&cfg.medium, &photon)?;
    let rms = complex_rms(&outcome.transmitted(sched.entry)?, &expected)?;
    Ok(AbsorptionCheck {
        rms,
        norm_drift: outcome.norm_drift(),
        outcome,
    })
}

/// Optically thick (αL = 8), small ω21, narrow photon: retrieval close to
/// the ideal limit, with a mode grid coarse enough to integrate quickly.
pub fn retrieval_config() -> OracleConfig {
    let m = Medium::new(lorentzian_profile(1e9).expect("positive width"), 0.08, 100.0, 1e8)
        .expect("valid medium");
    OracleConfig {
        atoms: 1200,
        modes: 256,
        truncation: 10.0,
        tail_widths: 6.0,
        ..OracleConfig::new(m, 1e8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalCheck {
    pub rms: f64,
    pub echo_probability: f64,
    pub closed_form_probability: f64,
    pub forward_probability: f64,
    /// Peak emission delay after the second pulse divided by τ.
    pub delay_ratio: f64,
    pub norm_drift: f64,
    pub backward: OracleReport,
}

impl RetrievalCheck {
    pub fn forward_fraction(&self) -> f64 {
        self.forward_probability / self.echo_probability
    }

    pub fn passed(&self) -> bool {
        self.rms <= RETRIEVAL_RMS
            && self.forward_fraction() < FORWARD_FRACTION
            && (self.delay_ratio - 1.0).abs() <= DELAY_TOLERANCE
            && self.norm_drift <= NORM_TOLERANCE
    }
}

impl fmt::Display for RetrievalCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "  echo magnitude RMS {:.4} (tol {RETRIEVAL_RMS}); echo probability {:.4} vs closed form {:.4}",
            self.rms, self.echo_probability, self.closed_form_probability
        )?;
        writeln!(
            f,
            "  forward-pulse control {:.4} of the backward echo (tol {FORWARD_FRACTION})",
            self.forward_fraction()
        )?;
        write!(
            f,
            "  peak emission at {:.3} tau after pulse 2 (tol ±{DELAY_TOLERANCE}), norm drift {:.2e}",
            self.delay_ratio, self.norm_drift
        )
    }
}

/// Full protocol with a backward second pulse, compared with the closed-form
/// echo, plus the same run with a forward second pulse.
pub fn check_retrieval(cfg: &OracleConfig) -> echomem::Result<RetrievalCheck> {
    let backward = run_protocol_oracle(&OracleConfig {
        second_direction: Direction::Backward,
        ..cfg.clone()
    })?;
    let s = backward.schedule;
    let sched = ProtocolSchedule::new(s.t1, s.t2, s.tau)?;
    let (p1, p2) = sched.pulses(&cfg.medium, cfg.areas.0, s.pulse_duration)?;
    let p2 = p2.with_area(cfg.areas.1)?;
    let closed = echo_spectrum(&cfg.medium, &backward.photon, (&p1, &p2), &sched)?;
    let forward = run_protocol_oracle(&OracleConfig {
        second_direction: Direction::Forward,
        ..cfg.clone()
    })?;
    Ok(RetrievalCheck {
        rms: magnitude_rms(&backward.echo, &closed.spectrum)?,
        echo_probability: backward.echo_probability,
        closed_form_probability: closed.total_probability,
        forward_probability: forward.echo_probability,
        delay_ratio: backward.peak_emission_delay() / s.tau,
        norm_drift: backward.norm_drift().max(forward.norm_drift()),
        backward,
    })
}
