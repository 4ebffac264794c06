use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use super::coupled::TrajectoryRow;
use super::ensemble::{DiscretizedEnsemble, ModeGrid};
use super::integrator::Tolerances;
use super::stages::{
    coupled_tolerances, integrate_absorption_with, integrate_pulse, integrate_retrieval_with,
    AbsorptionOutcome, RetrievalOutcome,
};
use crate::control::{flat_filter_duration, ControlPulse, Direction, StoragePhase};
use crate::error::{invalid, require_positive, Error, Result};
use crate::mapping::{Medium, PhotonState};
use crate::numerics::{FrequencyGrid, SpectralFunction};

/// Sech pulses are integrated over ±`PULSE_WINDOW`·T.
pub const PULSE_WINDOW: f64 = 40.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub medium: Medium,
    pub photon_width: f64,
    pub atoms: usize,
    pub modes: usize,
    /// Mode grid half span in units of the photon width.
    pub span_widths: f64,
    /// Detuning cut-off of the atom sample in line widths.
    pub truncation: f64,
    pub areas: (f64, f64),
    /// Sech duration; `None` picks the flat-filter default for the grid.
    pub pulse_duration: Option<f64>,
    pub second_direction: Direction,
    /// Time the photon's leading edge reaches z = 0; `None` → 2/Δ_n.
    pub entry_time: Option<f64>,
    /// Absorption runs until entry + L/c + `tail_widths`/δω.
    pub tail_widths: f64,
    /// Explicit pulse times; `None` spaces the stages automatically.
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub tolerances: Tolerances,
}

impl OracleConfig {
    pub fn new(medium: Medium, photon_width: f64) -> Self {
        Self {
            medium,
            photon_width,
            atoms: 400,
            modes: 512,
            span_widths: 25.0,
            truncation: 40.0,
            areas: (std::f64::consts::PI, std::f64::consts::PI),
            pulse_duration: None,
            second_direction: Direction::Backward,
            entry_time: None,
            tail_widths: 10.0,
            t1: None,
            t2: None,
            tolerances: coupled_tolerances(),
        }
    }

    pub fn grid(&self) -> Result<FrequencyGrid> {
        require_positive("photon_width", self.photon_width)?;
        require_positive("span_widths", self.span_widths)?;
        if self.modes < 2 {
            return Err(invalid("modes", "need at least 2 modes"));
        }
        FrequencyGrid::symmetric(self.span_widths * self.photon_width, self.modes)
    }

    pub fn photon(&self) -> Result<PhotonState> {
        PhotonState::lorentzian(self.photon_width, self.grid()?)
    }

    /// Stage timing implied by the configuration, validated for overlap.
    pub fn schedule(&self) -> Result<OracleSchedule> {
        let m = &self.medium;
        let width = m.profile().width();
        let transit = m.length() / m.speed_of_light();
        let grid = self.grid()?;
        let duration = match self.pulse_duration {
            Some(t) => require_positive("pulse_duration", t)?,
            None => flat_filter_duration(m, grid.end())?,
        };
        let half_window = PULSE_WINDOW * duration;
        let entry = self.entry_time.unwrap_or(2.0 / width);
        let absorption_end = entry + transit + self.tail_widths / self.photon_width;
        let t1 = self.t1.unwrap_or(absorption_end + half_window + 1.0 / width);
        let t2 = self
            .t2
            .unwrap_or(t1 + 2.0 * (transit + half_window) + 5.0 / width);

        // windows in which some atom of the medium is driven by each pulse
        let first = (t1 - half_window, t1 + transit + half_window);
        let second = match self.second_direction {
            Direction::Backward => (t2 - transit - half_window, t2 + half_window),
            Direction::Forward => (t2 - half_window, t2 + transit + half_window),
        };
        if first.0 < absorption_end {
            return Err(Error::StageOverlap(format!(
                "first pulse starts at {:e} s before absorption ends at {absorption_end:e} s",
                first.0
            )));
        }
        if second.0 < first.1 {
            return Err(Error::StageOverlap(format!(
                "second pulse window starts at {:e} s before the first ends at {:e} s",
                second.0, first.1
            )));
        }
        let tau = t1 - entry;
        let retrieval_start = second.1;
        Ok(OracleSchedule {
            entry,
            absorption_end,
            t1,
            t2,
            tau,
            pulse_duration: duration,
            half_window,
            retrieval_start,
            retrieval_end: t2 + tau + transit + 4.0 / width,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSchedule {
    pub entry: f64,
    pub absorption_end: f64,
    pub t1: f64,
    pub t2: f64,
    /// Delay from the photon's arrival to the first pulse.
    pub tau: f64,
    pub pulse_duration: f64,
    pub half_window: f64,
    pub retrieval_start: f64,
    pub retrieval_end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub schedule: OracleSchedule,
    pub pulses: (ControlPulse, ControlPulse),
    pub photon: PhotonState,
    pub absorption: AbsorptionOutcome,
    pub transmitted: SpectralFunction,
    /// Σ|β_j|² after absorption.
    pub absorbed: f64,
    /// Σ|ξ_j|² after the first pulse.
    pub stored: f64,
    /// Optical coherence never transferred by either pulse (excluded from retrieval).
    pub residual_coherence: f64,
    /// Σ|b_j|² of the rephased coherence that seeds retrieval.
    pub echo_source: f64,
    pub retrieval: RetrievalOutcome,
    pub echo: SpectralFunction,
    pub echo_probability: f64,
}

impl OracleReport {
    /// Time from the second pulse to the strongest emission.
    pub fn peak_emission_delay(&self) -> f64 {
        self.retrieval.peak_emission_time() - self.schedule.t2
    }

    /// Largest norm drift over both coupled stages.
    pub fn norm_drift(&self) -> f64 {
        self.absorption.norm_drift().max(self.retrieval.norm_drift())
    }

    /// Columnar dump: stage, time and the field/atom probabilities.
    pub fn trajectory_table(&self) -> String {
        let mut out = String::from("stage\ttime_s\tfield\tatoms\ttotal\n");
        let mut rows = |stage: &str, rows: &[TrajectoryRow]| {
            for r in rows {
                let _ = writeln!(
                    out,
                    "{stage}\t{:.9e}\t{:.9e}\t{:.9e}\t{:.9e}",
                    r.time,
                    r.field,
                    r.atoms,
                    r.total()
                );
            }
        };
        rows("absorption", &self.absorption.trajectory);
        let s = &self.schedule;
        rows(
            "pulse1",
            &[TrajectoryRow {
                time: s.t1,
                field: 0.0,
                atoms: self.stored,
            }],
        );
        rows(
            "pulse2",
            &[TrajectoryRow {
                time: s.t2,
                field: 0.0,
                atoms: self.echo_source,
            }],
        );
        rows("retrieval", &self.retrieval.trajectory);
        out
    }
}

struct AtomTransfer {
    stored: Complex64,
    echo: Complex64,
    residual: Complex64,
}

/// Absorption → two sech pulses (integrated per atom) → backward retrieval.
pub fn run_protocol_oracle(cfg: &OracleConfig) -> Result<OracleReport> {
    let m = &cfg.medium;
    let schedule = cfg.schedule()?;
    let photon = cfg.photon()?;
    let ens = DiscretizedEnsemble::stratified(m, cfg.atoms, cfg.truncation)?;

    let modes = ModeGrid::from_photon(&photon, schedule.entry);
    let absorption = integrate_absorption_with(&ens, &modes, schedule.absorption_end, cfg.tolerances)?;
    let transmitted = absorption.transmitted(schedule.entry)?;
    let absorbed = absorption.atomic_excitation();

    let p1 = ControlPulse::resonant(m, cfg.areas.0, schedule.pulse_duration, schedule.t1)?;
    let p2 = ControlPulse::resonant(m, cfg.areas.1, schedule.pulse_duration, schedule.t2)?
        .with_direction(cfg.second_direction);
    let phases = StoragePhase::new(m, p1, p2);
    let ratio = m.detuning_ratio();
    let t_abs = schedule.absorption_end;
    let half = schedule.half_window;

    let transfers: Vec<AtomTransfer> = ens
        .atoms()
        .par_iter()
        .zip(absorption.atoms.par_iter())
        .map(|(atom, beta)| -> Result<AtomTransfer> {
            let b = beta * Complex64::from_polar(1.0, atom.detuning * t_abs);
            let psi1 = phases.pulse_phase(&p1, atom.detuning, atom.z);
            let psi2 = phases.pulse_phase(&p2, atom.detuning, atom.z);
            let nu1 = p1.direction().sign() * ratio * atom.detuning;
            let nu2 = p2.direction().sign() * ratio * atom.detuning;
            let half_phase = |psi: f64| Complex64::from_polar(1.0, 0.5 * psi);

            let zero = Complex64::new(0.0, 0.0);
            let first = integrate_pulse(b * half_phase(psi1).conj(), zero, &p1, -nu1, half)?;
            let left = first.b * half_phase(psi1);
            let stored = first.xi * half_phase(psi1).conj();

            let back = integrate_pulse(zero, stored * half_phase(psi2), &p2, -nu2, half)?;
            let kept = integrate_pulse(left * half_phase(psi2).conj(), zero, &p2, -nu2, half)?;
            Ok(AtomTransfer {
                stored,
                echo: back.b * half_phase(psi2),
                residual: kept.b * half_phase(psi2),
            })
        })
        .collect::<Result<_>>()?;

    let stored = transfers.iter().map(|t| t.stored.norm_sqr()).sum();
    let residual_coherence = transfers.iter().map(|t| t.residual.norm_sqr()).sum();
    let echo_source = transfers.iter().map(|t| t.echo.norm_sqr()).sum();

    // the rephased coherence evolves as e^{+iΔt} against the backward modes
    let t_r = schedule.retrieval_start;
    let seed: Vec<Complex64> = ens
        .atoms()
        .iter()
        .zip(&transfers)
        .map(|(a, t)| t.echo * Complex64::from_polar(1.0, a.detuning * t_r))
        .collect();
    let backward = ModeGrid::empty(*photon.grid(), Direction::Backward, t_r);
    let retrieval =
        integrate_retrieval_with(&ens, &backward, &seed, schedule.retrieval_end, cfg.tolerances)?;
    let echo = retrieval.modes.spectrum_since(0.0)?;
    let echo_probability = retrieval.emitted();

    Ok(OracleReport {
        schedule,
        pulses: (p1, p2),
        photon,
        absorption,
        transmitted,
        absorbed,
        stored,
        residual_coherence,
        echo_source,
        retrieval,
        echo,
        echo_probability,
    })
}

/// sqrt(Σ(|a| − |b|)² / Σ|b|²) over matching grids.
pub fn magnitude_rms(a: &SpectralFunction, b: &SpectralFunction) -> Result<f64> {
    rms(a, b, |x, y| x.norm() - y.norm())
}

/// sqrt(Σ|a − b|² / Σ|b|²) over matching grids.
pub fn complex_rms(a: &SpectralFunction, b: &SpectralFunction) -> Result<f64> {
    rms(a, b, |x, y| (x - y).norm())
}

fn rms(
    a: &SpectralFunction,
    b: &SpectralFunction,
    diff: impl Fn(Complex64, Complex64) -> f64,
) -> Result<f64> {
    if a.grid() != b.grid() {
        return Err(invalid("spectra", "grids differ"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&x, &y) in a.values().iter().zip(b.values()) {
        num += diff(x, y).powi(2);
        den += y.norm_sqr();
    }
    Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
}
