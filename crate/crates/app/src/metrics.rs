//! Building the model from a configuration, and the scalar figures of merit.

use echomem::control::{flat_filter_duration, ControlPulse};
use echomem::echo::{distortion_ratio, echo_spectrum, EchoResult, ProtocolSchedule};
use echomem::mapping::{Medium, PhotonState};
use echomem::numerics::{lorentzian_profile, FrequencyGrid};

use crate::config::ExperimentConfig;

/// Everything the closed-form evaluation needs for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub medium: Medium,
    pub photon: PhotonState,
    pub pulses: (ControlPulse, ControlPulse),
    pub schedule: ProtocolSchedule,
}

impl Experiment {
    pub fn from_config(cfg: &ExperimentConfig) -> echomem::Result<Self> {
        let md = &cfg.medium;
        let medium = Medium::new(
            lorentzian_profile(md.delta_n_per_s)?,
            md.alpha_per_cm,
            md.length_cm,
            md.omega21_per_s,
        )?
        .with_omega31(md.omega31_per_s)?
        .with_convention(md.convention);

        let ph = &cfg.photon;
        let grid = FrequencyGrid::symmetric(cfg.grid_half_span(), ph.grid_points)?;
        let photon = PhotonState::lorentzian_detuned(ph.width_per_s, ph.carrier_offset_per_s, grid)?;

        let pl = &cfg.pulses;
        let schedule = ProtocolSchedule::new(pl.t1_s, pl.t2_s, pl.tau_s)?
            .with_phi21(pl.phi21_rad)
            .with_phase_bar(pl.phase_bar_per_s);
        let duration = match pl.duration_s {
            Some(t) => t,
            None => flat_filter_duration(&medium, grid.end())?,
        };
        let (first, second) = schedule.pulses(&medium, pl.area1_rad, duration)?;
        let second = second.with_area(pl.area2_rad)?;
        Ok(Self {
            medium,
            photon,
            pulses: (first, second),
            schedule,
        })
    }

    pub fn echo(&self) -> echomem::Result<EchoResult> {
        echo_spectrum(
            &self.medium,
            &self.photon,
            (&self.pulses.0, &self.pulses.1),
            &self.schedule,
        )
    }
}

/// Echo norm relative to the unit-norm input.
pub fn total_probability(echo: &EchoResult) -> f64 {
    echo.spectrum.norm()
}

/// Maximum of the normalized spectral curve (see [`spectral_ratio_curve`]).
pub fn peak_ratio(echo: &EchoResult) -> f64 {
    echo.figure_curve().into_iter().fold(0.0, f64::max)
}

/// ω21/(πcα₀G) at the photon's carrier.
pub fn distortion_ratio_center(exp: &Experiment) -> f64 {
    distortion_ratio(&exp.medium, exp.photon.carrier_offset())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub detuning: f64,
    pub length: f64,
    pub ratio: f64,
}

/// |F(ω31 − Δ)|² / |f(ω31)|² at each Δ of `detunings`: the echo intensity at
/// the detuning mirrored from Δ, normalized to the input at line center.
pub fn spectral_ratio_curve(exp: &Experiment, detunings: &[f64]) -> echomem::Result<Vec<RatioRow>> {
    let echo = exp.echo()?;
    ratio_rows(exp, &echo, detunings)
}

pub(crate) fn ratio_rows(
    exp: &Experiment,
    echo: &EchoResult,
    detunings: &[f64],
) -> echomem::Result<Vec<RatioRow>> {
    let grid = echo.grid();
    let curve = echo.figure_curve();
    detunings
        .iter()
        .map(|&d| {
            let u = -d;
            if !grid.contains(u) {
                return Err(echomem::Error::InvalidParameter {
                    name: "detuning_per_s",
                    reason: format!(
                        "{d:e} lies outside the frequency grid [{:e}, {:e}]",
                        grid.start(),
                        grid.end()
                    ),
                });
            }
            Ok(RatioRow {
                detuning: d,
                length: exp.medium.length(),
                ratio: interpolate(grid, &curve, u),
            })
        })
        .collect()
}

fn interpolate(grid: &FrequencyGrid, values: &[f64], u: f64) -> f64 {
    let pos = (u - grid.start()) / grid.step();
    let i = (pos.floor() as usize).min(values.len() - 2);
    let w = pos - i as f64;
    values[i] * (1.0 - w) + values[i + 1] * w
}
