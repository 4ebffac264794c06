//! Absorption of the single-photon wave packet by the inhomogeneous line.
//!
//! The field amplitude obeys ∂f/∂z = −α⁺(u) f with the complex absorption
//! coefficient α⁺(u) = α₀·K(u), K the Cauchy transform of the line profile.
//! Everything is expressed over the detuning u from the line center ω31.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, require_non_negative, require_positive, Result};
use crate::numerics::{FrequencyGrid, LineProfile, SpectralFunction, SPEED_OF_LIGHT};

/// Optical transition frequency used when none is given (s⁻¹).
pub const DEFAULT_OMEGA31: f64 = 3.2e15;

/// How the line-center absorption coefficient `alpha_center` is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaConvention {
    /// `alpha_center` = Re α⁺(0), the field-amplitude decay rate.
    #[default]
    Amplitude,
    /// `alpha_center` = 2·Re α⁺(0), the intensity decay rate.
    Intensity,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    profile: LineProfile,
    alpha_center: f64,
    length: f64,
    omega31: f64,
    omega21: f64,
    convention: AlphaConvention,
    speed_of_light: f64,
}

impl Medium {
    /// `alpha_center` in cm⁻¹, `length` in cm, `omega21` in s⁻¹.
    pub fn new(profile: LineProfile, alpha_center: f64, length: f64, omega21: f64) -> Result<Self> {
        let m = Self {
            profile,
            alpha_center: require_non_negative("alpha_center", alpha_center)?,
            length: require_positive("length", length)?,
            omega31: DEFAULT_OMEGA31,
            omega21: require_positive("omega21", omega21)?,
            convention: AlphaConvention::Amplitude,
            speed_of_light: SPEED_OF_LIGHT,
        };
        m.check_levels()
    }

    pub fn with_omega31(mut self, omega31: f64) -> Result<Self> {
        self.omega31 = require_positive("omega31", omega31)?;
        self.check_levels()
    }

    pub fn with_length(mut self, length: f64) -> Result<Self> {
        self.length = require_positive("length", length)?;
        Ok(self)
    }

    pub fn with_alpha_center(mut self, alpha_center: f64) -> Result<Self> {
        self.alpha_center = require_non_negative("alpha_center", alpha_center)?;
        Ok(self)
    }

    pub fn with_omega21(mut self, omega21: f64) -> Result<Self> {
        self.omega21 = require_positive("omega21", omega21)?;
        self.check_levels()
    }

    pub fn with_convention(mut self, convention: AlphaConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_speed_of_light(mut self, c: f64) -> Result<Self> {
        self.speed_of_light = require_positive("speed_of_light", c)?;
        Ok(self)
    }

    fn check_levels(self) -> Result<Self> {
        if self.omega21 >= self.omega31 {
            return Err(invalid(
                "omega21",
                format!("must be below omega31 = {:e}, got {:e}", self.omega31, self.omega21),
            ));
        }
        Ok(self)
    }

    pub fn profile(&self) -> &LineProfile {
        &self.profile
    }

    pub fn alpha_center(&self) -> f64 {
        self.alpha_center
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn omega31(&self) -> f64 {
        self.omega31
    }

    pub fn omega21(&self) -> f64 {
        self.omega21
    }

    pub fn omega32(&self) -> f64 {
        self.omega31 - self.omega21
    }

    pub fn convention(&self) -> AlphaConvention {
        self.convention
    }

    pub fn speed_of_light(&self) -> f64 {
        self.speed_of_light
    }

    /// Re α⁺ at line center (cm⁻¹) after applying the convention.
    pub fn amplitude_alpha_center(&self) -> f64 {
        match self.convention {
            AlphaConvention::Amplitude => self.alpha_center,
            AlphaConvention::Intensity => 0.5 * self.alpha_center,
        }
    }

    /// α₀ such that α⁺(u) = α₀·K(u), in cm⁻¹·s⁻¹.
    pub fn alpha0(&self) -> f64 {
        self.amplitude_alpha_center() * self.profile.width()
    }

    /// ω32/ω31, the factor relating optical to control-transition detunings.
    pub fn detuning_ratio(&self) -> f64 {
        self.omega32() / self.omega31
    }
}

/// Single-photon wave packet sampled over the detuning from ω31.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonState {
    carrier_offset: f64,
    spectrum: SpectralFunction,
    width: f64,
}

impl PhotonState {
    /// Accepts a spectrum whose norm is 1 within 2e-2.
    pub fn new(carrier_offset: f64, spectrum: SpectralFunction, width: f64) -> Result<Self> {
        let norm = spectrum.norm();
        if (norm - 1.0).abs() > 2e-2 {
            return Err(invalid("spectrum", format!("norm must be 1 within 2e-2, got {norm}")));
        }
        Ok(Self {
            carrier_offset: require_finite("carrier_offset", carrier_offset)?,
            spectrum,
            width: require_positive("width", width)?,
        })
    }

    /// Rescales `spectrum` to unit norm first; for arbitrary test shapes.
    pub fn normalized(carrier_offset: f64, spectrum: SpectralFunction, width: f64) -> Result<Self> {
        let norm = spectrum.norm();
        if !(norm > 0.0) {
            return Err(invalid("spectrum", "zero spectrum cannot be normalized"));
        }
        Self::new(carrier_offset, spectrum.scale((1.0 / norm.sqrt()).into()), width)
    }

    /// f(u) ∝ √(δω/π) / (δω − iu): |f|² is a Lorentzian of half width δω,
    /// and in time the packet is a causal exponential e^{−δω t}. The tails
    /// beyond the grid are dropped and the remainder rescaled to unit norm.
    pub fn lorentzian(width: f64, grid: FrequencyGrid) -> Result<Self> {
        Self::lorentzian_detuned(width, 0.0, grid)
    }

    /// Lorentzian packet whose carrier sits `offset` away from ω31.
    pub fn lorentzian_detuned(width: f64, offset: f64, grid: FrequencyGrid) -> Result<Self> {
        let width = require_positive("width", width)?;
        let amp = (width / PI).sqrt();
        let spectrum = SpectralFunction::from_fn(grid, |u| {
            Complex64::new(amp, 0.0) / Complex64::new(width, -(u - offset))
        })?;
        let kept = spectrum.norm();
        if kept < 0.5 {
            return Err(invalid(
                "grid",
                format!("keeps only {kept:.3} of the packet; widen the span"),
            ));
        }
        Self::normalized(offset, spectrum, width)
    }

    pub fn carrier_offset(&self) -> f64 {
        self.carrier_offset
    }

    pub fn spectrum(&self) -> &SpectralFunction {
        &self.spectrum
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn grid(&self) -> &FrequencyGrid {
        self.spectrum.grid()
    }

    /// t_max = ω31/δω², the time scale beyond which the quadratic phase
    /// neglected in the reduced absorption equations becomes significant.
    pub fn validity_time(&self, m: &Medium) -> f64 {
        m.omega31() / (self.width * self.width)
    }

    /// Warning text when an interval `t` exceeds [`validity_time`](Self::validity_time).
    pub fn validity_warning(&self, m: &Medium, t: f64) -> Option<String> {
        let t_max = self.validity_time(m);
        (t > t_max).then(|| format!("interval {t:e} s exceeds t_max = {t_max:e} s"))
    }
}

fn require_finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(name, format!("must be finite, got {v}")))
    }
}

/// α⁺(u) in cm⁻¹ for detuning `u` from line center.
pub fn absorption_coefficient(m: &Medium, u: f64) -> Complex64 {
    m.alpha0() * m.profile().cauchy_transform(u)
}

/// f⁽¹⁾(u) = f(u)·exp(−α⁺(u)L), the spectrum leaving the far face.
pub fn transmit(m: &Medium, p: &PhotonState) -> Result<SpectralFunction> {
    let l = m.length();
    p.spectrum()
        .map(|u, f| f * (-absorption_coefficient(m, u) * l).exp())
}

/// Excitation amplitude of the atom class at detuning Δ and depth z.
///
/// β(Δ, z) = −i·√(2πα₀)·f(Δ)·exp(−α⁺(Δ)z). The constant is fixed so that
/// ∫₀ᴸdz ∫dΔ G(Δ)|β|² equals the absorbed probability; [`crate::oracle`]
/// atoms of weight w carry |b_j|² ≈ w·|β(Δ_j, z_j)|².
pub fn atomic_amplitude(m: &Medium, p: &PhotonState, detuning: f64, z: f64) -> Result<Complex64> {
    if !(z >= 0.0 && z <= m.length()) {
        return Err(invalid("z", format!("must lie in [0, {}], got {z}", m.length())));
    }
    let prefactor = Complex64::new(0.0, -(2.0 * PI * m.alpha0()).sqrt());
    let f = p.spectrum().sample(detuning);
    Ok(prefactor * f * (-absorption_coefficient(m, detuning) * z).exp())
}

/// Probability removed from the field: input norm minus transmitted norm.
pub fn absorbed_probability(m: &Medium, p: &PhotonState) -> Result<f64> {
    let out = transmit(m, p)?;
    Ok((p.spectrum().norm() - out.norm()).clamp(0.0, 1.0))
}

/// Per-detuning absorbed density |f(u)|²·(1 − |exp(−α⁺L)|²).
pub(crate) fn absorbed_density(m: &Medium, u: f64, f: Complex64) -> f64 {
    let a = absorption_coefficient(m, u).re;
    f.norm_sqr() * -(-2.0 * a * m.length()).exp_m1()
}
