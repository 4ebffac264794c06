//! Complex gamma function and the Gauss sum for ₂F₁ at unit argument.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance to a non-positive integer below which an argument is a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// True when `z` lies within [`POLE_TOLERANCE`] of 0, -1, -2, ...
pub fn is_gamma_pole(z: Complex64) -> bool {
    if z.im.abs() > POLE_TOLERANCE || z.re > POLE_TOLERANCE {
        return false;
    }
    (z.re - z.re.round()).abs() <= POLE_TOLERANCE
}

/// Γ(z) for complex `z`, Lanczos approximation with reflection for Re z < ½.
pub fn complex_gamma(z: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::GammaPole(z));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        let s = (z * PI).sin();
        Complex64::new(PI, 0.0) / (s * gamma_unchecked(Complex64::new(1.0, 0.0) - z))
    } else {
        lanczos(z).exp()
    }
}

/// ln Γ(z) on Re z ≥ ½ (principal branch of the Lanczos form).
fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
}

/// ₂F₁(a, b; c; 1) = Γ(c) Γ(c−a−b) / (Γ(c−a) Γ(c−b)).
///
/// Requires Re(c − a − b) > 0 and `c` away from the gamma poles. When `c − a`
/// or `c − b` sits on a pole the denominator is infinite and the result is an
/// exact zero.
pub fn gauss_2f1_at_unity(a: Complex64, b: Complex64, c: Complex64) -> Result<Complex64> {
    let s = c - a - b;
    if !(s.re > 0.0) {
        return Err(Error::HypergeometricDomain(s.re));
    }
    if is_gamma_pole(c) {
        return Err(Error::GammaPole(c));
    }
    let (ca, cb) = (c - a, c - b);
    if is_gamma_pole(ca) || is_gamma_pole(cb) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(gamma_unchecked(c) * gamma_unchecked(s) / (gamma_unchecked(ca) * gamma_unchecked(cb)))
}
