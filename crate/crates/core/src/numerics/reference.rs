//! Independent reference evaluations used to cross-check the closed forms.
//!
//! Nothing here calls into the closed-form special functions or the
//! Lorentzian shortcut for the Cauchy transform: the hypergeometric value is
//! obtained by summing its defining series with tail extrapolation, and the
//! Cauchy transform by direct quadrature at finite regulator ε.

use num_complex::Complex64;

use super::profile::LineProfile;

/// Partial sums of Σ (a)_n (b)_n / ((c)_n n!) extrapolated to infinitely many
/// terms.
///
/// The tail behaves as N^{-s}(c₀ + c₁/N + …) with s = c − a − b, so partial
/// sums at N₀·2^k are combined by repeated Richardson elimination of the
/// exponents s, s+1, s+2, …
pub fn hypergeometric_series_at_unity(a: Complex64, b: Complex64, c: Complex64) -> Complex64 {
    const LEVELS: usize = 7;
    const FIRST: usize = 1000;

    let s = c - a - b;
    let mut partial = Vec::with_capacity(LEVELS);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut n = 0usize;
    let mut target = FIRST;
    while partial.len() < LEVELS {
        while n < target {
            sum += term;
            let m = n as f64;
            term *= (a + m) * (b + m) / ((c + m) * (m + 1.0));
            n += 1;
        }
        partial.push(sum);
        target *= 2;
    }

    let mut table = partial;
    for order in 0..LEVELS - 1 {
        let ratio = Complex64::new(2.0, 0.0).powc(-(s + order as f64));
        table = table
            .windows(2)
            .map(|w| (w[1] - ratio * w[0]) / (1.0 - ratio))
            .collect();
    }
    table[0]
}

/// ∫ G(Δ') / (ε + i(Δ' − u)) dΔ' by adaptive quadrature at fixed ε > 0.
///
/// Real part: substitution Δ' = u + ε·tan φ turns the kernel into dφ.
/// Imaginary part: the odd combination G(u+s) − G(u−s) is integrated in
/// ln s, which keeps the integrand bounded at s → 0.
pub fn regularized_cauchy_quadrature(profile: &LineProfile, u: f64, eps: f64) -> Complex64 {
    use std::f64::consts::FRAC_PI_2;

    let scale = profile.density(0.0);
    let re = adaptive_simpson(
        &|phi: f64| profile.density(u + eps * phi.tan()),
        -FRAC_PI_2 + 1e-15,
        FRAC_PI_2 - 1e-15,
        1e-15 * scale,
    );

    let odd = |y: f64| {
        let s = y.exp();
        let diff = profile.density(u + s) - profile.density(u - s);
        diff * s * s / (eps * eps + s * s)
    };
    let reach = 1e7 * (profile.width() + u.abs());
    let lo = (1e-6 * eps.min(profile.width())).ln();
    let im = -adaptive_simpson(&odd, lo, reach.ln(), 1e-15 * scale);
    Complex64::new(re, im)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    // Seed with a uniform split so narrow features are not skipped.
    const SEED: usize = 64;
    let h = (b - a) / SEED as f64;
    (0..SEED)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, f1, fm) = (f(x0), f(x1), f(0.5 * (x0 + x1)));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            simpson_step(f, x0, x1, f0, fm, f1, whole, tol / SEED as f64, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
