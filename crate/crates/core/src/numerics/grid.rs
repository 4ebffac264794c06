//! Uniform frequency grids and complex spectra sampled on them.
//!
//! All frequencies are angular offsets in s⁻¹ from a carrier declared by the
//! owner of the grid; absolute optical frequencies (~1e15 s⁻¹) never appear
//! here.

use num_complex::Complex64;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    start: f64,
    step: f64,
    count: usize,
}

impl FrequencyGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() {
            return Err(invalid("start", format!("must be finite, got {start}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(invalid("step", format!("must be finite and > 0, got {step}")));
        }
        if count < 2 {
            return Err(invalid("count", format!("need at least 2 points, got {count}")));
        }
        Ok(Self { start, step, count })
    }

    /// Grid of `count` points covering `[-half_span, half_span]`.
    pub fn symmetric(half_span: f64, count: usize) -> Result<Self> {
        if !(half_span.is_finite() && half_span > 0.0) {
            return Err(invalid(
                "half_span",
                format!("must be finite and > 0, got {half_span}"),
            ));
        }
        if count < 2 {
            return Err(invalid("count", format!("need at least 2 points, got {count}")));
        }
        Self::new(-half_span, 2.0 * half_span / (count - 1) as f64, count)
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn end(&self) -> f64 {
        self.point(self.count - 1)
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.start && u <= self.end()
    }

    /// True when point(i) == -point(count - 1 - i) up to rounding.
    pub fn is_symmetric(&self) -> bool {
        (self.start + self.end()).abs() <= 1e-9 * self.step
    }
}

/// Complex amplitude sampled on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl SpectralFunction {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("length {} does not match grid of {}", values.len(), grid.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(invalid("values", format!("non-finite sample at index {i}")));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at every grid point. Non-finite samples are rejected.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Trapezoidal ∫ f du.
    pub fn integrate(&self) -> Complex64 {
        trapezoid(self.values.iter().copied(), self.grid.step)
    }

    /// Trapezoidal ∫ |f|² du.
    pub fn norm(&self) -> f64 {
        trapezoid(self.values.iter().map(|v| v.norm_sqr()), self.grid.step)
    }

    pub fn magnitudes_squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise `f(u) * g(u, f(u))`, keeping the grid.
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Result<Self> {
        let values = self
            .grid
            .points()
            .zip(&self.values)
            .map(|(u, &v)| f(u, v))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `a·self + b·other`; the grids must match.
    pub fn linear_combination(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(invalid("other", "grids differ"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.grid, values)
    }

    /// Linear interpolation at `u`; zero outside the grid.
    pub fn sample(&self, u: f64) -> Complex64 {
        if !self.grid.contains(u) {
            return Complex64::new(0.0, 0.0);
        }
        let pos = (u - self.grid.start) / self.grid.step;
        let i = (pos.floor() as usize).min(self.grid.len() - 2);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Value at the reflected detuning `-u` for grid point `i`.
    pub fn mirrored_at(&self, i: usize) -> Complex64 {
        if self.grid.is_symmetric() {
            self.values[self.grid.len() - 1 - i]
        } else {
            self.sample(-self.grid.point(i))
        }
    }
}

fn trapezoid<T>(values: impl ExactSizeIterator<Item = T>, step: f64) -> T
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    let n = values.len();
    let mut acc = T::default();
    for (i, v) in values.enumerate() {
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc = acc + v * w;
    }
    acc * step
}
