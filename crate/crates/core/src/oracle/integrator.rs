//! Adaptive Dormand–Prince 5(4) for complex state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// dy/dt = f(t, y) on a complex vector.
pub trait ComplexSystem {
    fn dim(&self) -> usize;
    fn derivative(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; 0 picks one from the first derivative.
    pub first_step: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-13,
            first_step: 0.0,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

impl std::ops::AddAssign for Stats {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.evaluations += o.evaluations;
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth- minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrator with reusable stage buffers.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    tol: Tolerances,
    k: [Vec<Complex64>; 7],
    stage: Vec<Complex64>,
    next: Vec<Complex64>,
    last_step: f64,
    resume: f64,
}

impl Dopri5 {
    pub fn new(tol: Tolerances) -> Self {
        Self {
            tol,
            k: Default::default(),
            stage: Vec::new(),
            next: Vec::new(),
            last_step: 0.0,
            resume: 0.0,
        }
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Integrates `y` in place from `t0` to `t1`. Successive calls on adjacent
    /// intervals resume with the last accepted step size.
    pub fn integrate<S: ComplexSystem>(
        &mut self,
        sys: &mut S,
        t0: f64,
        t1: f64,
        y: &mut [Complex64],
    ) -> Result<Stats> {
        let n = sys.dim();
        assert_eq!(y.len(), n, "state length does not match system dimension");
        for buf in self.k.iter_mut().chain([&mut self.stage, &mut self.next]) {
            buf.clear();
            buf.resize(n, Complex64::new(0.0, 0.0));
        }
        let mut stats = Stats::default();
        if t1 == t0 {
            return Ok(stats);
        }
        let span = t1 - t0;
        let dir = span.signum();

        sys.derivative(t0, y, &mut self.k[0]);
        stats.evaluations += 1;
        let mut h = if self.tol.first_step > 0.0 {
            self.tol.first_step.min(span.abs())
        } else if self.resume > 0.0 {
            // continuing a previous interval
            self.resume.min(span.abs())
        } else {
            self.initial_step(y, span.abs())
        } * dir;
        let mut t = t0;
        let h_floor = 1e-14 * span.abs().max(t0.abs());

        while (t1 - t) * dir > 0.0 {
            if stats.accepted + stats.rejected >= self.tol.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: format!("step budget of {} exhausted", self.tol.max_steps),
                });
            }
            let unclipped = h;
            let clipped = (t + h - t1) * dir > 0.0;
            if clipped {
                h = t1 - t;
            }
            let err = self.step(sys, t, h, y);
            stats.evaluations += 6;
            if !err.is_finite() {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite state".into(),
                });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                t = if (t + h - t1) * dir >= 0.0 { t1 } else { t + h };
                y.copy_from_slice(&self.next);
                self.k.swap(0, 6);
                stats.accepted += 1;
                self.last_step = h.abs();
                h *= factor;
                self.resume = if clipped { unclipped.abs().max(h.abs()) } else { h.abs() };
            } else {
                stats.rejected += 1;
                h *= factor.min(1.0);
                if h.abs() < h_floor {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step size underflow (h = {:e}, error norm {err:e})", h.abs()),
                    });
                }
            }
        }
        Ok(stats)
    }

    /// Size of the last accepted step.
    pub fn last_step(&self) -> f64 {
        self.last_step
    }

    fn initial_step(&self, y: &[Complex64], span: f64) -> f64 {
        let f0 = &self.k[0];
        let (mut dy, mut sy) = (0.0, 0.0);
        for (v, d) in y.iter().zip(f0) {
            let sc = self.tol.atol + self.tol.rtol * v.norm();
            sy += (v.norm() / sc).powi(2);
            dy += (d.norm() / sc).powi(2);
        }
        let n = y.len().max(1) as f64;
        let (sy, dy) = ((sy / n).sqrt(), (dy / n).sqrt());
        let h = if sy < 1e-5 || dy < 1e-5 { 1e-6 * span } else { 0.01 * sy / dy };
        h.min(span)
    }

    /// One trial step; leaves the candidate in `next`, its derivative in k[6],
    /// and returns the scaled error norm.
    fn step<S: ComplexSystem>(&mut self, sys: &mut S, t: f64, h: f64, y: &[Complex64]) -> f64 {
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let stage = &mut self.stage;

        combine(stage, y, h, &[(A21, k1)]);
        sys.derivative(t + C2 * h, stage, k2);
        combine(stage, y, h, &[(A31, k1), (A32, k2)]);
        sys.derivative(t + C3 * h, stage, k3);
        combine(stage, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        sys.derivative(t + C4 * h, stage, k4);
        combine(stage, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        sys.derivative(t + C5 * h, stage, k5);
        combine(stage, y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
        sys.derivative(t + h, stage, k6);
        combine(&mut self.next, y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        sys.derivative(t + h, &self.next, k7);

        let mut acc = 0.0;
        for i in 0..y.len() {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = self.tol.atol + self.tol.rtol * y[i].norm().max(self.next[i].norm());
            acc += e.norm_sqr() / (sc * sc);
        }
        (acc / y.len().max(1) as f64).sqrt()
    }
}

fn combine(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &Vec<Complex64>)]) {
    out.copy_from_slice(y);
    for &(a, k) in terms {
        let w = a * h;
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += v * w;
        }
    }
}
