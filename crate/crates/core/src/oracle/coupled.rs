//! Field modes coupled to the atoms of a discretized ensemble.
//!
//! In the frame rotating at ω31 the amplitudes obey
//!
//!   dA_k/dt = −iu_k A_k − i Σ_j W*_jk β_j
//!   dβ_j/dt = −iω_j β_j − i Σ_k W_jk A_k
//!
//! with W_jk = G_j e^{i n k_k z_j}, G_j² = g_j² du/c, and ω_j = nΔ_j the
//! Doppler detuning seen by light travelling in direction n. The free
//! rotations are removed analytically (a = A e^{iut}, b = β e^{iω t}) so the
//! integrator only follows the coupling.

use num_complex::Complex64;

use super::ensemble::{DiscretizedEnsemble, ModeGrid};
use super::integrator::{ComplexSystem, Dopri5, Stats, Tolerances};
use crate::control::spatial_phase;
use crate::error::Result;

pub(crate) struct CoupledSystem {
    n_modes: usize,
    n_atoms: usize,
    mode_freq: Vec<f64>,
    atom_freq: Vec<f64>,
    w_re: Vec<f64>,
    w_im: Vec<f64>,
    // scratch
    pa_re: Vec<f64>,
    pa_im: Vec<f64>,
    fa_re: Vec<f64>,
    fa_im: Vec<f64>,
}

impl CoupledSystem {
    pub(crate) fn new(ens: &DiscretizedEnsemble, modes: &ModeGrid) -> Self {
        let grid = modes.grid();
        let n = modes.direction().sign();
        let c = ens.speed_of_light();
        let du = grid.step();
        let (m_count, a_count) = (grid.len(), ens.len());
        let mut w_re = Vec::with_capacity(m_count * a_count);
        let mut w_im = Vec::with_capacity(m_count * a_count);
        for atom in ens.atoms() {
            let g = (ens.coupling_squared(atom) * du / c).sqrt();
            let carrier = spatial_phase(ens.omega31() / c, atom.z);
            for u in grid.points() {
                let phase = n * (carrier + u * atom.z / c);
                w_re.push(g * phase.cos());
                w_im.push(g * phase.sin());
            }
        }
        Self {
            n_modes: m_count,
            n_atoms: a_count,
            mode_freq: grid.points().collect(),
            atom_freq: ens.atoms().iter().map(|a| n * a.detuning).collect(),
            w_re,
            w_im,
            pa_re: vec![0.0; m_count],
            pa_im: vec![0.0; m_count],
            fa_re: vec![0.0; m_count],
            fa_im: vec![0.0; m_count],
        }
    }

    /// Interaction amplitudes at local time t → lab amplitudes, in place.
    pub(crate) fn to_lab(&self, t: f64, y: &mut [Complex64]) {
        let (field, atoms) = y.split_at_mut(self.n_modes);
        for (a, &u) in field.iter_mut().zip(&self.mode_freq) {
            *a *= Complex64::from_polar(1.0, -u * t);
        }
        for (b, &w) in atoms.iter_mut().zip(&self.atom_freq) {
            *b *= Complex64::from_polar(1.0, -w * t);
        }
    }
}

impl ComplexSystem for CoupledSystem {
    fn dim(&self) -> usize {
        self.n_modes + self.n_atoms
    }

    fn derivative(&mut self, t: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let m = self.n_modes;
        let (field, atoms) = y.split_at(m);
        let (dfield, datoms) = dy.split_at_mut(m);
        for k in 0..m {
            let v = field[k] * Complex64::from_polar(1.0, -self.mode_freq[k] * t);
            self.pa_re[k] = v.re;
            self.pa_im[k] = v.im;
            self.fa_re[k] = 0.0;
            self.fa_im[k] = 0.0;
        }
        for j in 0..self.n_atoms {
            let b = atoms[j] * Complex64::from_polar(1.0, -self.atom_freq[j] * t);
            let row = j * m..(j + 1) * m;
            let (acc_re, acc_im) = row_kernel(
                &self.w_re[row.clone()],
                &self.w_im[row],
                &self.pa_re,
                &self.pa_im,
                b,
                &mut self.fa_re,
                &mut self.fa_im,
            );
            let s = Complex64::new(acc_re, acc_im) * Complex64::from_polar(1.0, self.atom_freq[j] * t);
            datoms[j] = Complex64::new(s.im, -s.re);
        }
        for k in 0..m {
            let s = Complex64::new(self.fa_re[k], self.fa_im[k])
                * Complex64::from_polar(1.0, self.mode_freq[k] * t);
            dfield[k] = Complex64::new(s.im, -s.re);
        }
    }
}

/// Returns Σ_k W_k a_k and accumulates conj(W_k)·b into `f`, reading the row once.
#[inline]
fn row_kernel(
    wr: &[f64],
    wi: &[f64],
    ar: &[f64],
    ai: &[f64],
    b: Complex64,
    fr: &mut [f64],
    fi: &mut [f64],
) -> (f64, f64) {
    const LANES: usize = 4;
    let n = wr.len();
    let (mut sr, mut si) = ([0.0f64; LANES], [0.0f64; LANES]);
    let chunks = n / LANES * LANES;
    let mut k = 0;
    while k < chunks {
        for l in 0..LANES {
            let i = k + l;
            let (x, y) = (wr[i], wi[i]);
            sr[l] += x * ar[i] - y * ai[i];
            si[l] += x * ai[i] + y * ar[i];
            fr[i] += x * b.re + y * b.im;
            fi[i] += x * b.im - y * b.re;
        }
        k += LANES;
    }
    for i in chunks..n {
        let (x, y) = (wr[i], wi[i]);
        sr[0] += x * ar[i] - y * ai[i];
        si[0] += x * ai[i] + y * ar[i];
        fr[i] += x * b.re + y * b.im;
        fi[i] += x * b.im - y * b.re;
    }
    (sr.iter().sum(), si.iter().sum())
}

/// One sample of a trajectory: time and the probabilities in field and atoms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub time: f64,
    pub field: f64,
    pub atoms: f64,
}

impl TrajectoryRow {
    pub fn total(&self) -> f64 {
        self.field + self.atoms
    }
}

pub(crate) struct CoupledRun {
    pub field: Vec<Complex64>,
    pub atoms: Vec<Complex64>,
    pub trajectory: Vec<TrajectoryRow>,
    pub stats: Stats,
}

/// Integrates lab amplitudes from `t_start` to `t_end`, sampling the norms
/// at `samples` evenly spaced times.
pub(crate) fn run_coupled(
    ens: &DiscretizedEnsemble,
    modes: &ModeGrid,
    atoms: &[Complex64],
    t_start: f64,
    t_end: f64,
    samples: usize,
    tol: Tolerances,
) -> Result<CoupledRun> {
    let mut sys = CoupledSystem::new(ens, modes);
    let m = modes.len();
    let mut y: Vec<Complex64> = modes.amplitudes().iter().chain(atoms).copied().collect();
    // local time origin at t_start: lab and interaction amplitudes coincide there
    let probs = |y: &[Complex64]| {
        let f: f64 = y[..m].iter().map(|v| v.norm_sqr()).sum();
        let a: f64 = y[m..].iter().map(|v| v.norm_sqr()).sum();
        (f, a)
    };
    let (f0, a0) = probs(&y);
    let mut trajectory = vec![TrajectoryRow {
        time: t_start,
        field: f0,
        atoms: a0,
    }];
    let mut solver = Dopri5::new(tol);
    let mut stats = Stats::default();
    let samples = samples.max(1);
    let span = t_end - t_start;
    let mut s_prev = 0.0;
    for i in 1..=samples {
        let s = span * i as f64 / samples as f64;
        stats += solver.integrate(&mut sys, s_prev, s, &mut y)?;
        s_prev = s;
        let (f, a) = probs(&y);
        trajectory.push(TrajectoryRow {
            time: t_start + s,
            field: f,
            atoms: a,
        });
    }
    sys.to_lab(span, &mut y);
    let atoms = y.split_off(m);
    Ok(CoupledRun {
        field: y,
        atoms,
        trajectory,
        stats,
    })
}
