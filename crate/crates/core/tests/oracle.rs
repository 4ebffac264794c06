use std::f64::consts::PI;
use std::time::Instant;

use echomem::control::Direction;
use echomem::echo::{echo_spectrum, ProtocolSchedule};
use echomem::mapping::{transmit, Medium};
use echomem::numerics::lorentzian_profile;
use echomem::oracle::{
    complex_rms, integrate_absorption, integrate_retrieval, magnitude_rms, run_protocol_oracle,
    DiscretizedEnsemble, ModeGrid, OracleConfig,
};
use num_complex::Complex64;

fn absorption_config() -> OracleConfig {
    let m = Medium::new(lorentzian_profile(1e9).unwrap(), 0.1, 10.0, 1e9).unwrap();
    OracleConfig::new(m, 1e9)
}

fn retrieval_config() -> OracleConfig {
    let m = Medium::new(lorentzian_profile(1e9).unwrap(), 0.08, 100.0, 1e8).unwrap();
    OracleConfig {
        atoms: 400,
        modes: 128,
        truncation: 10.0,
        tail_widths: 6.0,
        ..OracleConfig::new(m, 1e8)
    }
}

#[test]
fn absorption_matches_closed_form_transmission() {
    let cfg = absorption_config();
    let start = Instant::now();
    let sched = cfg.schedule().unwrap();
    let photon = cfg.photon().unwrap();
    let ens = DiscretizedEnsemble::stratified(&cfg.medium, cfg.atoms, cfg.truncation).unwrap();
    let modes = ModeGrid::from_photon(&photon, sched.entry);
    let out = integrate_absorption(&ens, &modes, sched.absorption_end).unwrap();
    let expected = transmit(&cfg.medium, &photon).unwrap();
    let got = out.transmitted(sched.entry).unwrap();
    let rms = complex_rms(&got, &expected).unwrap();
    eprintln!(
        "absorption: rms {rms:.4} drift {:.2e} steps {} in {:.1?}",
        out.norm_drift(),
        out.stats.accepted,
        start.elapsed()
    );
    assert!(rms < 0.02, "{rms}");
    assert!(out.norm_drift() < 1e-8);
}

#[test]
fn scaled_input_scales_every_amplitude() {
    let m = Medium::new(lorentzian_profile(1e9).unwrap(), 0.1, 10.0, 1e9).unwrap();
    let cfg = OracleConfig {
        atoms: 60,
        modes: 128,
        span_widths: 10.0,
        truncation: 10.0,
        ..OracleConfig::new(m, 1e9)
    };
    let sched = cfg.schedule().unwrap();
    let ens = DiscretizedEnsemble::stratified(&cfg.medium, cfg.atoms, cfg.truncation).unwrap();
    let modes = ModeGrid::from_photon(&cfg.photon().unwrap(), sched.entry);
    let c = Complex64::new(0.3, -0.4);
    let a = integrate_absorption(&ens, &modes, sched.absorption_end).unwrap();
    let b = integrate_absorption(&ens, &modes.scaled(c), sched.absorption_end).unwrap();
    for (x, y) in a.atoms.iter().zip(&b.atoms) {
        assert!((x * c - y).norm() <= 1e-6 * x.norm().max(1e-12));
    }
    let empty = ModeGrid::empty(*modes.grid(), Direction::Backward, 0.0);
    let r = integrate_retrieval(&ens, &empty, &a.atoms, 2e-9).unwrap();
    assert!(r.norm_drift() < 1e-8);
}

#[test]
fn zero_area_pulses_leave_nothing_to_emit() {
    let m = Medium::new(lorentzian_profile(1e9).unwrap(), 0.1, 10.0, 1e9).unwrap();
    let cfg = OracleConfig {
        atoms: 80,
        modes: 128,
        span_widths: 10.0,
        truncation: 10.0,
        areas: (0.0, 0.0),
        ..OracleConfig::new(m, 1e9)
    };
    let report = run_protocol_oracle(&cfg).unwrap();
    assert_eq!(report.stored, 0.0);
    assert_eq!(report.echo_probability, 0.0);
    assert!(report.residual_coherence > 0.1);
}

#[test]
fn overlapping_stages_are_rejected() {
    let mut cfg = absorption_config();
    let s = cfg.schedule().unwrap();
    cfg.t1 = Some(s.absorption_end);
    assert!(matches!(cfg.schedule(), Err(echomem::Error::StageOverlap(_))));
    let mut cfg = absorption_config();
    cfg.t2 = Some(s.t1 + s.half_window);
    assert!(matches!(cfg.schedule(), Err(echomem::Error::StageOverlap(_))));
}

#[test]
fn backward_retrieval_matches_echo_spectrum() {
    let cfg = retrieval_config();
    let start = Instant::now();
    let report = run_protocol_oracle(&cfg).unwrap();
    let s = report.schedule;
    let sched = ProtocolSchedule::new(s.t1, s.t2, s.tau).unwrap();
    let (p1, p2) = sched.pulses(&cfg.medium, PI, s.pulse_duration).unwrap();
    let closed = echo_spectrum(&cfg.medium, &report.photon, (&p1, &p2), &sched).unwrap();
    let rms = magnitude_rms(&report.echo, &closed.spectrum).unwrap();
    let delay = report.peak_emission_delay();
    eprintln!(
        "retrieval: rms {rms:.4} echo {:.4} closed {:.4} delay/τ {:.3} drift {:.2e} in {:.1?}",
        report.echo_probability,
        closed.total_probability,
        delay / s.tau,
        report.norm_drift(),
        start.elapsed()
    );
    // coarse ensemble: the full-size comparison lives in the acceptance suite
    assert!(rms < 0.1, "{rms}");
    assert!((delay / s.tau - 1.0).abs() < 0.3);
    assert!(report.norm_drift() < 1e-8);
    let table = report.trajectory_table();
    assert_eq!(table.lines().count(), 1 + 2 * 201 + 2);
}
