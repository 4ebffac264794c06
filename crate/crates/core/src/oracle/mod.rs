//! Brute-force integration of the amplitude equations over a finite
//! ensemble of atoms and a finite set of field modes.
//!
//! The stages are integrated separately, as they are temporally disjoint:
//! absorption couples forward modes to the atoms, each control pulse acts on
//! every atom independently, and retrieval couples the atoms to backward
//! modes. Results are ground truth for the closed forms at small scale.

mod coupled;
mod ensemble;
mod integrator;
mod protocol;
mod stages;

pub use coupled::TrajectoryRow;
pub use ensemble::{Atom, DiscretizedEnsemble, ModeGrid};
pub use integrator::{ComplexSystem, Dopri5, Stats, Tolerances};
pub use protocol::{
    complex_rms, magnitude_rms, run_protocol_oracle, OracleConfig, OracleReport, OracleSchedule,
    PULSE_WINDOW,
};
pub use stages::{
    coupled_tolerances, integrate_absorption, integrate_absorption_with, integrate_pulse,
    integrate_pulse_with, integrate_retrieval, integrate_retrieval_with, pulse_tolerances,
    AbsorptionOutcome, PulseOutcome, RetrievalOutcome, TRAJECTORY_SAMPLES,
};
