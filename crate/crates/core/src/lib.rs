//! Photon-echo quantum memory in an inhomogeneously broadened Λ medium.
//!
//! A single-photon wave packet is absorbed on the |1⟩–|3⟩ line, moved to the
//! long-lived level |2⟩ by a sech control pulse, returned by a second,
//! counter-propagating pulse, and re-emitted backward as an echo. The crate
//! evaluates each stage in closed form ([`mapping`], [`control`], [`echo`])
//! and provides a brute-force integrator of the underlying amplitude
//! equations ([`oracle`]) to check them.

pub mod control;
pub mod echo;
mod error;
pub mod mapping;
pub mod numerics;
pub mod oracle;

pub use error::{Error, Result};
