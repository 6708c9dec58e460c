//! Transmission spectra of a whispering-gallery-mode ring resonator with a
//! chirally coupled quantum emitter and a backscattering defect.
//!
//! Four descriptions are provided: a transfer-matrix model of the ring,
//! closed-form single-photon transport, the semiclassical cavity-QED steady
//! state and the full Lindblad master equation.

pub mod config;
pub mod cqed;
pub mod error;
pub mod model;
pub mod numerics;
pub mod output;
pub mod report;
pub mod spt;
pub mod sweep;
pub mod tm;

pub use error::{Error, Result};
