//! Two-photon interference with partially distinguishable photons and
//! non-number-resolving detectors.
//!
//! States live in [`fock`], optical elements and circuits in [`elements`],
//! the threshold-detector model in [`detection`], and the interferometer
//! layouts with delay scans and curve analysis in [`scenarios`]. [`oracle`]
//! recomputes circuit statistics by brute-force path enumeration and is used
//! to cross-check the rest. [`cli`] backs the `twophoton` binary.

pub mod cli;
pub mod detection;
pub mod elements;
pub mod error;
pub mod fock;
pub mod oracle;
pub mod scenarios;

pub use error::{Error, Result};
