//! Exact calculator for contact-homology invariants of subcritical Stein
//! domains, with numerical checks of Reeb dynamics on quadratic handles.
//!
//! Modules, bottom-up:
//!
//! - [`graded_algebra`]: graded dimension vectors and truncated Poincaré series;
//! - [`morse`]: rational Morse complexes and their homology;
//! - [`stein_hc`]: cylindrical/full contact homology, gradings, pairings;
//! - [`handle_dynamics`]: Reeb flow on the standard contact handle;
//! - [`prequant`]: Morse–Bott gradings of a prequantization bundle;
//! - [`polarization`]: Betti-number relations for subcritical polarizations.

pub mod graded_algebra;
pub mod handle_dynamics;
pub mod linalg;
pub mod morse;
pub mod polarization;
pub mod prequant;
pub mod rational;
pub mod stein_hc;

pub use graded_algebra::{GradedDims, PoincareSeries};
pub use morse::MorseComplex;
pub use rational::{Degree, Rational};
pub use stein_hc::SteinDomainSpec;
