//! Postural synergies for multi-fingered hands, restricted to the joints of
//! the fingers that carry a manipulation function.
//!
//! The crate covers the hand model, PCA synergy fitting and projection, the
//! XYZ movement-unit notation with its M/F function units, synergy
//! construction, a phase-switching runtime and a simulated task harness.

pub mod dataio;
pub mod error;
pub mod fdms;
pub mod hand;
pub mod notation;
pub mod simtasks;
pub mod switching;
pub mod synergy;

pub use error::{Error, Result};
