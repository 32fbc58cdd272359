//! Evolutionary games on finite regular graphs viewed as perturbations of
//! the voter model.
//!
//! The crate computes fixation probabilities of the death-birth and imitation
//! chains three independent ways and lets them check one another:
//!
//! * [`exact`]: full `2^N` state-space linear solves (small graphs),
//! * [`montecarlo`]: reproducible parallel simulation of the jump chain,
//! * [`closedform`]: the first-order expansion in the intensity of selection,
//!   whose coefficient is assembled in [`coalescent`] from random-walk
//!   meeting times.

pub mod closedform;
pub mod coalescent;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod graph;
mod linsolve;
pub mod montecarlo;
pub mod perturbation;

pub use dynamics::{ChainSpec, Config, PayoffMatrix, Rule};
pub use error::{Error, Result};
pub use graph::{Graph, GraphKind};
