//! Game-theoretic model of positional education competition.
//!
//! A score threshold set by the competitors' own score distribution turns
//! education into a positional good: each family's best response to the
//! cutoff raises everyone's cutoff next round. The crate provides:
//!
//! - [`model`]: score, cost, threshold, and utility primitives;
//! - [`equilibrium`]: two-family best responses, the 2x2 obey/disobey game,
//!   dominance analysis, and best-response dynamics;
//! - [`population`]: the N-family threshold-feedback simulator with welfare
//!   accounting;
//! - [`signaling`]: the wage-based participation extension with a perceived
//!   credential-premium bias;
//! - [`policy`]: scenario runs (open exam, diversion, bias reduction, exam
//!   redesign) and welfare/equity comparisons;
//! - [`export`]: deterministic CSV / JSON-lines / markdown emitters.

pub mod equilibrium;
pub mod error;
pub mod export;
pub mod model;
pub mod policy;
pub mod population;
pub mod signaling;

pub use error::{Error, Result};
pub use model::{Effort, FamilyParams, Rationality, ThresholdSpec, T_HARD_CAP_DEFAULT};
