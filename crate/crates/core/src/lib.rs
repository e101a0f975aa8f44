//! Thermodynamic formalism for sub-additive potential sequences on truncated
//! countable Markov and sofic shifts.
//!
//! Shifts are finite edge graphs ([`ShiftSpace`]) with an optional one-block
//! symbol map; potentials are log-sup cylinder weights ([`WeightSystem`]).
//! On top of those sit pressure brackets, Gibbs-measure tables, factor maps
//! and matrix cocycles.

pub mod cli;
pub mod cocycle;
pub mod error;
pub mod factor;
pub mod gibbs;
pub mod numeric;
pub mod parallel;
pub mod potential;
pub mod pressure;
pub mod shift;
pub mod transfer;
pub mod word;

pub use error::{Error, Result};
pub use potential::WeightSystem;
pub use shift::ShiftSpace;
pub use word::{Symbol, Word};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
