//! Exact combinatorial calculus of James-Hopf maps.
//!
//! Group classes in `K_n(k)` are evaluated in the coordinate ring `R_{n,k}`
//! (see [`coordinate_ring`]), where every identity of the calculus can be
//! checked by exact integer arithmetic.

pub mod coordinate_ring;
pub mod error;
pub mod group_words;
pub mod james_hopf;
pub mod lie_idempotent;
pub mod report;
pub mod series_decomp;
pub mod shuffle_maps;

pub use coordinate_ring::{CoordinateSeries, Monomial, RingContext, TupleLetter};
pub use error::{Error, Result};
pub use group_words::{commutator, GeneratorPower, GroupWord};
