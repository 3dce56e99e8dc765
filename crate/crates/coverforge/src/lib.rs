//! Finite-depth graph covers of zero-dimensional dynamical systems.
//!
//! A cover is a sequence of directed multigraphs joined by bonding maps;
//! its inverse limit carries the follow-the-arrow dynamics. This crate
//! builds such towers, translates them to and from ordered Bratteli
//! diagrams, S-adic systems, Rauzy-graph languages and Kakutani-Rokhlin
//! data, and evaluates dynamical criteria (chain transitivity, transitivity,
//! minimality, unique-ergodicity cone contraction, uniform rigidity,
//! linear recurrence, measure-count bounds) on finite truncations.
//!
//! Everything is exact: integer weights, integer winding matrices, rational
//! cone cross-ratios and rational interval arithmetic. Truncation-sensitive
//! questions come back as three-way verdicts rather than guesses.

pub mod analysis;
pub mod bratteli;
pub mod digraph;
pub mod dot;
pub mod dynamics;
pub mod format;
pub mod generate;
pub mod kr;
pub mod language;
pub mod sadic;
pub mod tower;
pub mod translate;

pub use analysis::{Verdict, VerdictStatus};
pub use digraph::{Arrow, ArrowId, ArrowLoop, ArrowPath, DiGraph, VertexId};
pub use dynamics::Thread;
pub use tower::{BondingMap, CoverTower, WindingMatrix};
