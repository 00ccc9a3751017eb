//! Turtle walks on planar lattices driven by the digit expansion of a
//! number, with exact decision procedures for eventually periodic
//! expansions.
//!
//! A digit `z` turns the turtle by a fixed multiple of `2π/D` at the current
//! lattice point and then moves it one unit step. For rationals the digit
//! stream is eventually periodic, so the walk is a preamble followed by the
//! repeated image of one period under a rigid motion, which [`classify`]
//! resolves into a closed orbit or an unbounded drift.

pub mod classify;
pub mod digits;
pub mod equivalence;
pub mod error;
pub mod lattice;
pub mod report;
pub mod topology;
pub mod walk;

pub use digits::{EventuallyPeriodicDigits, Rational};
pub use error::{Error, Result};
pub use lattice::{Direction, GridSpec, Lattice, LatticePoint};
pub use walk::{Path, Scheme, TurnMap, TurnSign, WalkState};
