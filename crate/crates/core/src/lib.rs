//! Orientation-preserving transformations of dense rational chains.
//!
//! Maps are finite piecewise rules (constants and increasing fractional-linear
//! pieces) over a chain of rationals with a minimum, a maximum, or both. The crate
//! classifies such maps, and factors every orientation-preserving map into
//! order-preserving maps plus a single fixed generator, returning a checkable
//! witness word.

pub mod chain;
pub mod classify;
pub mod cli;
pub mod error;
pub mod factorize;
pub mod iso;
pub mod oracle;
pub mod ptrans;
pub mod random;
pub mod rational;

pub use chain::{ChainModel, ConvexSet};
pub use error::{Error, Result};
pub use iso::{MapAtom, Mobius};
pub use ptrans::{ImageHull, Piece, PiecewiseMap};
pub use rational::{q, ExtPoint, Rational};
