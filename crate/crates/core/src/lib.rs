//! Linear optimization over the vertices of 0-1 and integral polytopes with
//! a list of forbidden points removed.

pub mod alldiff;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod integral;
pub mod lp;
pub mod lpformat;
pub mod oracle;
pub mod point;
pub mod problem;
pub mod rational;
pub mod separation;
pub mod system;
pub mod verify;
#[cfg(test)]
mod testkit;

pub use error::{FvxError, Result};
pub use geometry::{CubeFace, HPolytope, HRow, LatticeBox, Objective, Relation};
pub use point::{BinaryPoint, LatticePoint, Vertex};
pub use rational::Rational;
