//! Exact machinery for hyperplane Schmidt games on the unipotent chart of
//! `SL_{d+1}(R)/SL_{d+1}(Z)`: weighted badly approximable certificates,
//! dual-vector and line attachments, the level-by-level winning strategy,
//! game referees, and a systole simulator for the diagonal flow.

pub mod attachments;
pub mod cli;
pub mod diophantine;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod game;
pub mod serde_util;
pub mod strategy;
pub mod verify;

pub use error::{Error, Result};
pub use exact::{Ball, HyperplaneNbhd, Rational};
