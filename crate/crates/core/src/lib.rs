//! Exact combinatorics of twisted irregular classes.

pub mod arith;
pub mod config;
pub mod error;
pub mod fission;
pub mod gen;
pub mod levels;
pub mod puiseux;
pub mod skeleton;
pub mod symmetry;
pub mod tree;

pub use arith::{CycNum, Rat};
pub use error::{Error, Result};
