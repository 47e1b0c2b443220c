//! Exponential factors, their Galois action, pointed types and classes.

pub mod factor;
pub mod parse;
pub mod pointed;

pub use factor::ExpFactor;
pub use parse::{parse_class, parse_cyc, parse_factor, parse_input, parse_type, Input};
pub use pointed::{classify, pair_compatible, point, pullback, pullback_factor, rotate_tpoly, IrregularClass, PointedIrregularType, TPoly};
