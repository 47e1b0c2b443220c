//! Exact rational and cyclotomic arithmetic.

pub mod cyclotomic;
pub mod rat;

pub use cyclotomic::{cyclotomic_poly, CycNum};
pub use rat::{den_u64, floor_i64, fmt_rat, int, parse_rat, rat, Rat};
