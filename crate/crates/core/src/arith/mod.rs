//! Prime fields, multi-indices and polynomials.

pub mod field;
pub mod multi_index;
pub mod poly;
pub mod unipoly;
