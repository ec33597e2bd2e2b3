//! Exact linear algebra over `F_p`, `F_p[s]` and polynomial rings.

pub mod fp;
pub mod matrix;
pub mod pid;
