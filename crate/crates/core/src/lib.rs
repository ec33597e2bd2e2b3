//! Exact algebra of stratified bundles on affine spaces over prime fields.
//!
//! The library is generic over a [`PrimeField`]; `F2`, `F3`, `F5` and `F7`
//! are the concrete fields used at desk scale.

pub mod arith;
pub mod connection;
pub mod diffop;
pub mod error;
pub mod gaussmanin;
pub mod linalg;
pub mod stratification;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod tower;

pub use arith::field::{Fp, Prime, PrimeField, DEFAULT_PRIME_BOUND};
pub use arith::multi_index::{binomial_mod, lucas_binomial, MultiIndex};
pub use arith::poly::{vars_from, Poly, Vars};
pub use arith::unipoly::UniPoly;
pub use connection::{Connection, Frame};
pub use diffop::DiffOperator;
pub use error::{Error, Result};
pub use gaussmanin::{GMTower, RelativeH0Module, RelativeSplit};
pub use linalg::matrix::{PolyMatrix, PolyVector};
pub use stratification::Stratification;
pub use tower::{descend_tower, gauge_equivalent, GaugeWitness, H0Str, Mode, Tower, TruncatedH0};

pub type F2 = Fp<2>;
pub type F3 = Fp<3>;
pub type F5 = Fp<5>;
pub type F7 = Fp<7>;

pub type Poly2 = Poly<F2>;
pub type Poly3 = Poly<F3>;
pub type Poly5 = Poly<F5>;
pub type Poly7 = Poly<F7>;
