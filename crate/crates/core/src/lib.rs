//! Computational toolkit for polynomial Rado equations: intersective polynomials,
//! p-adic lifting, regularity criteria, exponential sums, W-trick weights,
//! solution counting and polynomial Bohr sets.

pub mod arith;
pub mod bohr;
pub mod error;
pub mod expsums;
pub mod intersective;
pub mod congruence;
pub mod counting;
pub mod polyring;
pub mod regularity;
pub mod wtrick;

pub use error::{Error, Result};
pub use polyring::IntPoly;
