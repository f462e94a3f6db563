//! Symbolic construction and numerical verification of reduction identities
//! for signed cyclic sums of Mordell–Tornheim zeta and L-values.

pub mod arith;
pub mod bernprod;
pub mod dirichlet;
pub mod error;
pub mod mzv;
pub mod numerics;
pub mod partitions;
pub mod reduction;
pub mod symexpr;

pub use error::{Error, Result};
