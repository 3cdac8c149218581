//! Small-time heat content of closed curves in R³.
//!
//! The crate evaluates `H_S(t)` for smooth closed curves three ways: the
//! Laplace-method series, direct quadrature, and the heat content of a
//! thin Frenet tube around the curve. Oracles for the circle are included.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod curve;
pub mod error;
pub mod heat;
pub mod laplace;
pub mod numerics;
pub mod phase;
pub mod tube;

pub use error::{Error, Result};
