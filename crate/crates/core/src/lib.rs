//! Exact polynomial dynamical systems, quasi-chemical maps, reaction
//! networks, integration and Lyapunov exponents.

// `!(a < b)` is used deliberately so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod crn;
pub mod error;
pub mod lce;
pub mod polysys;
pub mod qcm;
pub mod rational;
pub mod sim;

pub use error::{Error, Result};
