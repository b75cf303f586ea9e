//! Primal-dual interior point method for semidefinite and linear programs,
//! with a simulated quantum Newton-step pipeline (exact solve, noisy norm
//! estimate, vector-state tomography).

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod format;
pub mod instance;
pub mod ipm;
pub mod lifted;
pub mod matspace;
pub mod newton;
pub mod qsim;
pub mod report;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
