//! Steady-state numerics for the Erlang-A and Erlang-C queues, their
//! piecewise diffusion approximation and the Stein-method error terms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ctmc;
pub mod diffusion;
pub mod error;
pub mod metrics;
pub mod model;
pub mod poisson;
pub mod quad;
pub mod special;
pub mod stein_verify;

pub use error::{Error, Result};
pub use model::{Model, ModelParams, Regime};
