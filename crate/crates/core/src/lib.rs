//! Option pricing under binomial, Black-Scholes-Merton, Bachelier and logistic
//! models, with a Monte-Carlo engine and a numerical verification suite that
//! cross-check the closed forms against each other.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bench;
pub mod binomial;
pub mod csvio;
mod error;
pub mod greeks;
pub mod mcpricer;
pub mod normal;
pub mod pricing;
pub mod stochastic;
mod types;
pub mod verify;

pub use error::{PricingError, Result, Violation, ViolationCode};
pub use types::{ensure_valid, validate, ExerciseStyle, ModelParams, ModelTag, OptionKind, OptionSpec, PricingResult};
