//! Closed-form pricers and the logistic model's primal/dual function family.

mod bachelier;
mod bsm;
pub mod legendre;
pub mod logistic;

pub use bachelier::{bachelier_binary_put, bachelier_call, bachelier_put, normal_put_value};
pub use bsm::bsm_price;
pub use logistic::{
    delta_of_z, dual_excess_price, dual_put_value, entropy, eta_delta, eta_z, logistic_binary_put, logistic_call,
    logistic_local_vol, logistic_put, pi, pi_star, scale, softplus, z_of_delta,
};
