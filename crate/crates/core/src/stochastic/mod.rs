//! Random-path machinery: reproducible streams, Brownian / GBM / local-vol
//! path generation, Brownian bridges and pathwise statistics.

mod grid;
mod paths;
mod rng;
mod stats;

pub use grid::TimeGrid;
pub use paths::{
    binomial_paths, brownian_bridge, euler_local_vol, gbm_exact, logistic_vol_fn, sample_brownian, scaled_random_walk,
    PathBatch,
};
pub(crate) use paths::{brownian_fill, euler_walk};
pub use rng::{RngStream, StreamRng};
pub use stats::{ito_sum, quadratic_variation, reflection_probability, stochastic_exponential, ReflectionEstimate};
