//! Monte Carlo simulation of the killed chain with chunked, reproducible
//! random streams.

mod estimate;
mod sim;

pub use estimate::{
    check_reversed_time, dkw_epsilon, estimate_conditional_cdf, estimate_lambda_ratio,
    estimate_persistence, estimate_survival_curve, ConditionalCdf, MCEstimate, ReversedTimeReport,
};
pub use sim::{
    chunk_rng, simulate_forced, simulate_path, InnovationSampler, MCConfig, SimulatedPath,
};
