//! Simulated trials and Monte-Carlo power studies.

mod config;
mod population;
mod power;

pub use config::{ErrorDist, Family, Latent, ScenarioConfig, Truncation};
pub use population::{
    draw_error, draw_latent, generate_continuous_population, generate_discrete_population,
    generate_nonlinear_population, generate_population, nonlinear_outcome, Population,
};
pub use power::{mean_sample_ate, power_ratio_table, run_power_study, PowerEstimate, PowerStudy};
