use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use super::population::{generate_population, Population};
use crate::error::{Error, Result};
use crate::hypothesis_tests::{run_method, Method};
use crate::randomization::{derive_seed, stream, tag_of, PermutationPlan, Sampler, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub method: Method,
    /// Rejection rate at the scenario's alpha.
    pub rate: f64,
    /// `sqrt(rate (1 - rate) / R)`
    pub se: f64,
    pub rejections: usize,
    pub replications: usize,
}

impl PowerEstimate {
    pub fn new(method: Method, rejections: usize, replications: usize) -> Self {
        let rate = rejections as f64 / replications as f64;
        Self {
            method,
            rate,
            se: (rate * (1.0 - rate) / replications as f64).sqrt(),
            rejections,
            replications,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerStudy {
    pub scenario: String,
    pub alpha: f64,
    pub replications: usize,
    pub inner_b: usize,
    pub master_seed: u64,
    /// Mean over replications of the sample average treatment effect.
    pub mean_sample_ate: f64,
    pub estimates: Vec<PowerEstimate>,
}

impl PowerStudy {
    pub fn rate(&self, method: Method) -> Option<f64> {
        self.estimates.iter().find(|e| e.method == method).map(|e| e.rate)
    }
}

/// Population and assignment stream for replication `r`.
fn replication_stream(config: &ScenarioConfig, r: usize) -> Stream {
    stream(config.master_seed, r as u64)
}

fn replication_population(config: &ScenarioConfig, r: usize) -> Result<(Population, Stream)> {
    let mut rng = replication_stream(config, r);
    let pop = generate_population(config, &mut rng)?;
    Ok((pop, rng))
}

/// Mean sample ATE over `populations` fresh populations, drawn from the same
/// streams a power study uses.
pub fn mean_sample_ate(config: &ScenarioConfig, populations: usize) -> Result<f64> {
    config.validate()?;
    let total: f64 = (0..populations)
        .into_par_iter()
        .map(|r| replication_population(config, r).map(|(p, _)| p.sample_ate()))
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    Ok(total / populations as f64)
}

fn replicate(config: &ScenarioConfig, r: usize) -> Result<(Vec<bool>, f64)> {
    let layout = config.layout()?;
    let (pop, mut rng) = replication_population(config, r)?;
    let mut treated = Vec::new();
    Sampler::new(&layout).treated_positions(&mut rng, &mut treated);
    let mut z = vec![0u8; pop.len()];
    for p in treated {
        z[p] = 1;
    }
    let data = pop.observe(&z)?;
    let rep_seed = derive_seed(config.master_seed, r as u64);
    let rejects = config
        .tests
        .iter()
        .map(|&m| {
            let plan = PermutationPlan::monte_carlo(
                layout.clone(),
                config.inner_b,
                derive_seed(rep_seed, tag_of(m.name())),
            )?;
            Ok(run_method(m, &data, &plan)?.rejects(config.alpha))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok((rejects, pop.sample_ate()))
}

/// Rejection rates of every configured test over `R` replications, each with a
/// fresh population and a fresh stratified assignment.
pub fn run_power_study(config: &ScenarioConfig) -> Result<PowerStudy> {
    config.validate()?;
    let r_total = config.replications;
    let outcomes = (0..r_total)
        .into_par_iter()
        .map(|r| {
            replicate(config, r).map_err(|e| Error::Replication {
                replication: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![0usize; config.tests.len()];
    let mut ate = 0.0;
    for (rejects, a) in &outcomes {
        for (c, &hit) in counts.iter_mut().zip(rejects) {
            *c += usize::from(hit);
        }
        ate += a;
    }
    Ok(PowerStudy {
        scenario: config.id.clone(),
        alpha: config.alpha,
        replications: r_total,
        inner_b: config.inner_b,
        master_seed: config.master_seed,
        mean_sample_ate: ate / r_total as f64,
        estimates: config
            .tests
            .iter()
            .zip(counts)
            .map(|(&m, c)| PowerEstimate::new(m, c, r_total))
            .collect(),
    })
}

/// Each estimate's rate divided by the reference (ANCOVA) rate.
pub fn power_ratio_table(estimates: &[PowerEstimate], reference: &PowerEstimate) -> Result<Vec<(Method, f64)>> {
    if reference.rate <= 0.0 {
        return Err(Error::UndefinedRatio);
    }
    Ok(estimates.iter().map(|e| (e.method, e.rate / reference.rate)).collect())
}
