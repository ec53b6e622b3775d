use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal, StudentT};

use super::config::{ErrorDist, Family, Latent, ScenarioConfig};
use crate::error::{Error, Result};
use crate::trial::TrialData;

/// Latent variate for a unit in stratum `j` (0-based).
pub fn draw_latent<R: Rng + ?Sized>(latent: Latent, j: usize, rng: &mut R) -> Result<f64> {
    let (lo, hi) = match (latent, j) {
        (Latent::Homogeneous, _) => (-4.0, 4.0),
        (Latent::Heterogeneous, 0) => (-4.0, -1.0),
        (Latent::Heterogeneous, 1) => (-1.0, 1.0),
        (Latent::Heterogeneous, 2) => (1.0, 4.0),
        (Latent::Heterogeneous, _) => {
            return Err(Error::Domain(format!(
                "heterogeneous latent variables are defined for strata 0..3, got {j}"
            )))
        }
    };
    Ok(rng.random_range(lo..=hi))
}

/// One disturbance. `x` is the realized baseline, required by the
/// heteroskedastic distribution.
pub fn draw_error<R: Rng + ?Sized>(dist: ErrorDist, x: Option<f64>, rng: &mut R) -> Result<f64> {
    let z: f64 = match dist {
        ErrorDist::Normal => rng.sample(StandardNormal),
        ErrorDist::HeteroskedasticNormal => {
            let x = x.ok_or_else(|| {
                Error::Domain("heteroskedastic errors need the baseline value".into())
            })?;
            let sd = if x.abs() <= 1.0 { 1.0 } else { 2.0 };
            sd * rng.sample::<f64, _>(StandardNormal)
        }
        ErrorDist::T2 => StudentT::new(2.0).expect("valid df").sample(rng),
        ErrorDist::Lognormal => rng.sample::<f64, _>(StandardNormal).exp(),
        ErrorDist::ShiftedExponential => rng.sample::<f64, _>(Exp1) - 1.0,
    };
    Ok(z)
}

/// Units of one simulated trial, stored stratum by stratum.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub stratum: Vec<usize>,
    pub v: Vec<f64>,
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
    pub x: Vec<f64>,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn unit_effects(&self) -> Vec<f64> {
        self.y1.iter().zip(&self.y0).map(|(a, b)| a - b).collect()
    }

    /// Mean of `Y(1) - Y(0)` over the units.
    pub fn sample_ate(&self) -> f64 {
        self.unit_effects().iter().sum::<f64>() / self.len() as f64
    }

    /// Observed outcomes `Z Y(1) + (1 - Z) Y(0)`.
    pub fn observe(&self, z: &[u8]) -> Result<TrialData> {
        if z.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "assignment",
                expected: self.len(),
                got: z.len(),
            });
        }
        let y = z
            .iter()
            .enumerate()
            .map(|(i, &t)| if t == 1 { self.y1[i] } else { self.y0[i] })
            .collect();
        TrialData::new(&self.stratum, z.to_vec(), self.x.clone(), y)
    }
}

fn draw_units<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
    baseline: impl Fn(f64, f64) -> f64,
    outcome: impl Fn(f64, f64, f64, u8) -> f64,
) -> Result<Population> {
    let n: usize = config.sizes.iter().sum();
    let mut p = Population {
        stratum: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        eps: Vec::with_capacity(n),
        delta: Vec::with_capacity(n),
        x: Vec::with_capacity(n),
        y0: Vec::with_capacity(n),
        y1: Vec::with_capacity(n),
    };
    // The baseline disturbance is standard normal under heteroskedastic errors.
    let eps_dist = match config.error_dist {
        ErrorDist::HeteroskedasticNormal => ErrorDist::Normal,
        d => d,
    };
    for (j, &nj) in config.sizes.iter().enumerate() {
        for _ in 0..nj {
            let v = draw_latent(config.latent, j, rng)?;
            let eps = draw_error(eps_dist, None, rng)?;
            let x = baseline(v, eps);
            let delta = draw_error(config.error_dist, Some(x), rng)?;
            p.stratum.push(j);
            p.v.push(v);
            p.eps.push(eps);
            p.delta.push(delta);
            p.x.push(x);
            p.y0.push(outcome(v, x, delta, 0));
            p.y1.push(outcome(v, x, delta, 1));
        }
    }
    Ok(p)
}

/// `X = (-gamma e^v + e^{v/2}) / 2 + eps`, `Y(Z) = ((2Z - 1) gamma e^v + e^{v/2}) / 2 + delta`.
pub fn generate_continuous_population<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<Population> {
    let g = config.gamma;
    draw_units(
        config,
        rng,
        |v, eps| (-g * v.exp() + (v / 2.0).exp()) / 2.0 + eps,
        |v, _, delta, z| ((2.0 * f64::from(z) - 1.0) * g * v.exp() + (v / 2.0).exp()) / 2.0 + delta,
    )
}

/// Continuous population with `X`, `Y(0)`, `Y(1)` truncated to integers.
pub fn generate_discrete_population<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<Population> {
    let mut p = generate_continuous_population(config, rng)?;
    let t = config.truncation;
    for v in p.x.iter_mut().chain(p.y0.iter_mut()).chain(p.y1.iter_mut()) {
        *v = t.apply(*v);
    }
    Ok(p)
}

/// `(1 + gamma)^Z X + delta`
pub fn nonlinear_outcome(gamma: f64, x: f64, delta: f64, z: u8) -> f64 {
    (1.0 + gamma).powi(i32::from(z)) * x + delta
}

/// `X = (e^v + e^{v/2}) / 2 + eps`, `Y(Z) = (1 + gamma)^Z X + delta`.
pub fn generate_nonlinear_population<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<Population> {
    let g = config.gamma;
    draw_units(
        config,
        rng,
        |v, eps| (v.exp() + (v / 2.0).exp()) / 2.0 + eps,
        |_, x, delta, z| nonlinear_outcome(g, x, delta, z),
    )
}

pub fn generate_population<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<Population> {
    match config.family {
        Family::Continuous => generate_continuous_population(config, rng),
        Family::Discrete => generate_discrete_population(config, rng),
        Family::Nonlinear => generate_nonlinear_population(config, rng),
    }
}
