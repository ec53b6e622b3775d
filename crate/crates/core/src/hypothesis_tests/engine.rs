//! Parallel evaluation of a statistic over a reference set of re-randomizations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::randomization::{
    stream, AssignmentSpace, PermutationPlan, PermutationSpace, PlanMode, Sampler, StratumLayout,
};
use crate::trial::TrialData;

/// What a single draw re-randomizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reference {
    /// A fresh stratified treatment assignment, given as treated positions.
    Assignments,
    /// A within-stratum permutation, given as a source map over positions.
    Permutations,
}

/// Null draws stored row-major, `width` statistics per draw.
#[derive(Debug, Clone)]
pub(crate) struct NullDraws {
    pub values: Vec<f64>,
    pub degenerate: usize,
    pub mode: PlanMode,
}

const MIN_CHUNK: usize = 64;

/// Evaluates `stat` on every draw of the plan's reference set. `stat` writes
/// `width` values and returns true when the draw was degenerate.
pub(crate) fn null_draws<F>(
    plan: &PermutationPlan,
    reference: Reference,
    width: usize,
    stat: F,
) -> Result<NullDraws>
where
    F: Fn(&[usize], &mut [f64]) -> bool + Sync,
{
    let layout = &plan.layout;
    let n = layout.n_units();
    let (rows, exact) = match plan.mode {
        PlanMode::MonteCarlo => (plan.draws, None),
        PlanMode::Exact => {
            let space = match reference {
                Reference::Assignments => Space::Assignments(AssignmentSpace::new(layout, plan.exact_cap)?),
                Reference::Permutations => {
                    Space::Permutations(PermutationSpace::new(layout, plan.exact_cap)?)
                }
            };
            (space.len() as usize, Some(space))
        }
    };
    if rows == 0 {
        return Err(Error::Empty("reference set has no draws"));
    }

    let mut values = vec![0.0; rows * width];
    let degenerate: usize = values
        .par_chunks_mut(width)
        .with_min_len(MIN_CHUNK)
        .enumerate()
        .map_init(
            || {
                (
                    Sampler::new(layout),
                    vec![0usize; n],
                    vec![0usize; layout.n_strata()],
                )
            },
            |(sampler, buf, digits), (b, row)| {
                match (&exact, reference) {
                    (None, Reference::Assignments) => {
                        let mut rng = stream(plan.seed, b as u64);
                        sampler.treated_positions(&mut rng, buf);
                        stat(buf, row) as usize
                    }
                    (None, Reference::Permutations) => {
                        let mut rng = stream(plan.seed, b as u64);
                        buf.resize(n, 0);
                        sampler.permutation(&mut rng, buf);
                        stat(buf, row) as usize
                    }
                    (Some(Space::Assignments(space)), _) => {
                        space.treated_positions(b as u64, digits, buf);
                        stat(buf, row) as usize
                    }
                    (Some(Space::Permutations(space)), _) => {
                        buf.resize(n, 0);
                        space.permutation(b as u64, digits, buf);
                        stat(buf, row) as usize
                    }
                }
            },
        )
        .sum();

    Ok(NullDraws {
        values,
        degenerate,
        mode: plan.mode,
    })
}

enum Space {
    Assignments(AssignmentSpace),
    Permutations(PermutationSpace),
}

impl Space {
    fn len(&self) -> u64 {
        match self {
            Space::Assignments(s) => s.len(),
            Space::Permutations(s) => s.len(),
        }
    }
}

/// Trial data rearranged stratum-contiguously so that positions match the
/// layout used by the samplers and enumerators.
#[derive(Debug, Clone)]
pub(crate) struct Positions {
    /// Unit index stored at each position.
    pub order: Vec<usize>,
    pub layout: StratumLayout,
    pub offsets: Vec<usize>,
    pub stratum: Vec<usize>,
    pub y: Vec<f64>,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    /// Observed treated positions.
    pub treated: Vec<usize>,
}

impl Positions {
    pub fn new(data: &TrialData) -> Self {
        let order: Vec<usize> = data.members().iter().flatten().copied().collect();
        let layout = data.layout();
        let gather = |v: &[f64]| order.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let z: Vec<f64> = order.iter().map(|&i| f64::from(data.treatment()[i])).collect();
        let treated = (0..z.len()).filter(|&p| z[p] == 1.0).collect();
        Self {
            order: order.clone(),
            offsets: layout.offsets(),
            stratum: layout.stratum_of_units(),
            layout,
            y: gather(data.outcome()),
            x: gather(data.baseline()),
            z,
            treated,
        }
    }

    pub fn with_outcome(&self, y: Vec<f64>) -> Self {
        Self { y, ..self.clone() }
    }

    /// Reorders a unit-indexed vector into positions.
    pub fn gather(&self, v: &[f64]) -> Vec<f64> {
        self.order.iter().map(|&i| v[i]).collect()
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn check_plan(&self, plan: &PermutationPlan) -> Result<()> {
        if plan.layout != self.layout {
            return Err(Error::InvalidLayout(format!(
                "plan layout {:?}/{:?} does not match the data layout {:?}/{:?}",
                plan.layout.sizes(),
                plan.layout.treated(),
                self.layout.sizes(),
                self.layout.treated()
            )));
        }
        Ok(())
    }

    /// Values centred within each stratum.
    pub fn center(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        for (j, &n) in self.layout.sizes().iter().enumerate() {
            let seg = &mut out[self.offsets[j]..self.offsets[j] + n];
            let mean = seg.iter().sum::<f64>() / n as f64;
            seg.iter_mut().for_each(|x| *x -= mean);
        }
        out
    }
}
