//! Nonparametric combination of per-stratum partial tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::engine::{null_draws, Positions, Reference};
use super::result::{Method, NullSummary, TestResult};
use super::stratified::{stratum_differences, stratum_totals};
use crate::error::{Error, Result};
use crate::randomization::{pvalue, PermutationPlan, PlanMode, Tail, TIE_TOLERANCE};
use crate::trial::TrialData;

/// Function that merges partial p-values into one statistic; larger means more evidence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combiner {
    /// `-2 sum ln p`
    #[default]
    Fisher,
    /// `max(-ln p)`, the min-p rule.
    Tippett,
    /// `sum Phi^{-1}(1 - p)`
    Liptak,
}

impl Combiner {
    pub fn combine(self, p: &[f64]) -> f64 {
        match self {
            Combiner::Fisher => -2.0 * p.iter().map(|v| v.ln()).sum::<f64>(),
            Combiner::Tippett => p.iter().map(|v| -v.ln()).fold(f64::NEG_INFINITY, f64::max),
            Combiner::Liptak => {
                let normal = Normal::standard();
                p.iter().map(|v| normal.inverse_cdf(1.0 - v)).sum()
            }
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combiner::Fisher => "fisher",
            Combiner::Tippett => "tippett",
            Combiner::Liptak => "liptak",
        })
    }
}

impl FromStr for Combiner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fisher" => Ok(Combiner::Fisher),
            "tippett" | "min_p" | "minp" => Ok(Combiner::Tippett),
            "liptak" | "stouffer" => Ok(Combiner::Liptak),
            other => Err(format!("unknown combiner `{other}`")),
        }
    }
}

/// Upper-tail partial p-value of every value in `column` against the pool of
/// `observed` and all draws. Monte-Carlo pools give `#{pool >= v} / (B + 1)`,
/// never zero; an exact enumeration gives `#{draws >= v} / |S|`.
fn partial_pvalues(observed: f64, column: &[f64], mode: PlanMode) -> (f64, Vec<f64>) {
    let mut pool: Vec<f64> = column.to_vec();
    if mode == PlanMode::MonteCarlo {
        pool.push(observed);
    }
    pool.sort_by(f64::total_cmp);
    let total = pool.len() as f64;
    let p = |v: f64| {
        let below = pool.partition_point(|&x| x < v - TIE_TOLERANCE);
        ((pool.len() - below) as f64 / total).max(1.0 / total)
    };
    (p(observed), column.iter().map(|&v| p(v)).collect())
}

/// Combines `width` partial statistics (upper tail) observed once and drawn on
/// every row of `null` (row-major, rows aligned by shared re-randomization).
pub fn npc_combine(
    observed: &[f64],
    null: &[f64],
    width: usize,
    combiner: Combiner,
    mode: PlanMode,
) -> Result<TestResult> {
    if width == 0 || observed.len() != width {
        return Err(Error::LengthMismatch {
            what: "observed partial statistics",
            expected: width,
            got: observed.len(),
        });
    }
    if null.is_empty() || null.len() % width != 0 {
        return Err(Error::InvalidData(format!(
            "null draw matrix of length {} is not a nonempty multiple of {width}",
            null.len()
        )));
    }
    if observed.iter().chain(null).any(|v| v.is_nan()) {
        return Err(Error::Domain("partial statistic is NaN".into()));
    }
    let rows = null.len() / width;
    let mut obs_p = vec![0.0; width];
    let mut draw_p = vec![0.0; null.len()];
    for j in 0..width {
        let column: Vec<f64> = (0..rows).map(|b| null[b * width + j]).collect();
        let (po, pd) = partial_pvalues(observed[j], &column, mode);
        obs_p[j] = po;
        for (b, v) in pd.into_iter().enumerate() {
            draw_p[b * width + j] = v;
        }
    }
    let stat = combiner.combine(&obs_p);
    let combined: Vec<f64> = draw_p.chunks(width).map(|p| combiner.combine(p)).collect();
    let p = pvalue(stat, &combined, mode, Tail::Upper)?;
    let mut result = TestResult::new(Method::Npc, stat, p);
    result.null_summary = NullSummary::of(&combined);
    result.per_stratum = Some(observed.to_vec());
    result.partial_p = Some(obs_p);
    Ok(result)
}

/// Per-stratum `|d_j|` partial tests over shared stratified re-randomizations,
/// combined with `combiner`.
pub fn stratified_npc(data: &TrialData, plan: &PermutationPlan, combiner: Combiner) -> Result<TestResult> {
    let pos = Positions::new(data);
    pos.check_plan(plan)?;
    let j = pos.layout.n_strata();
    let totals = stratum_totals(&pos, &pos.y);
    let mut observed = vec![0.0; j];
    stratum_differences(&pos, &pos.y, &totals, &pos.treated, &mut observed);
    observed.iter_mut().for_each(|d| *d = d.abs());
    let draws = null_draws(plan, Reference::Assignments, j, |treated, out| {
        stratum_differences(&pos, &pos.y, &totals, treated, out);
        out.iter_mut().for_each(|d| *d = d.abs());
        false
    })?;
    npc_combine(&observed, &draws.values, j, combiner, draws.mode)
}
