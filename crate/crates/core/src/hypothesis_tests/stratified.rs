//! Stratified permutation tests that use only treatment and outcome.

use super::engine::{null_draws, Positions, Reference};
use super::result::{Method, NullSummary, TestResult};
use crate::error::Result;
use crate::randomization::{pvalue, PermutationPlan, Tail};
use crate::trial::TrialData;

/// Pooled treated-minus-control mean for the treated positions given.
pub(crate) fn pooled_difference(y: &[f64], total: f64, treated: &[usize]) -> f64 {
    let n = y.len() as f64;
    let nt = treated.len() as f64;
    let st: f64 = treated.iter().map(|&p| y[p]).sum();
    st / nt - (total - st) / (n - nt)
}

/// Per-stratum treated-minus-control means. `treated` lists positions stratum by stratum.
pub(crate) fn stratum_differences(pos: &Positions, y: &[f64], totals: &[f64], treated: &[usize], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for &p in treated {
        out[pos.stratum[p]] += y[p];
    }
    for (j, d) in out.iter_mut().enumerate() {
        let n = pos.layout.sizes()[j] as f64;
        let t = pos.layout.treated()[j] as f64;
        *d = *d / t - (totals[j] - *d) / (n - t);
    }
}

pub(crate) fn stratum_totals(pos: &Positions, y: &[f64]) -> Vec<f64> {
    let mut totals = vec![0.0; pos.layout.n_strata()];
    for (p, &v) in y.iter().enumerate() {
        totals[pos.stratum[p]] += v;
    }
    totals
}

fn diff_means_on(pos: &Positions, plan: &PermutationPlan, method: Method) -> Result<TestResult> {
    pos.check_plan(plan)?;
    let total: f64 = pos.y.iter().sum();
    let observed = pooled_difference(&pos.y, total, &pos.treated);
    let draws = null_draws(plan, Reference::Assignments, 1, |treated, out| {
        out[0] = pooled_difference(&pos.y, total, treated);
        false
    })?;
    let p = pvalue(observed, &draws.values, draws.mode, Tail::TwoSided)?;
    let mut result = TestResult::new(method, observed, p);
    result.null_summary = NullSummary::of(&draws.values);
    let totals = stratum_totals(pos, &pos.y);
    let mut per = vec![0.0; pos.layout.n_strata()];
    stratum_differences(pos, &pos.y, &totals, &pos.treated, &mut per);
    result.per_stratum = Some(per);
    Ok(result)
}

/// Difference in pooled means, re-randomizing treatment within strata.
pub fn stratified_diff_means(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    diff_means_on(&Positions::new(data), plan, Method::StratifiedDiffMeans)
}

/// The difference-in-means test applied to outcome minus baseline.
pub fn stratified_change_scores(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    let pos = Positions::new(data);
    let change: Vec<f64> = pos.y.iter().zip(&pos.x).map(|(y, x)| y - x).collect();
    diff_means_on(&pos.with_outcome(change), plan, Method::StratifiedChangeScores)
}

/// Sum over strata of the absolute within-stratum difference in means.
pub fn stratified_sum_abs(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    let pos = Positions::new(data);
    pos.check_plan(plan)?;
    let j = pos.layout.n_strata();
    let totals = stratum_totals(&pos, &pos.y);
    let mut per = vec![0.0; j];
    stratum_differences(&pos, &pos.y, &totals, &pos.treated, &mut per);
    let observed: f64 = per.iter().map(|d| d.abs()).sum();
    let draws = null_draws(plan, Reference::Assignments, 1, |treated, out| {
        let mut d = vec![0.0; j];
        stratum_differences(&pos, &pos.y, &totals, treated, &mut d);
        out[0] = d.iter().map(|v| v.abs()).sum();
        false
    })?;
    let p = pvalue(observed, &draws.values, draws.mode, Tail::Upper)?;
    let mut result = TestResult::new(Method::StratifiedSumAbs, observed, p);
    result.null_summary = NullSummary::of(&draws.values);
    result.per_stratum = Some(per);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomization::{PlanMode, StratumLayout};

    fn male_female() -> TrialData {
        // Controls all 0; treated +1 in stratum 1 and -1 in stratum 2.
        TrialData::new(
            &["m", "m", "m", "m", "f", "f", "f", "f"],
            vec![1, 1, 0, 0, 1, 1, 0, 0],
            vec![0.0; 8],
            vec![1.0, 1.0, 0.0, 0.0, -1.0, -1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn heterogeneous_effects_cancel_in_pooled_statistic() {
        let data = male_female();
        let plan = PermutationPlan::exact(data.layout());
        let r = stratified_diff_means(&data, &plan).unwrap();
        assert_eq!(r.statistic, 0.0);
        let r = stratified_sum_abs(&data, &plan).unwrap();
        assert_eq!(r.statistic, 2.0);
        // Labels sort as f < m, so stratum 0 is "f".
        assert_eq!(r.per_stratum.unwrap(), vec![-1.0, 1.0]);
        // |d_j| = 1 for 2 of the 6 assignments in each stratum.
        assert_eq!(r.p_value.exceedances, 4);
        assert_eq!(r.p_value.draws, 36);
    }

    #[test]
    fn constant_outcome_gives_unit_p() {
        let data = TrialData::new(
            &[1, 1, 1, 2, 2, 2],
            vec![1, 0, 0, 0, 1, 1],
            vec![0.3, 0.1, 0.2, 0.5, 0.4, 0.6],
            vec![2.5; 6],
        )
        .unwrap();
        let plan = PermutationPlan::monte_carlo(data.layout(), 200, 4).unwrap();
        for r in [
            stratified_diff_means(&data, &plan).unwrap(),
            stratified_sum_abs(&data, &plan).unwrap(),
        ] {
            assert_eq!(r.statistic, 0.0);
            assert_eq!(r.p(), 1.0);
        }
    }

    #[test]
    fn change_scores_with_zero_baseline_match_diff_means() {
        let data = TrialData::new(
            &["a", "a", "a", "b", "b", "b", "b"],
            vec![1, 0, 0, 1, 1, 0, 0],
            vec![0.0; 7],
            vec![1.2, 0.3, -0.4, 2.0, 0.1, 0.7, -1.1],
        )
        .unwrap();
        let plan = PermutationPlan::monte_carlo(data.layout(), 500, 17).unwrap();
        let a = stratified_diff_means(&data, &plan).unwrap();
        let mut b = stratified_change_scores(&data, &plan).unwrap();
        assert_eq!(b.method, Method::StratifiedChangeScores);
        b.method = a.method;
        assert_eq!(a, b);
    }

    #[test]
    fn change_scores_of_identical_baseline_are_null() {
        let y = vec![1.0, 2.0, 5.0, 3.0, 0.5, 4.0];
        let data = TrialData::new(&[1, 1, 1, 2, 2, 2], vec![1, 0, 1, 0, 1, 0], y.clone(), y)
            .unwrap();
        let plan = PermutationPlan::exact(data.layout());
        let r = stratified_change_scores(&data, &plan).unwrap();
        assert_eq!(r.p(), 1.0);
    }

    #[test]
    fn plan_layout_must_match() {
        let data = male_female();
        let other = StratumLayout::new(vec![4, 4], vec![1, 1]).unwrap();
        let plan = PermutationPlan::exact(other);
        assert!(stratified_diff_means(&data, &plan).is_err());
        assert_eq!(PermutationPlan::exact(data.layout()).mode, PlanMode::Exact);
    }
}
