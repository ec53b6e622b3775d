//! ANCOVA and the linear-model permutation tests.
//!
//! Observed statistics come from full QR fits. Null draws use the partialled
//! form of the treatment t statistic: with `M` the residual maker of the
//! stratum indicators plus baseline, `t = z'My / sqrt(z'Mz) / sqrt(rss / df)`,
//! where every term is an O(N) inner product once `My`, `Mz` and the
//! within-stratum centred baseline are known.

use super::engine::{null_draws, Positions, Reference};
use super::result::{Flag, Method, NullSummary, TestResult};
use crate::error::{Error, Result};
use crate::linear_model::{
    build_design, fit_least_squares, stratum_columns, student_t_two_sided_p, ColumnKind,
    DesignMatrix, LeastSquaresFit, DEGENERATE_RSS,
};
use crate::randomization::{pvalue, PValue, PermutationPlan, Tail};
use crate::trial::TrialData;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `sum_p a[p] * b[src[p]]`
fn dot_permuted(a: &[f64], b: &[f64], src: &[usize]) -> f64 {
    a.iter().zip(src).map(|(x, &s)| x * b[s]).sum()
}

/// Quantities shared by the regression-based permutation tests.
struct Partialled {
    pos: Positions,
    /// Baseline centred within strata.
    xc: Vec<f64>,
    xx: f64,
    /// Null-model residuals `My` (positions).
    resid: Vec<f64>,
    resid_ss: f64,
    /// `Mz` for the observed assignment.
    zt: Vec<f64>,
    zz: f64,
    /// `z'z` after centring within strata; identical for every stratified assignment.
    zcc: f64,
    y_norm2: f64,
    df: f64,
    n_treated: f64,
    full: LeastSquaresFit,
    null: LeastSquaresFit,
}

impl Partialled {
    fn new(data: &TrialData, plan: &PermutationPlan) -> Result<Self> {
        let pos = Positions::new(data);
        pos.check_plan(plan)?;
        let full = fit_least_squares(&build_design(data, true), data.outcome())?;
        let null = fit_least_squares(&build_design(data, false), data.outcome())?;
        let xc = pos.center(&pos.x);
        let xx = dot(&xc, &xc);
        let resid = pos.gather(&null.residuals);
        let resid_ss = dot(&resid, &resid);
        let zc = pos.center(&pos.z);
        let beta = dot(&xc, &zc) / xx;
        let zt: Vec<f64> = zc.iter().zip(&xc).map(|(z, x)| z - beta * x).collect();
        let zz = dot(&zt, &zt);
        let zcc = pos
            .layout
            .sizes()
            .iter()
            .zip(pos.layout.treated())
            .map(|(&n, &t)| (t * (n - t)) as f64 / n as f64)
            .sum();
        let y_norm2 = dot(&pos.y, &pos.y);
        Ok(Self {
            df: full.df as f64,
            n_treated: pos.treated.len() as f64,
            pos,
            xc,
            xx,
            resid,
            resid_ss,
            zt,
            zz,
            zcc,
            y_norm2,
            full,
            null,
        })
    }

    /// Treatment t statistic from its partialled pieces; `resid_ss` is `||My||^2`.
    fn t(&self, num: f64, zz: f64, resid_ss: f64) -> f64 {
        let rss = resid_ss - num * num / zz;
        if rss <= DEGENERATE_RSS * self.y_norm2 {
            if (num / zz).abs() * self.n_treated.sqrt() <= 1e-10 * self.y_norm2.sqrt() {
                0.0
            } else {
                f64::INFINITY.copysign(num)
            }
        } else {
            num / zz.sqrt() / (rss / self.df).sqrt()
        }
    }

    fn observed_t(&self) -> f64 {
        self.full.treatment_t.expect("full design has a treatment column")
    }

    fn finish(&self, method: Method, observed: f64, values: &[f64], mode: crate::randomization::PlanMode) -> Result<TestResult> {
        let p = pvalue(observed, values, mode, Tail::TwoSided)?;
        let mut r = TestResult::new(method, observed, p);
        r.null_summary = NullSummary::of(values);
        r.df = Some(self.full.df);
        if self.full.degenerate {
            r.flags.push(Flag::ZeroResidualVariance);
        }
        Ok(r)
    }
}

/// Parametric ANCOVA: treatment t statistic referred to Student t on `N - J - 2` df.
pub fn ancova_parametric(data: &TrialData) -> Result<TestResult> {
    let fit = fit_least_squares(&build_design(data, true), data.outcome())?;
    if fit.df == 0 {
        return Err(Error::Domain(
            "ANCOVA has no residual degrees of freedom".into(),
        ));
    }
    let t = fit.treatment_t.expect("treatment column present");
    let mut result = if fit.degenerate {
        let p = if t == 0.0 { 1.0 } else { 0.0 };
        let mut r = TestResult::new(Method::Ancova, t, PValue::analytic(p));
        r.flags.push(Flag::ZeroResidualVariance);
        r
    } else {
        let p = student_t_two_sided_p(t, fit.df as u64)?;
        TestResult::new(Method::Ancova, t, PValue::analytic(p))
    };
    result.df = Some(fit.df);
    Ok(result)
}

/// Treatment t statistic re-computed under re-randomized treatment, X and Y fixed.
pub fn lm_permutation(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    let m = Partialled::new(data, plan)?;
    let draws = null_draws(plan, Reference::Assignments, 1, |treated, out| {
        let num: f64 = treated.iter().map(|&p| m.resid[p]).sum();
        let zx: f64 = treated.iter().map(|&p| m.xc[p]).sum();
        let zz = m.zcc - zx * zx / m.xx;
        if zz <= 1e-20 * m.zcc {
            out[0] = 0.0;
            return true;
        }
        out[0] = m.t(num, zz, m.resid_ss);
        false
    })?;
    let mut r = m.finish(Method::LmPermutation, m.observed_t(), &draws.values, draws.mode)?;
    r.degenerate_draws = draws.degenerate;
    if draws.degenerate > 0 {
        r.flags.push(Flag::SingularPermutedDesigns(draws.degenerate));
    }
    Ok(r)
}

/// Freedman-Lane: permute null-model residuals within strata, add them back to
/// the null fitted values, and refit with treatment.
pub fn freedman_lane(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    let m = Partialled::new(data, plan)?;
    let draws = null_draws(plan, Reference::Permutations, 1, |src, out| {
        let num = dot_permuted(&m.zt, &m.resid, src);
        let xe = dot_permuted(&m.xc, &m.resid, src);
        out[0] = m.t(num, m.zz, m.resid_ss - xe * xe / m.xx);
        false
    })?;
    m.finish(Method::FreedmanLane, m.observed_t(), &draws.values, draws.mode)
}

/// Manly: permute raw outcomes within strata against fixed (X, Z).
pub fn manly_test(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    let m = Partialled::new(data, plan)?;
    let yc = m.pos.center(&m.pos.y);
    let ycc = dot(&yc, &yc);
    let draws = null_draws(plan, Reference::Permutations, 1, |src, out| {
        let num = dot_permuted(&m.zt, &yc, src);
        let xy = dot_permuted(&m.xc, &yc, src);
        out[0] = m.t(num, m.zz, ycc - xy * xy / m.xx);
        false
    })?;
    m.finish(Method::Manly, m.observed_t(), &draws.values, draws.mode)
}

/// Kennedy: t statistic of the residual coefficient when regressing treatment
/// on stratum indicators and (permuted) null-model residuals.
pub fn kennedy_test(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    let m = Partialled::new(data, plan)?;
    let n = m.pos.n();
    let df = (n - m.pos.layout.n_strata() - 1) as f64;
    if df <= 0.0 {
        return Err(Error::Domain("Kennedy regression has no residual degrees of freedom".into()));
    }
    let degenerate = m.resid_ss <= DEGENERATE_RSS * m.y_norm2;
    let zc = m.pos.center(&m.pos.z);
    let ee = m.resid_ss;

    let observed = if degenerate {
        0.0
    } else {
        let mut columns = stratum_columns(data.strata(), data.labels());
        columns.push((
            "residual".to_string(),
            ColumnKind::Other,
            m.null.residuals.clone(),
        ));
        let design = DesignMatrix::from_columns(columns)?;
        let z: Vec<f64> = data.treatment().iter().map(|&v| f64::from(v)).collect();
        let fit = fit_least_squares(&design, &z)?;
        fit.t_statistic(design.cols() - 1)
    };

    let draws = null_draws(plan, Reference::Permutations, 1, |src, out| {
        if degenerate {
            out[0] = 0.0;
            return false;
        }
        let num = dot_permuted(&zc, &m.resid, src);
        let rss = m.zcc - num * num / ee;
        out[0] = if rss <= DEGENERATE_RSS * m.zcc {
            f64::INFINITY.copysign(num)
        } else {
            num / ee.sqrt() / (rss / df).sqrt()
        };
        false
    })?;
    let p = pvalue(observed, &draws.values, draws.mode, Tail::TwoSided)?;
    let mut r = TestResult::new(Method::Kennedy, observed, p);
    r.null_summary = NullSummary::of(&draws.values);
    r.df = Some(df as usize);
    if degenerate {
        r.flags.push(Flag::DegenerateRegressor);
    }
    Ok(r)
}
