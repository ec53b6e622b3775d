//! Residual exchangeability check for the residual-permutation tests.

use super::engine::{null_draws, Positions, Reference};
use super::npc::{npc_combine, Combiner};
use super::result::{Flag, Method, TestResult};
use crate::error::{Error, Result};
use crate::linear_model::{build_design, fit_least_squares};
use crate::randomization::PermutationPlan;
use crate::trial::TrialData;

/// Global p at or below this raises [`Flag::ExchangeabilityConcern`].
pub const CONCERN_LEVEL: f64 = 0.05;

/// Per-stratum `|corr(e, X)|` with `e` permuted through the source map `src`.
/// Strata with a constant `e` or `X` score 0.
fn abs_correlations(pos: &Positions, e: &[f64], xc: &[f64], xnorm: &[f64], src: Option<&[usize]>, out: &mut [f64]) {
    for (j, &n) in pos.layout.sizes().iter().enumerate() {
        let o = pos.offsets[j];
        let ej = |p: usize| match src {
            Some(s) => e[s[p]],
            None => e[p],
        };
        let mean = (o..o + n).map(ej).sum::<f64>() / n as f64;
        let mut sxy = 0.0;
        let mut see = 0.0;
        for p in o..o + n {
            let d = ej(p) - mean;
            sxy += d * xc[p];
            see += d * d;
        }
        let denom = see.sqrt() * xnorm[j];
        out[j] = if denom > 0.0 { (sxy / denom).abs() } else { 0.0 };
    }
}

/// Tests association between `residuals` (unit order) and the baseline within
/// each stratum, permuting residuals within strata and combining the per-stratum
/// correlation tests with Fisher's rule.
pub fn residual_correlation_test(
    residuals: &[f64],
    data: &TrialData,
    plan: &PermutationPlan,
) -> Result<TestResult> {
    if residuals.len() != data.len() {
        return Err(Error::LengthMismatch {
            what: "residuals",
            expected: data.len(),
            got: residuals.len(),
        });
    }
    let pos = Positions::new(data);
    pos.check_plan(plan)?;
    let e = pos.gather(residuals);
    let xc = pos.center(&pos.x);
    let scale = xc.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let xnorm: Vec<f64> = pos
        .layout
        .sizes()
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let o = pos.offsets[j];
            let s: f64 = xc[o..o + n].iter().map(|v| v * v).sum::<f64>().sqrt();
            // Rounding noise from centring a constant column is not variation.
            if s <= 1e-12 * scale * (n as f64).sqrt() {
                0.0
            } else {
                s
            }
        })
        .collect();
    let width = pos.layout.n_strata();
    let mut observed = vec![0.0; width];
    abs_correlations(&pos, &e, &xc, &xnorm, None, &mut observed);
    let draws = null_draws(plan, Reference::Permutations, width, |src, out| {
        abs_correlations(&pos, &e, &xc, &xnorm, Some(src), out);
        false
    })?;
    let mut result = npc_combine(&observed, &draws.values, width, Combiner::Fisher, draws.mode)?;
    result.method = Method::Exchangeability;
    for (j, &norm) in xnorm.iter().enumerate() {
        if norm == 0.0 {
            result.flags.push(Flag::ConstantCovariate(data.labels()[j].clone()));
        }
    }
    if result.p() <= CONCERN_LEVEL {
        result.flags.push(Flag::ExchangeabilityConcern);
    }
    Ok(result)
}

/// Residual exchangeability diagnostic on the null-model (no treatment) residuals.
pub fn exchangeability_diagnostic(data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    let null = fit_least_squares(&build_design(data, false), data.outcome())?;
    residual_correlation_test(&null.residuals, data, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randomization::stream;
    use rand::Rng;

    fn layout_data(x: Vec<f64>, strata: Vec<usize>) -> TrialData {
        let n = x.len();
        let mut z = vec![0u8; n];
        let mut seen = std::collections::HashMap::new();
        for (i, s) in strata.iter().enumerate() {
            let c = seen.entry(*s).or_insert(0);
            z[i] = u8::from(*c % 2 == 0);
            *c += 1;
        }
        TrialData::new(&strata, z, x, vec![0.0; n]).unwrap()
    }

    #[test]
    fn perfect_correlation_gets_smallest_partial_p() {
        let x: Vec<f64> = (0..6).map(f64::from).collect();
        let data = layout_data(x.clone(), vec![0; 6]);
        let plan = PermutationPlan::exact(data.layout());
        let r = residual_correlation_test(&x, &data, &plan).unwrap();
        // Only the identity and the reversal reach |r| = 1 among 720 orders.
        assert_eq!(r.partial_p.unwrap()[0], 2.0 / 720.0);
        assert!(r.flags.contains(&Flag::ExchangeabilityConcern));
    }

    #[test]
    fn constant_covariate_stratum_is_flagged() {
        let x = vec![1.0, 2.0, 3.0, 4.0, 5.0, 5.0, 5.0, 5.0];
        let data = layout_data(x, vec![0, 0, 0, 0, 1, 1, 1, 1]);
        let e = vec![0.3, -0.1, 0.5, 0.2, 1.0, -1.0, 2.0, 0.5];
        let plan = PermutationPlan::monte_carlo(data.layout(), 200, 1).unwrap();
        let r = residual_correlation_test(&e, &data, &plan).unwrap();
        assert_eq!(r.partial_p.as_ref().unwrap()[1], 1.0);
        assert!(r.flags.contains(&Flag::ConstantCovariate("1".into())));
        assert_eq!(r.method, Method::Exchangeability);
    }

    #[test]
    fn single_stratum_matches_direct_correlation_test() {
        let mut rng = stream(12, 0);
        let x: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let e: Vec<f64> = x.iter().map(|v| 0.3 * v + rng.random_range(-1.0..1.0)).collect();
        let data = layout_data(x.clone(), vec![0; 12]);
        let plan = PermutationPlan::monte_carlo(data.layout(), 499, 8).unwrap();
        let r = residual_correlation_test(&e, &data, &plan).unwrap();
        let mut sampler = crate::randomization::Sampler::new(&data.layout());
        let mut src = vec![0; 12];
        let corr = |e: &[f64]| {
            let me = e.iter().sum::<f64>() / 12.0;
            let mx = x.iter().sum::<f64>() / 12.0;
            let sxy: f64 = e.iter().zip(&x).map(|(a, b)| (a - me) * (b - mx)).sum();
            let sxx: f64 = x.iter().map(|b| (b - mx).powi(2)).sum();
            let syy: f64 = e.iter().map(|a| (a - me).powi(2)).sum();
            (sxy / (sxx * syy).sqrt()).abs()
        };
        let obs = corr(&e);
        let mut k = 0;
        for b in 0..499 {
            let mut g = stream(8, b);
            sampler.permutation(&mut g, &mut src);
            let pe: Vec<f64> = src.iter().map(|&s| e[s]).collect();
            if corr(&pe) >= obs - 1e-12 {
                k += 1;
            }
        }
        assert!((r.p() - (k + 1) as f64 / 500.0).abs() < 1e-12);
    }
}
