use serde::{Deserialize, Serialize};

use super::layout::PlanMode;
use crate::error::{Error, Result};

/// Absolute tolerance when comparing a null draw with the observed statistic.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMode {
    Exact,
    MonteCarlo,
    Analytic,
}

impl From<PlanMode> for PValueMode {
    fn from(m: PlanMode) -> Self {
        match m {
            PlanMode::Exact => PValueMode::Exact,
            PlanMode::MonteCarlo => PValueMode::MonteCarlo,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub value: f64,
    pub exceedances: u64,
    pub draws: u64,
    pub mode: PValueMode,
}

impl PValue {
    pub fn analytic(value: f64) -> Self {
        Self {
            value,
            exceedances: 0,
            draws: 0,
            mode: PValueMode::Analytic,
        }
    }

    /// `(k + 1) / (B + 1)` for Monte-Carlo draws, `k / B` for a full enumeration.
    pub fn from_counts(exceedances: u64, draws: u64, mode: PlanMode) -> Self {
        let value = match mode {
            PlanMode::MonteCarlo => (exceedances + 1) as f64 / (draws + 1) as f64,
            PlanMode::Exact => exceedances as f64 / draws as f64,
        };
        Self {
            value,
            exceedances,
            draws,
            mode: mode.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Compare magnitudes, `|draw| >= |observed|`.
    TwoSided,
    /// Compare raw values, `draw >= observed`.
    Upper,
}

pub(crate) fn count_exceedances(observed: f64, draws: &[f64], tail: Tail) -> u64 {
    match tail {
        Tail::TwoSided => {
            let threshold = observed.abs() - TIE_TOLERANCE;
            draws.iter().filter(|d| d.abs() >= threshold).count() as u64
        }
        Tail::Upper => {
            let threshold = observed - TIE_TOLERANCE;
            draws.iter().filter(|&&d| d >= threshold).count() as u64
        }
    }
}

pub fn pvalue(observed: f64, null_draws: &[f64], mode: PlanMode, tail: Tail) -> Result<PValue> {
    if null_draws.is_empty() {
        return Err(Error::Empty("null distribution has no draws"));
    }
    let k = count_exceedances(observed, null_draws, tail);
    Ok(PValue::from_counts(k, null_draws.len() as u64, mode))
}

/// Two-sided p-value of `observed` against its null draws.
pub fn monte_carlo_pvalue(observed: f64, null_draws: &[f64], mode: PlanMode) -> Result<PValue> {
    pvalue(observed, null_draws, mode, Tail::TwoSided)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_one_correction() {
        let mut draws = vec![0.0; 95];
        draws.extend([3.0, -3.5, 4.0, 2.5]);
        let p = monte_carlo_pvalue(2.5, &draws, PlanMode::MonteCarlo).unwrap();
        assert_eq!(p.exceedances, 4);
        assert!((p.value - 0.05).abs() < 1e-15);

        let draws: Vec<f64> = (0..999).map(|i| i as f64 / 1000.0).collect();
        let p = monte_carlo_pvalue(5.0, &draws, PlanMode::MonteCarlo).unwrap();
        assert!((p.value - 0.001).abs() < 1e-15);

        let p = monte_carlo_pvalue(1.5, &[1.5; 10], PlanMode::MonteCarlo).unwrap();
        assert_eq!(p.value, 1.0);
    }

    #[test]
    fn exact_mode_divides_by_count() {
        let p = monte_carlo_pvalue(2.0, &[2.0, -1.0, 0.5, -2.0], PlanMode::Exact).unwrap();
        assert_eq!(p.exceedances, 2);
        assert_eq!(p.value, 0.5);
    }

    #[test]
    fn ties_within_tolerance_count() {
        let p = monte_carlo_pvalue(1.0, &[1.0 - 1e-13, -(1.0 - 5e-13)], PlanMode::Exact).unwrap();
        assert_eq!(p.exceedances, 2);
        let p = pvalue(1.0, &[-1.0, 0.9], PlanMode::Exact, Tail::Upper).unwrap();
        assert_eq!(p.exceedances, 0);
    }

    #[test]
    fn empty_draws_rejected() {
        assert!(monte_carlo_pvalue(1.0, &[], PlanMode::MonteCarlo).is_err());
    }
}
