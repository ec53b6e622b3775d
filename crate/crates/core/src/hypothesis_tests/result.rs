use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::randomization::PValue;

/// Identifier of every test in the battery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ancova,
    StratifiedDiffMeans,
    StratifiedSumAbs,
    StratifiedChangeScores,
    LmPermutation,
    FreedmanLane,
    Kennedy,
    Manly,
    Npc,
    Exchangeability,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Ancova,
        Method::StratifiedDiffMeans,
        Method::StratifiedSumAbs,
        Method::StratifiedChangeScores,
        Method::LmPermutation,
        Method::FreedmanLane,
        Method::Kennedy,
        Method::Manly,
        Method::Npc,
        Method::Exchangeability,
    ];

    /// The four tests compared throughout the power studies.
    pub const CORE: [Method; 4] = [
        Method::Ancova,
        Method::StratifiedDiffMeans,
        Method::LmPermutation,
        Method::FreedmanLane,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ancova => "ancova",
            Method::StratifiedDiffMeans => "stratified_diff_means",
            Method::StratifiedSumAbs => "stratified_sum_abs",
            Method::StratifiedChangeScores => "stratified_change_scores",
            Method::LmPermutation => "lm_permutation",
            Method::FreedmanLane => "freedman_lane",
            Method::Kennedy => "kennedy",
            Method::Manly => "manly",
            Method::Npc => "npc",
            Method::Exchangeability => "exchangeability",
        }
    }

    pub fn is_permutation(self) -> bool {
        self != Method::Ancova
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let alias = match key.as_str() {
            "stratified" | "diff_means" => "stratified_diff_means",
            "sum_abs" => "stratified_sum_abs",
            "change_scores" => "stratified_change_scores",
            "lm" => "lm_permutation",
            "fl" => "freedman_lane",
            other => other,
        };
        Method::ALL
            .into_iter()
            .find(|m| m.name() == alias)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "flag", content = "detail")]
pub enum Flag {
    /// The fitted model reproduces the response exactly.
    ZeroResidualVariance,
    /// The regressor of interest is identically zero.
    DegenerateRegressor,
    /// Baseline is constant within this stratum; its partial test is skipped.
    ConstantCovariate(String),
    /// Some permuted designs were singular; their statistics were set to 0.
    SingularPermutedDesigns(usize),
    /// Residuals look associated with the baseline; Freedman-Lane assumptions are doubtful.
    ExchangeabilityConcern,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullSummary {
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub median: f64,
    pub q975: f64,
}

impl NullSummary {
    pub fn of(draws: &[f64]) -> Option<Self> {
        if draws.is_empty() {
            return None;
        }
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let sd = if draws.len() > 1 {
            (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let mut sorted = draws.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        };
        Some(Self {
            mean,
            sd,
            q025: q(0.025),
            median: q(0.5),
            q975: q(0.975),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub statistic: f64,
    pub p_value: PValue,
    /// `None` for analytic tests.
    pub null_summary: Option<NullSummary>,
    pub df: Option<usize>,
    pub per_stratum: Option<Vec<f64>>,
    /// Partial p-values of the per-stratum tests for combined tests.
    pub partial_p: Option<Vec<f64>>,
    pub degenerate_draws: usize,
    pub flags: Vec<Flag>,
}

impl TestResult {
    pub(crate) fn new(method: Method, statistic: f64, p_value: PValue) -> Self {
        Self {
            method,
            statistic,
            p_value,
            null_summary: None,
            df: None,
            per_stratum: None,
            partial_p: None,
            degenerate_draws: 0,
            flags: Vec::new(),
        }
    }

    pub fn p(&self) -> f64 {
        self.p_value.value
    }

    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value.value <= alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("Freedman-Lane".parse::<Method>().unwrap(), Method::FreedmanLane);
        assert!("wilcoxon".parse::<Method>().is_err());
    }

    #[test]
    fn null_summary_quantiles() {
        let draws: Vec<f64> = (0..=100).map(f64::from).collect();
        let s = NullSummary::of(&draws).unwrap();
        assert_eq!(s.median, 50.0);
        assert_eq!(s.q025, 2.5);
        assert_eq!(s.mean, 50.0);
    }
}
