//! Unit-level data for a stratified two-arm experiment.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::randomization::StratumLayout;

/// Strata labels, 0/1 treatment, baseline covariate and outcome for every unit.
///
/// Labels are canonicalized to `0..J` by sorted order: numerically when every
/// label parses as an integer, lexicographically otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialData {
    labels: Vec<String>,
    stratum: Vec<usize>,
    members: Vec<Vec<usize>>,
    treatment: Vec<u8>,
    baseline: Vec<f64>,
    outcome: Vec<f64>,
}

impl TrialData {
    pub fn new<S: ToString>(
        strata: &[S],
        treatment: Vec<u8>,
        baseline: Vec<f64>,
        outcome: Vec<f64>,
    ) -> Result<Self> {
        let n = strata.len();
        if n == 0 {
            return Err(Error::Empty("trial data has no units"));
        }
        for (what, got) in [
            ("treatment", treatment.len()),
            ("baseline", baseline.len()),
            ("outcome", outcome.len()),
        ] {
            if got != n {
                return Err(Error::LengthMismatch {
                    what,
                    expected: n,
                    got,
                });
            }
        }
        if let Some(i) = treatment.iter().position(|&z| z > 1) {
            return Err(Error::InvalidData(format!(
                "unit {i}: treatment must be 0 or 1, got {}",
                treatment[i]
            )));
        }
        if let Some(i) = baseline.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("unit {i}: non-finite baseline")));
        }
        if let Some(i) = outcome.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("unit {i}: non-finite outcome")));
        }

        let raw: Vec<String> = strata.iter().map(ToString::to_string).collect();
        let labels = canonical_labels(&raw);
        let index: BTreeMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(j, l)| (l.as_str(), j))
            .collect();
        let stratum: Vec<usize> = raw.iter().map(|l| index[l.as_str()]).collect();
        let mut members = vec![Vec::new(); labels.len()];
        for (i, &j) in stratum.iter().enumerate() {
            members[j].push(i);
        }
        for (j, units) in members.iter().enumerate() {
            let treated = units.iter().filter(|&&i| treatment[i] == 1).count();
            if treated == 0 || treated == units.len() {
                return Err(Error::InvalidData(format!(
                    "stratum `{}` does not contain both treatment arms",
                    labels[j]
                )));
            }
        }

        Ok(Self {
            labels,
            stratum,
            members,
            treatment,
            baseline,
            outcome,
        })
    }

    pub fn len(&self) -> usize {
        self.stratum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stratum.is_empty()
    }

    pub fn n_strata(&self) -> usize {
        self.labels.len()
    }

    /// Canonical stratum labels in column order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Canonical stratum index of every unit.
    pub fn strata(&self) -> &[usize] {
        &self.stratum
    }

    /// Unit indices belonging to each stratum, in unit order.
    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn treatment(&self) -> &[u8] {
        &self.treatment
    }

    pub fn baseline(&self) -> &[f64] {
        &self.baseline
    }

    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn layout(&self) -> StratumLayout {
        let sizes = self.members.iter().map(Vec::len).collect();
        let treated = self
            .members
            .iter()
            .map(|m| m.iter().filter(|&&i| self.treatment[i] == 1).count())
            .collect();
        StratumLayout::new(sizes, treated).expect("validated at construction")
    }

    /// Same units with a different outcome vector.
    pub fn with_outcome(&self, outcome: Vec<f64>) -> Result<Self> {
        if outcome.len() != self.len() {
            return Err(Error::LengthMismatch {
                what: "outcome",
                expected: self.len(),
                got: outcome.len(),
            });
        }
        if outcome.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite outcome".into()));
        }
        Ok(Self {
            outcome,
            ..self.clone()
        })
    }

    /// Outcome minus baseline for every unit.
    pub fn change_scores(&self) -> Vec<f64> {
        self.outcome
            .iter()
            .zip(&self.baseline)
            .map(|(y, x)| y - x)
            .collect()
    }
}

fn canonical_labels(raw: &[String]) -> Vec<String> {
    let mut distinct: Vec<String> = raw.to_vec();
    distinct.sort();
    distinct.dedup();
    let numeric: Option<Vec<i64>> = distinct.iter().map(|l| l.trim().parse().ok()).collect();
    if let Some(keys) = numeric {
        let mut paired: Vec<(i64, String)> = keys.into_iter().zip(distinct).collect();
        paired.sort();
        paired.into_iter().map(|(_, l)| l).collect()
    } else {
        distinct
    }
}
