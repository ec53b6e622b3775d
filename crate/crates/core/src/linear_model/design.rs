use crate::error::{Error, Result};
use crate::trial::TrialData;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    /// Indicator of membership in the stratum with this canonical index.
    Stratum(usize),
    Baseline,
    Treatment,
    /// Any other regressor (e.g. permuted residuals).
    Other,
}

/// Dense column-major design matrix with named, typed columns.
///
/// Built by [`build_design`] for the stratified ANCOVA model: one indicator
/// column per stratum (no global intercept), the baseline column, and
/// optionally the treatment column last.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    names: Vec<String>,
    kinds: Vec<ColumnKind>,
    data: Vec<f64>,
}

impl DesignMatrix {
    pub fn from_columns(columns: Vec<(String, ColumnKind, Vec<f64>)>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::Empty("design matrix has no columns"));
        };
        let rows = first.2.len();
        if rows == 0 {
            return Err(Error::Empty("design matrix has no rows"));
        }
        let mut names = Vec::with_capacity(columns.len());
        let mut kinds = Vec::with_capacity(columns.len());
        let mut data = Vec::with_capacity(rows * columns.len());
        for (name, kind, values) in columns {
            if values.len() != rows {
                return Err(Error::LengthMismatch {
                    what: "design column",
                    expected: rows,
                    got: values.len(),
                });
            }
            names.push(name);
            kinds.push(kind);
            data.extend(values);
        }
        Ok(Self {
            rows,
            names,
            kinds,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.data[k * self.rows..(k + 1) * self.rows]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    pub fn name(&self, k: usize) -> &str {
        &self.names[k]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kind(&self, k: usize) -> ColumnKind {
        self.kinds[k]
    }

    pub fn position(&self, kind: ColumnKind) -> Option<usize> {
        self.kinds.iter().position(|&k| k == kind)
    }

    pub fn treatment_column(&self) -> Option<usize> {
        self.position(ColumnKind::Treatment)
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.data
    }
}

/// Stratum indicator columns for canonical stratum indices `strata` (values in `0..n_strata`).
pub fn stratum_columns(
    strata: &[usize],
    labels: &[String],
) -> Vec<(String, ColumnKind, Vec<f64>)> {
    labels
        .iter()
        .enumerate()
        .map(|(j, label)| {
            let col = strata
                .iter()
                .map(|&s| if s == j { 1.0 } else { 0.0 })
                .collect();
            (format!("stratum[{label}]"), ColumnKind::Stratum(j), col)
        })
        .collect()
}

/// ANCOVA design: stratum indicators, then baseline, then (optionally) treatment.
pub fn build_design(data: &TrialData, include_treatment: bool) -> DesignMatrix {
    let mut columns = stratum_columns(data.strata(), data.labels());
    columns.push((
        "baseline".to_string(),
        ColumnKind::Baseline,
        data.baseline().to_vec(),
    ));
    if include_treatment {
        columns.push((
            "treatment".to_string(),
            ColumnKind::Treatment,
            data.treatment().iter().map(|&z| f64::from(z)).collect(),
        ));
    }
    DesignMatrix::from_columns(columns).expect("trial data is nonempty and rectangular")
}
