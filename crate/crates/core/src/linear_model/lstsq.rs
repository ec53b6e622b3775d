use crate::error::{Error, Result};

use super::design::DesignMatrix;

/// Pivots below this fraction of the largest pivot are treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Residual sums of squares below `DEGENERATE_RSS * ||y||^2` count as an exact fit.
pub(crate) const DEGENERATE_RSS: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub treatment_t: Option<f64>,
    pub treatment_se: Option<f64>,
    pub df: usize,
    pub residual_ss: f64,
    /// The response is reproduced exactly by the design; t statistics follow
    /// the zero-variance convention of [`LeastSquaresFit::t_statistic`].
    pub degenerate: bool,
    response_norm: f64,
    column_norms: Vec<f64>,
}

impl LeastSquaresFit {
    pub fn residual_variance(&self) -> f64 {
        if self.df == 0 {
            f64::NAN
        } else {
            self.residual_ss / self.df as f64
        }
    }

    /// t statistic of column `k`.
    ///
    /// For an exact fit the statistic is 0 when the coefficient is negligible
    /// on the response scale and signed infinity otherwise.
    pub fn t_statistic(&self, k: usize) -> f64 {
        let beta = self.coefficients[k];
        if self.degenerate {
            if beta.abs() * self.column_norms[k] <= 1e-10 * self.response_norm {
                0.0
            } else {
                f64::INFINITY.copysign(beta)
            }
        } else {
            beta / self.standard_errors[k]
        }
    }
}

/// Ordinary least squares through a Householder QR factorization.
///
/// Fails with [`Error::Singular`] naming the first column whose pivot falls
/// below `RANK_TOLERANCE` times the largest pivot.
pub fn fit_least_squares(design: &DesignMatrix, response: &[f64]) -> Result<LeastSquaresFit> {
    let n = design.rows();
    let p = design.cols();
    if response.len() != n {
        return Err(Error::LengthMismatch {
            what: "response",
            expected: n,
            got: response.len(),
        });
    }
    if p > n {
        return Err(Error::Singular {
            column: design.name(n).to_string(),
        });
    }

    let mut a = design.raw().to_vec();
    let mut qty = response.to_vec();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut diag = vec![0.0; p];

    for k in 0..p {
        let col = &a[k * n + k..(k + 1) * n];
        let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            reflectors.push(Vec::new());
            diag[k] = 0.0;
            continue;
        }
        let alpha = if col[0] > 0.0 { -norm } else { norm };
        let mut v = col.to_vec();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= vnorm;
        }
        for c in k..p {
            apply_reflector(&v, &mut a[c * n + k..(c + 1) * n]);
        }
        apply_reflector(&v, &mut qty[k..]);
        diag[k] = a[k * n + k];
        reflectors.push(v);
    }

    let largest = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if let Some(k) = diag
        .iter()
        .position(|d| largest == 0.0 || d.abs() <= RANK_TOLERANCE * largest)
    {
        return Err(Error::Singular {
            column: design.name(k).to_string(),
        });
    }

    // R is stored in the upper triangle of `a` (column-major).
    let r = |i: usize, j: usize| a[j * n + i];
    let mut coefficients = vec![0.0; p];
    for i in (0..p).rev() {
        let s: f64 = (i + 1..p).map(|j| r(i, j) * coefficients[j]).sum();
        coefficients[i] = (qty[i] - s) / r(i, i);
    }

    // Row norms of R^{-1} give the diagonal of (A^T A)^{-1}.
    let mut rinv = vec![0.0; p * p];
    for c in 0..p {
        for i in (0..=c).rev() {
            let rhs = if i == c { 1.0 } else { 0.0 };
            let s: f64 = (i + 1..=c).map(|j| r(i, j) * rinv[j * p + c]).sum();
            rinv[i * p + c] = (rhs - s) / r(i, i);
        }
    }
    let xtx_inv_diag: Vec<f64> = (0..p)
        .map(|i| (i..p).map(|c| rinv[i * p + c].powi(2)).sum())
        .collect();

    let residual_ss: f64 = qty[p..].iter().map(|v| v * v).sum();
    let mut resid_q = qty.clone();
    resid_q[..p].iter_mut().for_each(|v| *v = 0.0);
    for k in (0..p).rev() {
        if !reflectors[k].is_empty() {
            apply_reflector(&reflectors[k], &mut resid_q[k..]);
        }
    }
    let residuals = resid_q;
    let fitted: Vec<f64> = response
        .iter()
        .zip(&residuals)
        .map(|(y, e)| y - e)
        .collect();

    let df = n - p;
    let response_norm = response.iter().map(|v| v * v).sum::<f64>().sqrt();
    let degenerate = residual_ss <= DEGENERATE_RSS * response_norm * response_norm;
    let sigma2 = if df == 0 {
        f64::NAN
    } else {
        residual_ss / df as f64
    };
    let standard_errors: Vec<f64> = xtx_inv_diag.iter().map(|d| (sigma2 * d).sqrt()).collect();
    let column_norms = (0..p)
        .map(|k| design.column(k).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();

    let mut fit = LeastSquaresFit {
        coefficients,
        residuals,
        fitted,
        standard_errors,
        treatment_t: None,
        treatment_se: None,
        df,
        residual_ss,
        degenerate,
        response_norm,
        column_norms,
    };
    if let Some(k) = design.treatment_column() {
        fit.treatment_se = Some(fit.standard_errors[k]);
        fit.treatment_t = Some(fit.t_statistic(k));
    }
    Ok(fit)
}

fn apply_reflector(v: &[f64], x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let scale = 2.0 * dot;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= scale * vi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear_model::design::{build_design, ColumnKind};
    use crate::trial::TrialData;

    /// (A^T A)^{-1} A^T y by Gauss-Jordan elimination on the normal equations.
    pub(crate) fn normal_equations(design: &DesignMatrix, y: &[f64]) -> Vec<f64> {
        let p = design.cols();
        let mut m = vec![vec![0.0; 2 * p]; p];
        for i in 0..p {
            for j in 0..p {
                m[i][j] = design
                    .column(i)
                    .iter()
                    .zip(design.column(j))
                    .map(|(a, b)| a * b)
                    .sum();
            }
            m[i][p + i] = 1.0;
        }
        for c in 0..p {
            let piv = (c..p)
                .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
                .unwrap();
            m.swap(c, piv);
            let d = m[c][c];
            for v in &mut m[c] {
                *v /= d;
            }
            for r in 0..p {
                if r != c {
                    let f = m[r][c];
                    for k in 0..2 * p {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
        let aty: Vec<f64> = (0..p)
            .map(|i| design.column(i).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect();
        (0..p)
            .map(|i| (0..p).map(|j| m[i][p + j] * aty[j]).sum())
            .collect()
    }

    #[test]
    fn exact_line() {
        let d = DesignMatrix::from_columns(vec![
            ("one".into(), ColumnKind::Stratum(0), vec![1.0; 3]),
            ("x".into(), ColumnKind::Baseline, vec![0.0, 1.0, 2.0]),
        ])
        .unwrap();
        let fit = fit_least_squares(&d, &[1.0, 3.0, 5.0]).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|e| e.abs() < 1e-12));
        assert!(fit.degenerate);
        assert_eq!(fit.df, 1);
    }

    #[test]
    fn collinear_baseline_names_column() {
        let d = DesignMatrix::from_columns(vec![
            ("s1".into(), ColumnKind::Stratum(0), vec![1.0, 1.0, 0.0, 0.0]),
            ("s2".into(), ColumnKind::Stratum(1), vec![0.0, 0.0, 1.0, 1.0]),
            ("baseline".into(), ColumnKind::Baseline, vec![1.0, 1.0, 0.0, 0.0]),
        ])
        .unwrap();
        match fit_least_squares(&d, &[1.0, 2.0, 3.0, 4.0]) {
            Err(Error::Singular { column }) => assert_eq!(column, "baseline"),
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn constant_baseline_in_single_stratum_is_singular() {
        let d = DesignMatrix::from_columns(vec![
            ("s".into(), ColumnKind::Stratum(0), vec![1.0; 4]),
            ("baseline".into(), ColumnKind::Baseline, vec![3.0; 4]),
        ])
        .unwrap();
        assert!(matches!(
            fit_least_squares(&d, &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn six_unit_fixture_matches_normal_equations() {
        let data = TrialData::new(
            &[1, 1, 1, 2, 2, 2],
            vec![1, 0, 1, 0, 1, 0],
            vec![0.0, 1.0, 2.0, 0.0, 1.0, 2.0],
            vec![1.0, 0.5, 2.0, 0.0, 1.5, 1.0],
        )
        .unwrap();
        let d = build_design(&data, true);
        let fit = fit_least_squares(&d, data.outcome()).unwrap();
        let oracle = normal_equations(&d, data.outcome());
        for (a, b) in fit.coefficients.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert_eq!(fit.df, 2);
    }

    #[test]
    fn length_mismatch() {
        let d = DesignMatrix::from_columns(vec![("s".into(), ColumnKind::Stratum(0), vec![1.0; 3])])
            .unwrap();
        assert!(matches!(
            fit_least_squares(&d, &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
