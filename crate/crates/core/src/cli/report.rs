//! Analysis of ingested trials and the reports written by the command line.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ingest::TrialSet;
use crate::error::{Error, Result};
use crate::hypothesis_tests::{exchangeability_diagnostic, run_method, Flag, Method, TestResult};
use crate::randomization::{derive_seed, tag_of, PermutationPlan};
use crate::trial::TrialData;

/// Correlation at or above which change scores are a reasonable analysis.
pub const CHANGE_SCORE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub endpoint: String,
    pub arm: String,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single unit.
    pub sd: f64,
    pub single_unit: bool,
}

/// Mean and sample standard deviation of the outcome per arm and endpoint.
pub fn summarize_by_arm(set: &TrialSet) -> Vec<ArmSummary> {
    let mut out = Vec::new();
    for (endpoint, data) in &set.endpoints {
        for (code, arm) in set.arms.iter().enumerate() {
            let ys: Vec<f64> = data
                .outcome()
                .iter()
                .zip(data.treatment())
                .filter(|(_, &z)| usize::from(z) == code)
                .map(|(&y, _)| y)
                .collect();
            let n = ys.len();
            let mean = ys.iter().sum::<f64>() / n as f64;
            let sd = if n > 1 {
                (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            out.push(ArmSummary {
                endpoint: endpoint.clone(),
                arm: arm.clone(),
                n,
                mean,
                sd,
                single_unit: n == 1,
            });
        }
    }
    out
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    /// `None` when baseline or outcome is constant.
    pub pooled: Option<f64>,
    /// Per stratum, in canonical stratum order.
    pub per_stratum: Vec<(String, Option<f64>)>,
    /// Pooled correlation reaches [`CHANGE_SCORE_THRESHOLD`].
    pub change_scores_advisable: bool,
    pub undefined: bool,
}

/// Pearson correlation of baseline and outcome, pooled and within each stratum.
pub fn baseline_outcome_correlation(data: &TrialData) -> CorrelationSummary {
    let pooled = pearson(data.baseline(), data.outcome());
    let per_stratum: Vec<(String, Option<f64>)> = data
        .members()
        .iter()
        .zip(data.labels())
        .map(|(units, label)| {
            let x: Vec<f64> = units.iter().map(|&i| data.baseline()[i]).collect();
            let y: Vec<f64> = units.iter().map(|&i| data.outcome()[i]).collect();
            (label.clone(), pearson(&x, &y))
        })
        .collect();
    CorrelationSummary {
        change_scores_advisable: pooled.is_some_and(|r| r >= CHANGE_SCORE_THRESHOLD),
        undefined: pooled.is_none() || per_stratum.iter().any(|(_, r)| r.is_none()),
        pooled,
        per_stratum,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub input_sha256: String,
    pub seed: u64,
    pub permutations: usize,
    pub methods: Vec<Method>,
    pub engine_version: String,
    pub treatment_coding: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub endpoint: String,
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub draws: u64,
    pub flags: Vec<Flag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointDiagnostics {
    pub endpoint: String,
    pub exchangeability: Option<TestResult>,
    pub correlation: CorrelationSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub provenance: Provenance,
    pub rows: Vec<ReportRow>,
    pub results: Vec<(String, TestResult)>,
    pub arms: Vec<ArmSummary>,
    pub diagnostics: Vec<EndpointDiagnostics>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Seed for one (endpoint, method) pair.
pub fn method_seed(seed: u64, endpoint: &str, method: &str) -> u64 {
    derive_seed(derive_seed(seed, tag_of(endpoint)), tag_of(method))
}

/// Runs `methods` on every endpoint of `set` with `permutations` Monte-Carlo
/// draws. The exchangeability diagnostic is attached whenever Freedman-Lane
/// is among the methods.
pub fn run_analysis(
    set: &TrialSet,
    methods: &[Method],
    permutations: usize,
    seed: u64,
    input_sha256: String,
) -> Result<AnalysisReport> {
    if methods.is_empty() {
        return Err(Error::InvalidData("no methods requested".into()));
    }
    let mut rows = Vec::new();
    let mut results = Vec::new();
    let mut diagnostics = Vec::new();
    for (endpoint, data) in &set.endpoints {
        let annotate = |e: Error| Error::Endpoint {
            endpoint: endpoint.clone(),
            source: Box::new(e),
        };
        let plan_for = |name: &str| {
            PermutationPlan::monte_carlo(data.layout(), permutations, method_seed(seed, endpoint, name))
        };
        for &m in methods {
            let plan = plan_for(m.name()).map_err(annotate)?;
            let r = run_method(m, data, &plan).map_err(annotate)?;
            rows.push(ReportRow {
                endpoint: endpoint.clone(),
                method: m,
                statistic: r.statistic,
                p_value: r.p(),
                draws: r.p_value.draws,
                flags: r.flags.clone(),
            });
            results.push((endpoint.clone(), r));
        }
        let exchangeability = if methods.contains(&Method::FreedmanLane) {
            let plan = plan_for(Method::Exchangeability.name()).map_err(annotate)?;
            Some(exchangeability_diagnostic(data, &plan).map_err(annotate)?)
        } else {
            None
        };
        diagnostics.push(EndpointDiagnostics {
            endpoint: endpoint.clone(),
            exchangeability,
            correlation: baseline_outcome_correlation(data),
        });
    }
    Ok(AnalysisReport {
        provenance: Provenance {
            input_sha256,
            seed,
            permutations,
            methods: methods.to_vec(),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            treatment_coding: set.arms.clone(),
        },
        rows,
        results,
        arms: summarize_by_arm(set),
        diagnostics,
    })
}

fn flags_text(flags: &[Flag]) -> String {
    flags
        .iter()
        .map(|f| match f {
            Flag::ZeroResidualVariance => "zero_residual_variance".to_string(),
            Flag::DegenerateRegressor => "degenerate_regressor".to_string(),
            Flag::ConstantCovariate(s) => format!("constant_covariate:{s}"),
            Flag::SingularPermutedDesigns(k) => format!("singular_permuted_designs:{k}"),
            Flag::ExchangeabilityConcern => "exchangeability_concern".to_string(),
        })
        .collect::<Vec<_>>()
        .join(";")
}

impl AnalysisReport {
    /// One row per (endpoint, method), with provenance in leading `#` lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let p = &self.provenance;
        writeln!(out, "# input_sha256={}", p.input_sha256)?;
        writeln!(
            out,
            "# seed={} permutations={} engine_version={} treatment_coding={}->0,{}->1",
            p.seed, p.permutations, p.engine_version, p.treatment_coding[0], p.treatment_coding[1]
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["endpoint", "method", "statistic", "p_value", "p_display", "draws", "flags"])?;
        for r in &self.rows {
            w.write_record([
                r.endpoint.clone(),
                r.method.name().to_string(),
                format!("{}", r.statistic),
                format!("{}", r.p_value),
                format!("{:.3}", r.p_value),
                r.draws.to_string(),
                flags_text(&r.flags),
            ])?;
        }
        for d in &self.diagnostics {
            if let Some(x) = &d.exchangeability {
                w.write_record([
                    d.endpoint.clone(),
                    x.method.name().to_string(),
                    format!("{}", x.statistic),
                    format!("{}", x.p()),
                    format!("{:.3}", x.p()),
                    x.p_value.draws.to_string(),
                    flags_text(&x.flags),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)?;
        Ok(())
    }
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        write(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
