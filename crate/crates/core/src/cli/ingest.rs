//! Trial CSV ingestion: one row per subject, wide endpoint columns
//! `baseline_<endpoint>` and `outcome_<endpoint>`.

use std::collections::BTreeSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::trial::TrialData;

const BASELINE_PREFIX: &str = "baseline_";
const OUTCOME_PREFIX: &str = "outcome_";

/// Column names and label choices for [`load_trial_csv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    pub subject_column: String,
    pub stratum_column: String,
    pub treatment_column: String,
    /// Endpoints to load; all endpoints found in the header when `None`.
    pub endpoints: Option<Vec<String>>,
    /// Treatment label mapped to 0. Defaults to the first label in sorted order.
    pub treatment_ref: Option<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            subject_column: "subject".into(),
            stratum_column: "stratum".into(),
            treatment_column: "treatment".into(),
            endpoints: None,
            treatment_ref: None,
        }
    }
}

/// Every endpoint of one trial file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSet {
    pub subjects: Vec<String>,
    /// Raw stratum label per subject.
    pub strata: Vec<String>,
    /// Labels of the arms coded 0 and 1.
    pub arms: [String; 2],
    pub endpoints: Vec<(String, TrialData)>,
}

impl TrialSet {
    pub fn endpoint(&self, name: &str) -> Option<&TrialData> {
        self.endpoints.iter().find(|(e, _)| e == name).map(|(_, d)| d)
    }

    pub fn endpoint_names(&self) -> Vec<&str> {
        self.endpoints.iter().map(|(e, _)| e.as_str()).collect()
    }
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na") || c.eq_ignore_ascii_case("nan")
}

/// Reads a trial CSV from `path`.
pub fn load_trial_csv(path: &Path, options: &IngestOptions) -> Result<TrialSet> {
    let file = std::fs::File::open(path).map_err(|e| Error::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    read_trial_csv(file, options).map_err(|e| match e {
        Error::Input { .. } => e,
        other => Error::Input {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    })
}

/// Reads a trial CSV from any reader.
pub fn read_trial_csv<R: Read>(reader: R, options: &IngestOptions) -> Result<TrialSet> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidData(format!("missing required column `{name}`")))
    };
    let subject_col = find(&options.subject_column)?;
    let stratum_col = find(&options.stratum_column)?;
    let treatment_col = find(&options.treatment_column)?;

    let endpoints: Vec<String> = match &options.endpoints {
        Some(list) => list.clone(),
        None => header
            .iter()
            .filter_map(|h| h.strip_prefix(OUTCOME_PREFIX))
            .filter(|e| header.iter().any(|h| h == &format!("{BASELINE_PREFIX}{e}")))
            .map(str::to_string)
            .collect(),
    };
    if endpoints.is_empty() {
        return Err(Error::InvalidData(
            "no endpoints: expected column pairs `baseline_<name>` and `outcome_<name>`".into(),
        ));
    }
    let endpoint_cols: Vec<(usize, usize)> = endpoints
        .iter()
        .map(|e| Ok((find(&format!("{BASELINE_PREFIX}{e}"))?, find(&format!("{OUTCOME_PREFIX}{e}"))?)))
        .collect::<Result<_>>()?;

    let mut required = vec![subject_col, stratum_col, treatment_col];
    required.extend(endpoint_cols.iter().flat_map(|&(b, o)| [b, o]));

    let mut rows = Vec::new();
    let mut missing = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        // Line numbers count the header as line 1.
        let line = record.position().map_or(k + 2, |p| p.line() as usize);
        if required.iter().any(|&c| record.get(c).is_none_or(is_missing)) {
            missing.push(line);
            continue;
        }
        rows.push((line, record));
    }
    if !missing.is_empty() {
        let shown: Vec<String> = missing.iter().take(20).map(ToString::to_string).collect();
        let more = if missing.len() > 20 { ", ..." } else { "" };
        return Err(Error::InvalidData(format!(
            "{} row(s) with missing required cells at line(s) {}{more}",
            missing.len(),
            shown.join(", ")
        )));
    }
    if rows.is_empty() {
        return Err(Error::Empty("trial file has no data rows"));
    }

    let labels: BTreeSet<&str> = rows.iter().map(|(_, r)| &r[treatment_col]).collect();
    if labels.len() != 2 {
        return Err(Error::InvalidData(format!(
            "treatment column must hold exactly two labels, found {}: {:?}",
            labels.len(),
            labels
        )));
    }
    let sorted: Vec<&str> = labels.into_iter().collect();
    let reference = match &options.treatment_ref {
        Some(r) if sorted.contains(&r.as_str()) => r.as_str(),
        Some(r) => {
            return Err(Error::InvalidData(format!(
                "treatment reference `{r}` is not one of {sorted:?}"
            )))
        }
        None => sorted[0],
    };
    let other = if sorted[0] == reference { sorted[1] } else { sorted[0] };
    let treatment: Vec<u8> = rows
        .iter()
        .map(|(_, r)| u8::from(&r[treatment_col] != reference))
        .collect();

    let subjects: Vec<String> = rows.iter().map(|(_, r)| r[subject_col].to_string()).collect();
    let strata: Vec<String> = rows.iter().map(|(_, r)| r[stratum_col].to_string()).collect();
    let number = |line: usize, col: usize, cell: &str| {
        cell.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| {
                Error::InvalidData(format!(
                    "line {line}, column `{}`: `{cell}` is not a finite number",
                    header[col]
                ))
            })
    };
    let mut out = Vec::with_capacity(endpoints.len());
    for (name, &(bc, oc)) in endpoints.iter().zip(&endpoint_cols) {
        let baseline = rows
            .iter()
            .map(|(l, r)| number(*l, bc, &r[bc]))
            .collect::<Result<Vec<_>>>()?;
        let outcome = rows
            .iter()
            .map(|(l, r)| number(*l, oc, &r[oc]))
            .collect::<Result<Vec<_>>>()?;
        let data = TrialData::new(&strata, treatment.clone(), baseline, outcome)?;
        out.push((name.clone(), data));
    }
    Ok(TrialSet {
        subjects,
        strata,
        arms: [reference.to_string(), other.to_string()],
        endpoints: out,
    })
}

/// Writes `set` in the canonical layout read by [`read_trial_csv`] with default options.
pub fn write_trial_csv<W: Write>(writer: W, set: &TrialSet) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["subject".to_string(), "stratum".into(), "treatment".into()];
    for (e, _) in &set.endpoints {
        header.push(format!("{BASELINE_PREFIX}{e}"));
        header.push(format!("{OUTCOME_PREFIX}{e}"));
    }
    w.write_record(&header)?;
    let Some((_, first)) = set.endpoints.first() else {
        return Err(Error::Empty("trial set has no endpoints"));
    };
    for i in 0..set.subjects.len() {
        let mut row = vec![
            set.subjects[i].clone(),
            set.strata[i].clone(),
            set.arms[usize::from(first.treatment()[i])].clone(),
        ];
        for (_, d) in &set.endpoints {
            // `{}` on f64 prints the shortest representation that parses back exactly.
            row.push(format!("{}", d.baseline()[i]));
            row.push(format!("{}", d.outcome()[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<TrialSet> {
        read_trial_csv(text.as_bytes(), &IngestOptions::default())
    }

    #[test]
    fn two_rows_one_stratum() {
        let s = read("subject,stratum,treatment,baseline_y,outcome_y\n1,s,A,0.5,1\n2,s,B,0.25,2\n").unwrap();
        let d = s.endpoint("y").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.treatment(), &[0, 1]);
        assert_eq!(s.arms, ["A".to_string(), "B".to_string()]);
    }

    #[test]
    fn treatment_reference_flag() {
        let opts = IngestOptions {
            treatment_ref: Some("B".into()),
            ..Default::default()
        };
        let s = read_trial_csv(
            "subject,stratum,treatment,baseline_y,outcome_y\n1,s,A,0,1\n2,s,B,0,2\n".as_bytes(),
            &opts,
        )
        .unwrap();
        assert_eq!(s.endpoint("y").unwrap().treatment(), &[1, 0]);
        let opts = IngestOptions {
            treatment_ref: Some("C".into()),
            ..Default::default()
        };
        assert!(read_trial_csv("subject,stratum,treatment,baseline_y,outcome_y\n1,s,A,0,1\n2,s,B,0,2\n".as_bytes(), &opts).is_err());
    }

    #[test]
    fn single_arm_stratum_is_named() {
        let err = read(
            "subject,stratum,treatment,baseline_y,outcome_y\n1,site_1,A,0,1\n2,site_1,B,0,2\n3,site_3,A,0,1\n4,site_3,A,1,1\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("site_3"), "{err}");
    }

    #[test]
    fn missing_cells_report_lines() {
        let err = read(
            "subject,stratum,treatment,baseline_y,outcome_y\n1,s,A,0,1\n2,s,B,,2\n3,s,A,0,NA\n4,s,B,0,1\n",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line(s) 3, 4"), "{msg}");
    }

    #[test]
    fn non_numeric_and_missing_columns() {
        let err = read("subject,stratum,treatment,baseline_y,outcome_y\n1,s,A,zero,1\n2,s,B,0,2\n").unwrap_err();
        assert!(err.to_string().contains("baseline_y"), "{err}");
        let err = read("subject,treatment,baseline_y,outcome_y\n1,A,0,1\n").unwrap_err();
        assert!(err.to_string().contains("stratum"), "{err}");
    }

    #[test]
    fn seven_endpoints() {
        let names = [
            "daily_heart",
            "daily_regurg",
            "daily_dysp",
            "daily_hrdq",
            "heart_freq",
            "regurg_freq",
            "dysp_freq",
        ];
        let mut text = String::from("subject,stratum,treatment");
        for n in names {
            text += &format!(",baseline_{n},outcome_{n}");
        }
        text.push('\n');
        for i in 0..8 {
            text += &format!("{i},site_{},{}", i % 2, if i < 4 { "A" } else { "B" });
            for k in 0..7 {
                text += &format!(",{},{}", i + k, 0.5 * (i * k) as f64);
            }
            text.push('\n');
        }
        let s = read(&text).unwrap();
        assert_eq!(s.endpoint_names(), names.to_vec());
    }

    #[test]
    fn round_trip() {
        let text = "subject,stratum,treatment,baseline_a,outcome_a,baseline_b,outcome_b\n\
                    s1,x,ctl,0.1,0.30000000000000004,1,2\n\
                    s2,x,trt,1e-7,-3.5,2,3\n\
                    s3,y,ctl,2,1,3,4\n\
                    s4,y,trt,3,2,4,5\n";
        let s = read(text).unwrap();
        let mut buf = Vec::new();
        write_trial_csv(&mut buf, &s).unwrap();
        let back = read(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, s);
    }
}
