use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis_tests::Method;
use crate::randomization::{StratumLayout, DEFAULT_DRAWS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Additive effect `gamma * e^v`.
    Continuous,
    /// Continuous population with integer-truncated baseline and outcomes.
    Discrete,
    /// Multiplicative effect `(1 + gamma)^Z X`.
    Nonlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Latent {
    /// `v ~ Unif[-4, 4]` in every stratum.
    Homogeneous,
    /// `Unif[-4, -1]`, `Unif[-1, 1]`, `Unif[1, 4]` in strata 1 to 3.
    Heterogeneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorDist {
    Normal,
    /// Normal with sd 1 when `|X| <= 1` and sd 2 otherwise; applies to the
    /// outcome disturbance only.
    HeteroskedasticNormal,
    T2,
    /// `exp(N(0, 1))`, not centred.
    Lognormal,
    /// `Exp(1) - 1`.
    ShiftedExponential,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    #[default]
    TowardZero,
    Floor,
}

impl Truncation {
    pub fn apply(self, v: f64) -> f64 {
        match self {
            Truncation::TowardZero => v.trunc(),
            Truncation::Floor => v.floor(),
        }
    }
}

fn default_sizes() -> Vec<usize> {
    vec![16; 3]
}

fn default_treated() -> Vec<usize> {
    vec![8; 3]
}

fn default_replications() -> usize {
    10_000
}

fn default_tests() -> Vec<Method> {
    Method::CORE.to_vec()
}

fn default_alpha() -> f64 {
    0.05
}

fn default_inner_b() -> usize {
    DEFAULT_DRAWS
}

fn default_seed() -> u64 {
    1
}

/// One simulation scenario, read from a TOML file.
///
/// ```toml
/// id = "constant_normal"
/// family = "continuous"
/// latent = "homogeneous"
/// error_dist = "normal"
/// gamma = 0.2
/// sizes = [16, 16, 16]
/// treated = [8, 8, 8]
/// replications = 10000
/// tests = ["ancova", "stratified_diff_means", "lm_permutation", "freedman_lane"]
/// alpha = 0.05
/// inner_b = 10000
/// master_seed = 1
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub family: Family,
    pub latent: Latent,
    pub error_dist: ErrorDist,
    pub gamma: f64,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_treated")]
    pub treated: Vec<usize>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_tests")]
    pub tests: Vec<Method>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_inner_b")]
    pub inner_b: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default)]
    pub truncation: Truncation,
}

impl ScenarioConfig {
    /// Continuous, homogeneous, normal errors on 3 strata of 16 with 8 treated.
    pub fn new(id: impl Into<String>, gamma: f64) -> Self {
        Self {
            id: id.into(),
            family: Family::Continuous,
            latent: Latent::Homogeneous,
            error_dist: ErrorDist::Normal,
            gamma,
            sizes: default_sizes(),
            treated: default_treated(),
            replications: default_replications(),
            tests: default_tests(),
            alpha: default_alpha(),
            inner_b: default_inner_b(),
            master_seed: default_seed(),
            truncation: Truncation::default(),
        }
    }

    pub fn layout(&self) -> Result<StratumLayout> {
        StratumLayout::new(self.sizes.clone(), self.treated.clone())
    }

    /// Reduced profile: at most 2,000 replications and 999 inner draws.
    pub fn fast(mut self) -> Self {
        self.replications = self.replications.min(2_000);
        self.inner_b = 999;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidData(format!("scenario `{}`: {m}", self.id)));
        let layout = self.layout()?;
        if self.latent == Latent::Heterogeneous && layout.n_strata() != 3 {
            return fail(format!(
                "heterogeneous latent variables need exactly 3 strata, got {}",
                layout.n_strata()
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return fail(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be finite and >= 0, got {}", self.gamma));
        }
        if self.replications == 0 {
            return fail("replications must be positive".into());
        }
        if self.inner_b == 0 {
            return fail("inner_b must be positive".into());
        }
        if self.tests.is_empty() {
            return fail("no tests listed".into());
        }
        if self.family == Family::Discrete && self.error_dist != ErrorDist::Normal {
            return fail("the discrete family uses normal errors only".into());
        }
        Ok(())
    }

    /// Parses and validates TOML text; `path` is used in error messages only.
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            line: e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1),
            message: e.message().to_string(),
        })?;
        config.validate().map_err(|e| Error::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Input {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let text = "id = \"a\"\nfamily = \"continuous\"\nlatent = \"homogeneous\"\nerror_dist = \"t2\"\ngamma = 0.1\n";
        let c = ScenarioConfig::from_toml_str(text, Path::new("a.toml")).unwrap();
        assert_eq!(c.sizes, vec![16, 16, 16]);
        assert_eq!(c.tests, Method::CORE.to_vec());
        assert_eq!(c.inner_b, 10_000);
        assert_eq!(c.error_dist, ErrorDist::T2);
        assert_eq!(c.truncation, Truncation::TowardZero);
    }

    #[test]
    fn parse_error_reports_line() {
        let text = "id = \"a\"\nfamily = \"continuous\"\nlatent = \"sideways\"\nerror_dist = \"normal\"\ngamma = 0.1\n";
        match ScenarioConfig::from_toml_str(text, Path::new("bad.toml")) {
            Err(Error::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn validation() {
        let mut c = ScenarioConfig::new("x", 0.0);
        c.latent = Latent::Heterogeneous;
        c.sizes = vec![16; 2];
        c.treated = vec![8; 2];
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::new("x", 0.0);
        c.alpha = 1.0;
        assert!(c.validate().is_err());
        let mut c = ScenarioConfig::new("x", 0.0);
        c.family = Family::Discrete;
        c.error_dist = ErrorDist::T2;
        assert!(c.validate().is_err());
        assert!(ScenarioConfig::new("x", 0.2).validate().is_ok());
    }

    #[test]
    fn round_trips_through_toml() {
        let mut c = ScenarioConfig::new("rt", 0.15);
        c.tests = vec![Method::Kennedy, Method::Npc];
        let back = ScenarioConfig::from_toml_str(&c.to_toml(), Path::new("rt.toml")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn truncation_rules() {
        assert_eq!(Truncation::TowardZero.apply(2.7), 2.0);
        assert_eq!(Truncation::TowardZero.apply(-2.7), -2.0);
        assert_eq!(Truncation::Floor.apply(-2.7), -3.0);
    }
}
