use crate::error::{Error, Result};

/// Default number of Monte-Carlo re-randomizations.
pub const DEFAULT_DRAWS: usize = 10_000;

/// Largest reference set exact mode will enumerate.
pub const DEFAULT_EXACT_CAP: u64 = 1_000_000;

/// Units and treated units per stratum. Units are taken to be stored
/// stratum-contiguously: stratum 0 first, then stratum 1, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StratumLayout {
    sizes: Vec<usize>,
    treated: Vec<usize>,
}

impl StratumLayout {
    pub fn new(sizes: Vec<usize>, treated: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidLayout("at least one stratum is required".into()));
        }
        if sizes.len() != treated.len() {
            return Err(Error::InvalidLayout(format!(
                "{} stratum sizes but {} treated counts",
                sizes.len(),
                treated.len()
            )));
        }
        for (j, (&n, &t)) in sizes.iter().zip(&treated).enumerate() {
            if t == 0 || t >= n {
                return Err(Error::InvalidLayout(format!(
                    "stratum {j}: need 0 < treated < size, got {t} of {n}"
                )));
            }
        }
        Ok(Self { sizes, treated })
    }

    /// `J` strata of equal size with equal treated counts.
    pub fn balanced(strata: usize, size: usize, treated: usize) -> Result<Self> {
        Self::new(vec![size; strata], vec![treated; strata])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn treated(&self) -> &[usize] {
        &self.treated
    }

    pub fn n_strata(&self) -> usize {
        self.sizes.len()
    }

    pub fn n_units(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn n_treated(&self) -> usize {
        self.treated.iter().sum()
    }

    /// First unit position of every stratum.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.sizes
            .iter()
            .map(|&n| {
                let o = acc;
                acc += n;
                o
            })
            .collect()
    }

    /// Canonical stratum index for each unit position.
    pub fn stratum_of_units(&self) -> Vec<usize> {
        self.sizes
            .iter()
            .enumerate()
            .flat_map(|(j, &n)| std::iter::repeat_n(j, n))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanMode {
    Exact,
    MonteCarlo,
}

/// How a permutation test builds its reference distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationPlan {
    pub layout: StratumLayout,
    pub mode: PlanMode,
    /// Monte-Carlo draws `B`; ignored in exact mode.
    pub draws: usize,
    pub seed: u64,
    pub exact_cap: u64,
}

impl PermutationPlan {
    pub fn monte_carlo(layout: StratumLayout, draws: usize, seed: u64) -> Result<Self> {
        if draws == 0 {
            return Err(Error::InvalidLayout("Monte-Carlo plan needs at least one draw".into()));
        }
        Ok(Self {
            layout,
            mode: PlanMode::MonteCarlo,
            draws,
            seed,
            exact_cap: DEFAULT_EXACT_CAP,
        })
    }

    pub fn exact(layout: StratumLayout) -> Self {
        Self {
            layout,
            mode: PlanMode::Exact,
            draws: 0,
            seed: 0,
            exact_cap: DEFAULT_EXACT_CAP,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.exact_cap = cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
