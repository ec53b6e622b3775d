//! Stratified treatment assignment, within-stratum permutation, exact
//! enumeration of small reference sets, and p-values from null draws.
//!
//! Monte-Carlo draw `b` always uses [`stream`]`(seed, b)`, so a null
//! distribution is bit-identical whatever the number of worker threads.

mod enumerate;
mod layout;
mod pvalue;
mod sampling;
mod seed;

pub use enumerate::{
    count_assignments, count_within_strata_permutations, enumerate_assignments, AssignmentSpace,
    PermutationSpace,
};
pub use layout::{PermutationPlan, PlanMode, StratumLayout, DEFAULT_DRAWS, DEFAULT_EXACT_CAP};
pub use pvalue::{monte_carlo_pvalue, pvalue, PValue, PValueMode, Tail, TIE_TOLERANCE};
pub use sampling::{permute_within_strata, sample_assignment, Sampler};
pub use seed::{derive_seed, stream, tag_of, Stream};

