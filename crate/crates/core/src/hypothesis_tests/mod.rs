//! Parametric ANCOVA and the permutation test battery.

mod diagnostic;
mod engine;
mod npc;
mod regression;
mod result;
mod stratified;

pub use diagnostic::{exchangeability_diagnostic, residual_correlation_test, CONCERN_LEVEL};
pub use npc::{npc_combine, stratified_npc, Combiner};
pub use regression::{ancova_parametric, freedman_lane, kennedy_test, lm_permutation, manly_test};
pub use result::{Flag, Method, NullSummary, TestResult};
pub use stratified::{stratified_change_scores, stratified_diff_means, stratified_sum_abs};

use crate::error::Result;
use crate::randomization::PermutationPlan;
use crate::trial::TrialData;

/// Runs `method` on `data`. ANCOVA ignores the plan; NPC uses Fisher's combiner.
pub fn run_method(method: Method, data: &TrialData, plan: &PermutationPlan) -> Result<TestResult> {
    match method {
        Method::Ancova => ancova_parametric(data),
        Method::StratifiedDiffMeans => stratified_diff_means(data, plan),
        Method::StratifiedSumAbs => stratified_sum_abs(data, plan),
        Method::StratifiedChangeScores => stratified_change_scores(data, plan),
        Method::LmPermutation => lm_permutation(data, plan),
        Method::FreedmanLane => freedman_lane(data, plan),
        Method::Kennedy => kennedy_test(data, plan),
        Method::Manly => manly_test(data, plan),
        Method::Npc => stratified_npc(data, plan, Combiner::Fisher),
        Method::Exchangeability => exchangeability_diagnostic(data, plan),
    }
}
