//! Per-stratum tests pooled by nonparametric combination.

use permancova::hypothesis_tests::{stratified_npc, Combiner};
use permancova::randomization::PermutationPlan;
use permancova::TrialData;

fn main() -> permancova::Result<()> {
    let strata = ["s1", "s1", "s1", "s1", "s1", "s1", "s2", "s2", "s2", "s2", "s2", "s2", "s3", "s3", "s3", "s3"];
    let z = vec![1, 1, 1, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 0];
    let x = vec![0.0; 16];
    let y = vec![
        3.1, 2.7, 3.4, 1.9, 2.2, 1.8, 2.5, 2.4, 2.9, 2.0, 2.6, 2.3, 4.0, 3.2, 3.3, 2.1,
    ];
    let data = TrialData::new(&strata, z, x, y)?;
    let plan = PermutationPlan::monte_carlo(data.layout(), 10_000, 5)?;
    for c in [Combiner::Fisher, Combiner::Tippett, Combiner::Liptak] {
        let r = stratified_npc(&data, &plan, c)?;
        let partial: Vec<String> = r.partial_p.iter().flatten().map(|p| format!("{p:.4}")).collect();
        println!("{:<8} combined {:.4} global p {:.4} partial p [{}]", c.to_string(), r.statistic, r.p(), partial.join(", "));
    }
    Ok(())
}
