//! Power and level when the number treated differs across strata.

use permancova::sim_engine::{run_power_study, Latent, ScenarioConfig};

fn main() -> permancova::Result<()> {
    for treated in [[4, 4, 4], [12, 12, 12], [4, 8, 12], [12, 8, 4]] {
        for gamma in [0.0, 0.2] {
            let mut c = ScenarioConfig::new(format!("{treated:?}"), gamma);
            c.latent = Latent::Heterogeneous;
            c.treated = treated.to_vec();
            c.replications = 400;
            c.inner_b = 499;
            let s = run_power_study(&c)?;
            let rates: Vec<String> = s.estimates.iter().map(|e| format!("{}={:.3}", e.method, e.rate)).collect();
            println!("treated {treated:?} gamma {gamma}: {}", rates.join(" "));
        }
    }
    Ok(())
}
