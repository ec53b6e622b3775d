//! Power against effect size, written as plot-ready CSV on stdout.
//!
//! cargo run --release --example power_curve -- [discrete] [heterogeneous]

use permancova::sim_engine::{power_ratio_table, run_power_study, Family, Latent, ScenarioConfig};
use permancova::hypothesis_tests::Method;

fn main() -> permancova::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let family = if args.iter().any(|a| a == "discrete") { Family::Discrete } else { Family::Continuous };
    let latent = if args.iter().any(|a| a == "heterogeneous") { Latent::Heterogeneous } else { Latent::Homogeneous };
    println!("gamma,test,rate,se,ratio_to_ancova");
    for gamma in [0.0, 0.05, 0.1, 0.15, 0.2] {
        let mut c = ScenarioConfig::new(format!("curve_{gamma}"), gamma);
        c.family = family;
        c.latent = latent;
        c.replications = 400;
        c.inner_b = 499;
        let s = run_power_study(&c)?;
        let reference = s.estimates.iter().find(|e| e.method == Method::Ancova).unwrap();
        let ratios = power_ratio_table(&s.estimates, reference).ok();
        for (k, e) in s.estimates.iter().enumerate() {
            let ratio = ratios.as_ref().map_or(String::new(), |r| format!("{:.3}", r[k].1));
            println!("{gamma},{},{:.4},{:.4},{ratio}", e.method, e.rate, e.se);
        }
    }
    Ok(())
}
