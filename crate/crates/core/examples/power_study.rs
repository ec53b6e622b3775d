//! Power of the four core tests for one scenario.
//!
//! cargo run --release --example power_study -- [scenario.toml] [--fast]

use std::path::Path;

use permancova::sim_engine::{power_ratio_table, run_power_study, ScenarioConfig};
use permancova::hypothesis_tests::Method;

fn main() -> permancova::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fast = args.iter().any(|a| a == "--fast");
    let mut config = match args.iter().find(|a| !a.starts_with("--")) {
        Some(path) => ScenarioConfig::load(Path::new(path))?,
        None => {
            let mut c = ScenarioConfig::new("constant_normal", 0.2);
            c.replications = 500;
            c.inner_b = 499;
            c
        }
    };
    if fast {
        config = config.fast();
    }
    let t0 = std::time::Instant::now();
    let study = run_power_study(&config)?;
    println!(
        "{}: R={} B={} mean sample ATE {:.3} ({:.1}s)",
        study.scenario,
        study.replications,
        study.inner_b,
        study.mean_sample_ate,
        t0.elapsed().as_secs_f64()
    );
    for e in &study.estimates {
        println!("  {:<26} {:.4} (se {:.4})", e.method.name(), e.rate, e.se);
    }
    if let Some(reference) = study.estimates.iter().find(|e| e.method == Method::Ancova) {
        if let Ok(ratios) = power_ratio_table(&study.estimates, reference) {
            let text: Vec<String> = ratios.iter().map(|(m, r)| format!("{m}={r:.3}")).collect();
            println!("  ratio to ANCOVA: {}", text.join(" "));
        }
    }
    Ok(())
}
