//! Residual exchangeability check before trusting Freedman-Lane.
//!
//! In the second trial the outcome's slope on the baseline differs by
//! stratum, which a common-slope model leaves in the residuals.

use permancova::hypothesis_tests::{exchangeability_diagnostic, freedman_lane, lm_permutation, CONCERN_LEVEL};
use permancova::randomization::{stream, PermutationPlan};
use permancova::TrialData;
use rand::Rng;

fn trial(slopes: [f64; 3]) -> permancova::Result<TrialData> {
    let mut rng = stream(31, 0);
    let (mut s, mut z, mut x, mut y) = (vec![], vec![], vec![], vec![]);
    for (j, b) in slopes.iter().enumerate() {
        for i in 0..12 {
            let xi: f64 = rng.random_range(-2.0..2.0);
            s.push(j);
            z.push(u8::from(i % 2 == 0));
            x.push(xi);
            y.push(b * xi + rng.random_range(-0.3..0.3));
        }
    }
    TrialData::new(&s, z, x, y)
}

fn main() -> permancova::Result<()> {
    for (label, slopes) in [("common slope", [1.0, 1.0, 1.0]), ("varying slope", [2.0, -1.5, 0.0])] {
        let data = trial(slopes)?;
        let plan = PermutationPlan::monte_carlo(data.layout(), 5_000, 8)?;
        let d = exchangeability_diagnostic(&data, &plan)?;
        let fl = freedman_lane(&data, &plan)?;
        let lm = lm_permutation(&data, &plan)?;
        println!(
            "{label:<14} diagnostic p {:.4}{}  FL p {:.4}  LM p {:.4}",
            d.p(),
            if d.p() <= CONCERN_LEVEL { " (concern)" } else { "" },
            fl.p(),
            lm.p()
        );
    }
    Ok(())
}
