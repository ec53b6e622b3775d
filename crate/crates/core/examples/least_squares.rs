//! The ANCOVA fit by hand: design matrix, QR solve, and the treatment t test.

use permancova::linear_model::{build_design, fit_least_squares, student_t_two_sided_p};
use permancova::TrialData;

fn main() -> permancova::Result<()> {
    let strata = [1, 1, 1, 1, 2, 2, 2, 2, 2, 2];
    let z = vec![1, 0, 1, 0, 0, 1, 1, 0, 1, 0];
    let x = vec![0.5, 1.5, 2.5, 3.0, 1.0, 2.0, 0.2, 2.8, 1.1, 0.4];
    let y = vec![1.9, 1.7, 3.9, 3.1, 1.2, 3.6, 1.4, 2.9, 2.6, 0.3];
    let data = TrialData::new(&strata, z, x, y)?;
    let design = build_design(&data, true);
    let fit = fit_least_squares(&design, data.outcome())?;
    for (k, b) in fit.coefficients.iter().enumerate() {
        println!("{:<12} {b:>8.4} (se {:.4})", design.name(k), fit.standard_errors[k]);
    }
    let t = fit.treatment_t.expect("treatment column present");
    println!("t = {t:.4} on {} df, two-sided p = {:.4}", fit.df, student_t_two_sided_p(t, fit.df as u64)?);
    Ok(())
}
