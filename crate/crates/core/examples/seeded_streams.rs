//! Reproducible stratified assignments from counter-based streams.

use permancova::randomization::{derive_seed, sample_assignment, stream, tag_of, StratumLayout};

fn main() -> permancova::Result<()> {
    let layout = StratumLayout::new(vec![6, 4, 5], vec![3, 2, 1])?;
    let seed = derive_seed(2024, tag_of("freedman_lane"));
    for b in 0..4 {
        let z = sample_assignment(&layout, &mut stream(seed, b));
        let text: String = z.iter().map(|v| if *v == 1 { '1' } else { '.' }).collect();
        println!("draw {b}: {text}");
    }
    // The same (seed, index) pair always gives the same draw.
    assert_eq!(sample_assignment(&layout, &mut stream(seed, 2)), sample_assignment(&layout, &mut stream(seed, 2)));
    Ok(())
}
