use rand::Rng;

use super::layout::StratumLayout;
use crate::error::{Error, Result};

/// Reusable buffers for drawing assignments and permutations on a layout.
#[derive(Debug, Clone)]
pub struct Sampler {
    sizes: Vec<usize>,
    treated: Vec<usize>,
    offsets: Vec<usize>,
    scratch: Vec<usize>,
}

impl Sampler {
    pub fn new(layout: &StratumLayout) -> Self {
        Self {
            sizes: layout.sizes().to_vec(),
            treated: layout.treated().to_vec(),
            offsets: layout.offsets(),
            scratch: Vec::with_capacity(layout.sizes().iter().copied().max().unwrap_or(0)),
        }
    }

    /// Uniform stratified assignment; writes treated unit positions into `out`,
    /// stratum by stratum.
    pub fn treated_positions<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut Vec<usize>) {
        out.clear();
        for j in 0..self.sizes.len() {
            let n = self.sizes[j];
            self.scratch.clear();
            self.scratch.extend(0..n);
            for i in 0..self.treated[j] {
                let k = rng.random_range(i..n);
                self.scratch.swap(i, k);
                out.push(self.offsets[j] + self.scratch[i]);
            }
        }
    }

    /// Uniform within-stratum permutation as a source map: position `p` takes
    /// the value at `out[p]`.
    pub fn permutation<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut [usize]) {
        for (j, &n) in self.sizes.iter().enumerate() {
            let o = self.offsets[j];
            let seg = &mut out[o..o + n];
            for (a, v) in seg.iter_mut().enumerate() {
                *v = o + a;
            }
            for i in (1..n).rev() {
                let k = rng.random_range(0..=i);
                seg.swap(i, k);
            }
        }
    }
}

/// One uniformly drawn stratified assignment, as a 0/1 vector in
/// stratum-contiguous unit order.
pub fn sample_assignment<R: Rng + ?Sized>(layout: &StratumLayout, rng: &mut R) -> Vec<u8> {
    let mut sampler = Sampler::new(layout);
    let mut treated = Vec::with_capacity(layout.n_treated());
    sampler.treated_positions(rng, &mut treated);
    let mut z = vec![0u8; layout.n_units()];
    for p in treated {
        z[p] = 1;
    }
    z
}

/// Shuffles `values` uniformly within each stratum; `strata[i]` labels unit `i`.
pub fn permute_within_strata<R: Rng + ?Sized>(
    values: &[f64],
    strata: &[usize],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if values.len() != strata.len() {
        return Err(Error::LengthMismatch {
            what: "values",
            expected: strata.len(),
            got: values.len(),
        });
    }
    let n_strata = strata.iter().map(|&s| s + 1).max().unwrap_or(0);
    let mut groups = vec![Vec::new(); n_strata];
    for (i, &s) in strata.iter().enumerate() {
        groups[s].push(i);
    }
    let mut out = values.to_vec();
    for units in &groups {
        let mut pool: Vec<f64> = units.iter().map(|&i| values[i]).collect();
        for i in (1..pool.len()).rev() {
            let k = rng.random_range(0..=i);
            pool.swap(i, k);
        }
        for (&i, v) in units.iter().zip(pool) {
            out[i] = v;
        }
    }
    Ok(out)
}
