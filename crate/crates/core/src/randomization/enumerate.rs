//! Exact reference sets: all stratified assignments, or all within-stratum
//! permutations, addressed by a mixed-radix index so they can be visited in
//! parallel without materializing the whole set.

use num_bigint::BigUint;

use super::layout::StratumLayout;
use crate::error::{Error, Result};

fn binomial(n: usize, k: usize) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i))
}

/// Number of stratified assignments, the product of `C(n_j, n_j^T)`.
pub fn count_assignments(layout: &StratumLayout) -> BigUint {
    layout
        .sizes()
        .iter()
        .zip(layout.treated())
        .map(|(&n, &t)| binomial(n, t))
        .product()
}

/// Number of permutations that only move units within their stratum, `prod n_j!`.
pub fn count_within_strata_permutations(layout: &StratumLayout) -> BigUint {
    layout.sizes().iter().map(|&n| factorial(n)).product()
}

fn check_cap(count: &BigUint, cap: u64) -> Result<u64> {
    match u64::try_from(count) {
        Ok(c) if c <= cap => Ok(c),
        _ => Err(Error::TooManyConfigurations {
            count: count.to_string(),
            cap,
        }),
    }
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = vec![cur.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
        out.push(cur.clone());
    }
}

fn decode(mut k: u64, radices: &[u64], digits: &mut [usize]) {
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = (k % r) as usize;
        k /= r;
    }
}

/// Every stratified assignment, indexable in `0..len()`.
///
/// Index order is lexicographic on the treatment vector read as descending
/// (the first stratum varies slowest, and within a stratum treated sets are
/// visited in lexicographic order of their positions).
#[derive(Debug, Clone)]
pub struct AssignmentSpace {
    offsets: Vec<usize>,
    combos: Vec<Vec<Vec<usize>>>,
    radices: Vec<u64>,
    len: u64,
}

impl AssignmentSpace {
    pub fn new(layout: &StratumLayout, cap: u64) -> Result<Self> {
        let len = check_cap(&count_assignments(layout), cap)?;
        let combos: Vec<_> = layout
            .sizes()
            .iter()
            .zip(layout.treated())
            .map(|(&n, &t)| combinations(n, t))
            .collect();
        let radices = combos.iter().map(|c| c.len() as u64).collect();
        Ok(Self {
            offsets: layout.offsets(),
            combos,
            radices,
            len,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Writes the treated unit positions of assignment `k` into `out`.
    pub fn treated_positions(&self, k: u64, digits: &mut [usize], out: &mut Vec<usize>) {
        decode(k, &self.radices, digits);
        out.clear();
        for (j, &d) in digits.iter().enumerate() {
            out.extend(self.combos[j][d].iter().map(|&p| p + self.offsets[j]));
        }
    }

    pub fn n_strata(&self) -> usize {
        self.radices.len()
    }
}

/// Every within-stratum permutation, indexable in `0..len()`.
#[derive(Debug, Clone)]
pub struct PermutationSpace {
    offsets: Vec<usize>,
    perms: Vec<Vec<Vec<usize>>>,
    radices: Vec<u64>,
    len: u64,
}

impl PermutationSpace {
    pub fn new(layout: &StratumLayout, cap: u64) -> Result<Self> {
        let len = check_cap(&count_within_strata_permutations(layout), cap)?;
        let perms: Vec<_> = layout.sizes().iter().map(|&n| permutations(n)).collect();
        let radices = perms.iter().map(|p| p.len() as u64).collect();
        Ok(Self {
            offsets: layout.offsets(),
            perms,
            radices,
            len,
        })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_strata(&self) -> usize {
        self.radices.len()
    }

    /// Writes permutation `k` as a source map: position `p` takes the value at `out[p]`.
    pub fn permutation(&self, k: u64, digits: &mut [usize], out: &mut [usize]) {
        decode(k, &self.radices, digits);
        for (j, &d) in digits.iter().enumerate() {
            let o = self.offsets[j];
            for (a, &src) in self.perms[j][d].iter().enumerate() {
                out[o + a] = o + src;
            }
        }
    }
}

/// All stratified assignments as 0/1 vectors in stratum-contiguous unit order.
pub fn enumerate_assignments(layout: &StratumLayout, cap: u64) -> Result<Vec<Vec<u8>>> {
    let space = AssignmentSpace::new(layout, cap)?;
    let n = layout.n_units();
    let mut digits = vec![0; space.n_strata()];
    let mut treated = Vec::new();
    Ok((0..space.len())
        .map(|k| {
            space.treated_positions(k, &mut digits, &mut treated);
            let mut z = vec![0u8; n];
            for &p in &treated {
                z[p] = 1;
            }
            z
        })
        .collect())
}
