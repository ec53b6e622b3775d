//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use permancova::hypothesis_tests::{run_method, Method};
use permancova::randomization::{stream, PermutationPlan, StratumLayout};
use permancova::TrialData;
use rand::Rng;

/// OLS through the normal equations solved by Gauss-Jordan elimination.
/// `cols` are the design columns. Returns coefficients and `diag((A'A)^-1)`.
pub fn normal_equations(cols: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let p = cols.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut m = vec![vec![0.0; 2 * p]; p];
    for i in 0..p {
        for j in 0..p {
            m[i][j] = dot(&cols[i], &cols[j]);
        }
        m[i][p + i] = 1.0;
    }
    for c in 0..p {
        let piv = (c..p)
            .max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))
            .unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        for v in &mut m[c] {
            *v /= d;
        }
        for r in 0..p {
            if r != c {
                let f = m[r][c];
                for k in 0..2 * p {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
    }
    let aty: Vec<f64> = cols.iter().map(|c| dot(c, y)).collect();
    let beta = (0..p).map(|i| (0..p).map(|j| m[i][p + j] * aty[j]).sum()).collect();
    let diag = (0..p).map(|i| m[i][p + i]).collect();
    (beta, diag)
}

/// t statistic of the last column.
pub fn last_t(cols: &[Vec<f64>], y: &[f64]) -> f64 {
    let (beta, diag) = normal_equations(cols, y);
    let n = y.len();
    let p = cols.len();
    let rss: f64 = (0..n)
        .map(|i| {
            let fit: f64 = (0..p).map(|k| cols[k][i] * beta[k]).sum();
            (y[i] - fit).powi(2)
        })
        .sum();
    let s2 = rss / (n - p) as f64;
    beta[p - 1] / (s2 * diag[p - 1]).sqrt()
}

pub fn indicators(strata: &[usize]) -> Vec<Vec<f64>> {
    let j = strata.iter().max().unwrap() + 1;
    (0..j)
        .map(|s| strata.iter().map(|&v| f64::from(u8::from(v == s))).collect())
        .collect()
}

/// ANCOVA treatment t: strata, baseline, treatment.
pub fn ancova_t(strata: &[usize], x: &[f64], z: &[u8], y: &[f64]) -> f64 {
    let mut cols = indicators(strata);
    cols.push(x.to_vec());
    cols.push(z.iter().map(|&v| f64::from(v)).collect());
    last_t(&cols, y)
}

/// Null-model (strata + baseline) residuals.
pub fn null_residuals(strata: &[usize], x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut cols = indicators(strata);
    cols.push(x.to_vec());
    let (beta, _) = normal_equations(&cols, y);
    (0..y.len())
        .map(|i| y[i] - (0..cols.len()).map(|k| cols[k][i] * beta[k]).sum::<f64>())
        .collect()
}

/// All k-subsets of 0..n, by recursion.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = subsets(n - 1, k - 1);
    for s in &mut with {
        s.push(n - 1);
    }
    let mut out = subsets(n - 1, k);
    out.extend(with);
    out
}

/// All permutations of 0..n, by recursion (Heap-free insertion).
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every stratified 0/1 assignment for contiguous strata of the given sizes.
pub fn all_assignments(sizes: &[usize], treated: &[usize]) -> Vec<Vec<u8>> {
    let mut acc: Vec<Vec<u8>> = vec![vec![]];
    for (&n, &t) in sizes.iter().zip(treated) {
        let mut next = Vec::new();
        for prefix in &acc {
            for s in subsets(n, t) {
                let mut z = prefix.clone();
                let mut block = vec![0u8; n];
                for i in s {
                    block[i] = 1;
                }
                z.extend(block);
                next.push(z);
            }
        }
        acc = next;
    }
    acc
}

/// Every within-stratum permutation as a source map over contiguous strata.
pub fn all_within_permutations(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut acc: Vec<Vec<usize>> = vec![vec![]];
    let mut offset = 0;
    for &n in sizes {
        let mut next = Vec::new();
        for prefix in &acc {
            for p in permutations(n) {
                let mut m = prefix.clone();
                m.extend(p.iter().map(|&i| i + offset));
                next.push(m);
            }
        }
        acc = next;
        offset += n;
    }
    acc
}

pub fn strata_of(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(j, &n)| std::iter::repeat_n(j, n))
        .collect()
}

/// Exact p: share of reference statistics with magnitude at least the observed one.
pub fn exact_two_sided(observed: f64, reference: &[f64]) -> f64 {
    reference.iter().filter(|v| v.abs() >= observed.abs() - 1e-12).count() as f64 / reference.len() as f64
}

pub fn exact_upper(observed: f64, reference: &[f64]) -> f64 {
    reference.iter().filter(|&&v| v >= observed - 1e-12).count() as f64 / reference.len() as f64
}

pub fn diff_means(z: &[u8], y: &[f64]) -> f64 {
    let (mut s1, mut n1, mut s0, mut n0) = (0.0, 0.0, 0.0, 0.0);
    for (&t, &v) in z.iter().zip(y) {
        if t == 1 {
            s1 += v;
            n1 += 1.0;
        } else {
            s0 += v;
            n0 += 1.0;
        }
    }
    s1 / n1 - s0 / n0
}

/// Random contiguous-strata trial with outcome `slope * x + noise`.
pub fn random_trial(seed: u64, sizes: &[usize], treated: &[usize], slope: f64, effect: f64) -> TrialData {
    let mut rng = stream(seed, 99);
    let strata = strata_of(sizes);
    let mut z = Vec::new();
    for (&n, &t) in sizes.iter().zip(treated) {
        let mut block: Vec<u8> = (0..n).map(|i| u8::from(i < t)).collect();
        for i in (1..n).rev() {
            let k = rng.random_range(0..=i);
            block.swap(i, k);
        }
        z.extend(block);
    }
    let x: Vec<f64> = strata.iter().map(|&s| s as f64 + rng.random_range(-1.0..1.0)).collect();
    let y: Vec<f64> = (0..strata.len())
        .map(|i| slope * x[i] + effect * f64::from(z[i]) + 0.3 * strata[i] as f64 + rng.random_range(-1.0..1.0))
        .collect();
    TrialData::new(&strata, z, x, y).unwrap()
}

/// Tests whose reference set is generated by re-randomizing the assignment.
pub const ASSIGNMENT_TESTS: [Method; 5] = [
    Method::StratifiedDiffMeans,
    Method::StratifiedSumAbs,
    Method::StratifiedChangeScores,
    Method::LmPermutation,
    Method::Npc,
];

/// Tests whose reference set permutes residuals, outcomes or covariates.
pub const RESIDUAL_TESTS: [Method; 4] = [
    Method::FreedmanLane,
    Method::Kennedy,
    Method::Manly,
    Method::Exchangeability,
];

/// Exact p-values of `method` with every assignment of `sizes`/`treated`
/// taken in turn as the observed one. Outcome and baseline stay fixed, so the
/// sharp null holds.
pub fn exact_p_over_assignments(
    method: Method,
    sizes: &[usize],
    treated: &[usize],
    x: &[f64],
    y: &[f64],
) -> Vec<f64> {
    let strata = strata_of(sizes);
    let plan = PermutationPlan::exact(StratumLayout::new(sizes.to_vec(), treated.to_vec()).unwrap());
    all_assignments(sizes, treated)
        .into_iter()
        .map(|z| {
            let data = TrialData::new(&strata, z, x.to_vec(), y.to_vec()).unwrap();
            run_method(method, &data, &plan).unwrap().p()
        })
        .collect()
}

/// Sharp-null population: baseline and outcome share a linear trend, the
/// outcome ignores treatment.
pub fn sharp_null_population(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut rng = stream(seed, 7);
    let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y = x.iter().map(|xi| xi + rng.random_range(-1.0..1.0)).collect();
    (x, y)
}

/// Rejection rate at each `alpha` of exact p-values pooled over `populations`
/// sharp-null populations and all their assignments.
pub fn sharp_null_rejection_rates(
    method: Method,
    sizes: &[usize],
    treated: &[usize],
    populations: u64,
    alphas: &[f64],
) -> Vec<f64> {
    let n: usize = sizes.iter().sum();
    let mut hits = vec![0usize; alphas.len()];
    let mut total = 0usize;
    for s in 0..populations {
        let (x, y) = sharp_null_population(s, n);
        for p in exact_p_over_assignments(method, sizes, treated, &x, &y) {
            for (h, &a) in hits.iter_mut().zip(alphas) {
                *h += usize::from(p <= a + 1e-12);
            }
            total += 1;
        }
    }
    hits.iter().map(|&h| h as f64 / total as f64).collect()
}
