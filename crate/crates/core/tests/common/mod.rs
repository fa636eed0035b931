//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use mixhist::{
    assign_labels, build_grid, total_score, BinSet, CandidateCuts, Dataset, MixedColumn,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal, Poisson};

/// log2 of Σ n!/(c₁!…c_K!) ∏ (c_i/n)^{c_i} over all compositions of n into K parts.
pub fn brute_regret_bits(n: usize, k: usize) -> f64 {
    fn rec(left: usize, parts: usize, n: usize, acc: f64, fact: &[f64], total: &mut f64) {
        if parts == 1 {
            let c = left;
            let term = if c == 0 { 1.0 } else { (c as f64 / n as f64).powi(c as i32) };
            *total += acc / fact[c] * term;
            return;
        }
        for c in 0..=left {
            let term = if c == 0 { 1.0 } else { (c as f64 / n as f64).powi(c as i32) };
            rec(left - c, parts - 1, n, acc / fact[c] * term, fact, total);
        }
    }
    let fact: Vec<f64> = (0..=n).scan(1.0, |f, i| {
        if i > 0 {
            *f *= i as f64;
        }
        Some(*f)
    }).collect();
    let mut total = 0.0;
    rec(n, k, n, fact[n], &fact, &mut total);
    total.log2()
}

/// Total score in bits of a one-dimensional bin set.
pub fn score_1d(column: &MixedColumn, bins: &BinSet) -> f64 {
    let labels = assign_labels(column, bins).unwrap();
    total_score(&build_grid(&[labels], std::slice::from_ref(bins)).unwrap())
        .unwrap()
        .total
}

/// Minimum score over every subset of interior candidates with at most `k_max` intervals.
pub fn exhaustive_best(column: &MixedColumn, cand: &CandidateCuts, k_max: usize) -> (f64, Vec<usize>) {
    let k = cand.k_init();
    let interior = k - 1;
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 0u32..(1 << interior) {
        if mask.count_ones() as usize + 1 > k_max {
            continue;
        }
        let mut chosen = vec![0];
        chosen.extend((1..k).filter(|i| mask & (1 << (i - 1)) != 0));
        chosen.push(k);
        let bins = BinSet::new(column.atoms(), Some(cand.clone()), chosen.clone(), false).unwrap();
        let s = score_1d(column, &bins);
        if s < best.0 {
            best = (s, chosen);
        }
    }
    best
}

/// d-separation by enumerating every simple path of the skeleton.
pub fn dsep_by_paths(n: usize, edges: &[(usize, usize)], x: usize, y: usize, given: &[usize]) -> bool {
    let mut children = vec![Vec::new(); n];
    for &(p, c) in edges {
        children[p].push(c);
    }
    let descendants = |v: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !seen[u] {
                seen[u] = true;
                stack.extend(&children[u]);
            }
        }
        seen
    };
    let directed = |a: usize, b: usize| edges.contains(&(a, b));
    let adjacent = |a: usize, b: usize| directed(a, b) || directed(b, a);

    fn paths(
        cur: usize,
        y: usize,
        n: usize,
        adjacent: &dyn Fn(usize, usize) -> bool,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur == y {
            out.push(path.clone());
            return;
        }
        for next in 0..n {
            if adjacent(cur, next) && !path.contains(&next) {
                path.push(next);
                paths(next, y, n, adjacent, path, out);
                path.pop();
            }
        }
    }
    let mut all = Vec::new();
    paths(x, y, n, &adjacent, &mut vec![x], &mut all);

    let active = |p: &Vec<usize>| {
        p.windows(3).all(|w| {
            let (a, m, b) = (w[0], w[1], w[2]);
            if directed(a, m) && directed(b, m) {
                let d = descendants(m);
                given.iter().any(|&g| d[g])
            } else {
                !given.contains(&m)
            }
        })
    };
    !all.iter().any(active)
}

/// A random dataset with continuous, discrete and mixture columns sharing a latent factor.
pub fn random_mixed_dataset(seed: u64, n: usize, width: usize) -> Dataset {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let latent: Vec<f64> = (0..n).map(|_| Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
    let mut names = Vec::new();
    let mut columns = Vec::new();
    for j in 0..width {
        let strength: f64 = rng.random_range(0.0..1.5);
        let kind = rng.random_range(0..3);
        let col: Vec<f64> = latent
            .iter()
            .map(|&l| {
                let e: f64 = Normal::new(0.0, 1.0).unwrap().sample(&mut rng);
                let v = strength * l + e;
                match kind {
                    0 => v,
                    1 => Poisson::new((v.abs() + 0.5).min(20.0)).unwrap().sample(&mut rng),
                    _ => {
                        if rng.random_bool(0.4) {
                            v.round().clamp(-2.0, 2.0)
                        } else {
                            v
                        }
                    }
                }
            })
            .collect();
        names.push(format!("c{j}"));
        columns.push(col);
    }
    Dataset::from_raw(&names, &columns, 5).unwrap()
}
