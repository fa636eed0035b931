//! MDL code lengths: multinomial NML regret, cut-point model cost, and the
//! histogram negative log-likelihood. Everything here is in bits.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;
use statrs::function::factorial::ln_binomial;

use crate::data::Grid;
use crate::error::{Error, Result};

/// Largest cell count for which the regret table is materialised.
pub const MAX_REGRET_CELLS: u64 = 1 << 24;

/// The two-part code length of a histogram model and its data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreBreakdown {
    pub neg_log_likelihood: f64,
    pub regret: f64,
    pub model_cost: f64,
    pub total: f64,
}

impl ScoreBreakdown {
    pub fn new(neg_log_likelihood: f64, regret: f64, model_cost: f64) -> Self {
        Self {
            neg_log_likelihood,
            regret,
            model_cost,
            total: neg_log_likelihood + regret + model_cost,
        }
    }
}

type RegretCache = RwLock<HashMap<usize, Arc<Vec<f64>>>>;

fn cache() -> &'static RegretCache {
    static CACHE: OnceLock<RegretCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// ln R(n, 2) by direct summation over the n + 1 two-bin compositions.
fn ln_regret_two_bins(n: usize) -> f64 {
    let nf = n as f64;
    let mut ln_fact = Vec::with_capacity(n + 1);
    ln_fact.push(0.0);
    for i in 1..=n {
        ln_fact.push(ln_fact[i - 1] + (i as f64).ln());
    }
    let xlnx = |c: usize| if c == 0 { 0.0 } else { c as f64 * (c as f64 / nf).ln() };
    let terms: Vec<f64> = (0..=n)
        .map(|h| ln_fact[n] - ln_fact[h] - ln_fact[n - h] + xlnx(h) + xlnx(n - h))
        .collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Natural-log regret table for sample size `n`, valid for every K in `1..=k`.
///
/// Entry `K` holds ln R(n, K); entry 0 is unused. Tables are shared across
/// threads and grow geometrically on demand.
pub(crate) fn regret_table(n: usize, k: u64) -> Result<Arc<Vec<f64>>> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidInput(format!(
            "regret needs n >= 1 and K >= 1, got n = {n}, K = {k}"
        )));
    }
    if k > MAX_REGRET_CELLS {
        return Err(Error::RegretLimit {
            k,
            limit: MAX_REGRET_CELLS,
        });
    }
    let k = k as usize;
    if let Some(t) = cache().read().unwrap().get(&n) {
        if t.len() > k {
            return Ok(Arc::clone(t));
        }
    }

    let mut guard = cache().write().unwrap();
    let existing = guard.get(&n).cloned();
    if let Some(t) = &existing {
        if t.len() > k {
            return Ok(Arc::clone(t));
        }
    }
    let target = (k + 1)
        .max(existing.as_ref().map_or(0, |t| 2 * t.len()))
        .max(64)
        .min(MAX_REGRET_CELLS as usize + 1);
    let mut table = match existing {
        Some(t) => (*t).clone(),
        None => vec![0.0, 0.0, ln_regret_two_bins(n)],
    };
    let nf = n as f64;
    while table.len() < target {
        // R(n, K+2) = R(n, K+1) + (n / K) R(n, K)
        let kk = table.len() - 2;
        let (a, b) = (table[kk], table[kk + 1]);
        table.push(b + ((nf / kk as f64).ln() + a - b).exp().ln_1p());
    }
    let table = Arc::new(table);
    guard.insert(n, Arc::clone(&table));
    Ok(table)
}

/// log2 of the multinomial NML normaliser R(n, K).
pub fn log_regret(n: usize, k: u64) -> Result<f64> {
    Ok(regret_table(n, k)?[k as usize] / LN_2)
}

/// log2 C(num_candidates, num_chosen): the cost of naming which cut points are used.
pub fn model_cost(num_candidates: usize, num_chosen: usize) -> Result<f64> {
    if num_chosen > num_candidates {
        return Err(Error::InvalidInput(format!(
            "cannot choose {num_chosen} of {num_candidates} cut points"
        )));
    }
    if num_chosen == 0 || num_chosen == num_candidates {
        return Ok(0.0);
    }
    Ok(ln_binomial(num_candidates as u64, num_chosen as u64) / LN_2)
}

/// −log2 of the maximised histogram likelihood, ∏ (c / (n·v))^c over cells.
pub fn neg_log_likelihood(grid: &Grid) -> Result<f64> {
    let n = grid.n() as f64;
    let mut total = 0.0;
    for (index, c) in grid.counts() {
        let v = grid.cell_volume(&index);
        if !(v > 0.0) {
            return Err(Error::InvalidModel(format!(
                "cell {index:?} has non-positive volume {v}"
            )));
        }
        let c = c as f64;
        total -= c * (c / (n * v)).log2();
    }
    Ok(total)
}

/// Full code length: likelihood, regret over all K grid cells, and the cut-point cost of every dimension.
pub fn total_score(grid: &Grid) -> Result<ScoreBreakdown> {
    let nll = neg_log_likelihood(grid)?;
    let regret = log_regret(grid.n(), grid.cell_count())?;
    let model = grid
        .dims()
        .iter()
        .map(|d| model_cost(d.num_candidate_cuts(), d.num_chosen_cuts()))
        .sum::<Result<f64>>()?;
    Ok(ScoreBreakdown::new(nll, regret, model))
}
