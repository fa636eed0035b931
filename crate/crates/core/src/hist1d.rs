//! One-dimensional variable-width histograms by dynamic programming.
//!
//! The continuous part of a column is first split into `K_init` equi-width
//! candidate cells. A histogram is a choice of which interior candidate
//! boundaries to keep; the dynamic program below finds the choice with the
//! smallest total code length for every bin count up to `K_max`.
//!
//! The same solver handles the conditional case used by the multivariate
//! fit: rows are additionally keyed by a *context* (their cell in all other
//! dimensions) and the likelihood of a segment is summed per context.

use serde::{Deserialize, Serialize};

use crate::complexity::{model_cost, regret_table, MAX_REGRET_CELLS};
use crate::data::{BinSet, CandidateCuts, MixedColumn};
use crate::error::{Error, Result};

/// Logarithm base used in the `factor · log n` bin budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
            LogBase::Ten => x.log10(),
        }
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "e" | "ln" | "natural" => Ok(LogBase::Natural),
            "2" => Ok(LogBase::Two),
            "10" => Ok(LogBase::Ten),
            _ => Err(Error::InvalidInput(format!(
                "log base must be one of e, 2, 10; got `{s}`"
            ))),
        }
    }
}

/// `⌈factor · log(n)⌉`, at least 1.
pub fn bin_budget(n: usize, factor: f64, base: LogBase) -> usize {
    let v = (factor * base.log(n as f64)).ceil();
    if v.is_finite() && v >= 1.0 {
        v as usize
    } else {
        1
    }
}

/// Equi-width candidate boundaries over the unmasked range of `column`.
pub fn candidate_cuts(column: &MixedColumn, k_init: usize) -> Result<CandidateCuts> {
    if column.num_distinct_continuous() < 2 {
        return Err(Error::DegenerateColumn(column.name().to_string()));
    }
    let (lo, hi) = column.continuous_range().unwrap();
    CandidateCuts::equi_width(lo, hi, k_init)
}

/// The score-optimal histogram of a single column with at most `k_max` intervals.
///
/// Singletons come from the column's mask and are not affected by the cuts.
pub fn optimal_histogram_1d(
    column: &MixedColumn,
    cand: &CandidateCuts,
    k_max: usize,
) -> Result<BinSet> {
    let mut counts = vec![0u32; cand.k_init()];
    for v in column.continuous_values() {
        let cell = cand.cell_of(v).ok_or_else(|| Error::Labeling {
            column: column.name().to_string(),
            value: v,
        })?;
        counts[cell] += 1;
    }
    let cells = counts
        .into_iter()
        .map(|c| if c == 0 { vec![] } else { vec![(0u32, c)] })
        .collect();
    let atoms = column.atoms();
    let problem = CutProblem {
        candidates: cand,
        cells,
        num_contexts: 1,
        n: column.len(),
        singleton_bins: atoms.len(),
        other_cells: 1,
        k_max,
    };
    let sol = problem.solve()?;
    BinSet::new(atoms, Some(cand.clone()), sol.chosen, false)
}

/// A cut-selection problem over one dimension, conditioned on fixed contexts.
pub(crate) struct CutProblem<'a> {
    pub candidates: &'a CandidateCuts,
    /// Per candidate cell: (context id, count), sorted by context id.
    pub cells: Vec<Vec<(u32, u32)>>,
    pub num_contexts: usize,
    /// Total rows, including masked ones.
    pub n: usize,
    pub singleton_bins: usize,
    /// Product of the bin counts of every other dimension.
    pub other_cells: u64,
    pub k_max: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct CutSolution {
    /// Chosen candidate boundary indices, including 0 and `k_init`.
    pub chosen: Vec<usize>,
    /// Number of (segment, context-entry) updates performed.
    pub ops: u64,
}

const TIE_EPS: f64 = 1e-9;

impl CutProblem<'_> {
    /// Segment costs for every pair of candidate boundaries a < b, in bits.
    ///
    /// Only the part of the likelihood that depends on the cuts is kept:
    /// `C·log2(width) − Σ_ctx c·log2(c)`. Terms in n and in the volumes of
    /// the other dimensions are the same for every segmentation.
    fn segment_costs(&self) -> (Vec<f64>, u64) {
        let k = self.candidates.k_init();
        let b = self.candidates.boundaries();
        let xlogx: Vec<f64> = (0..=self.n)
            .map(|c| if c == 0 { 0.0 } else { c as f64 * (c as f64).log2() })
            .collect();

        let mut seg = vec![0.0; (k + 1) * (k + 1)];
        let mut ctx = vec![0u32; self.num_contexts];
        let mut touched: Vec<u32> = Vec::new();
        let mut ops = 0u64;
        for a in 0..k {
            for &r in &touched {
                ctx[r as usize] = 0;
            }
            touched.clear();
            let mut sum_xlogx = 0.0;
            let mut total = 0u64;
            for end in a + 1..=k {
                for &(r, c) in &self.cells[end - 1] {
                    let slot = &mut ctx[r as usize];
                    if *slot == 0 {
                        touched.push(r);
                    }
                    sum_xlogx += xlogx[(*slot + c) as usize] - xlogx[*slot as usize];
                    *slot += c;
                    total += c as u64;
                }
                ops += self.cells[end - 1].len() as u64;
                let width = b[end] - b[a];
                seg[a * (k + 1) + end] = if total == 0 {
                    0.0
                } else {
                    total as f64 * width.log2() - sum_xlogx
                };
            }
        }
        (seg, ops)
    }

    pub fn solve(&self) -> Result<CutSolution> {
        let k = self.candidates.k_init();
        if self.k_max == 0 {
            return Err(Error::InvalidInput("K_max must be at least 1".into()));
        }
        let cells_for = |bins: usize| (self.singleton_bins + bins) as u64 * self.other_cells;
        let mut kmax = self.k_max.min(k);
        while kmax > 0 && cells_for(kmax) > MAX_REGRET_CELLS {
            kmax -= 1;
        }
        if kmax == 0 {
            return Err(Error::RegretLimit {
                k: cells_for(1),
                limit: MAX_REGRET_CELLS,
            });
        }
        let regret = regret_table(self.n, cells_for(kmax))?;

        let (seg, ops) = self.segment_costs();
        let stride = k + 1;
        let mut best = vec![f64::INFINITY; (kmax + 1) * stride];
        let mut back = vec![0usize; (kmax + 1) * stride];
        best[stride + 1..stride + k + 1].copy_from_slice(&seg[1..=k]);
        for bins in 2..=kmax {
            for end in bins..=k {
                let mut value = f64::INFINITY;
                let mut arg = 0;
                for a in bins - 1..end {
                    let v = best[(bins - 1) * stride + a] + seg[a * stride + end];
                    if v < value {
                        value = v;
                        arg = a;
                    }
                }
                best[bins * stride + end] = value;
                back[bins * stride + end] = arg;
            }
        }

        let mut chosen_bins = 0;
        let mut chosen_total = f64::INFINITY;
        for bins in 1..=kmax {
            let total = best[bins * stride + k]
                + regret[cells_for(bins) as usize] / std::f64::consts::LN_2
                + model_cost(k - 1, bins - 1)?;
            if total < chosen_total - TIE_EPS {
                chosen_total = total;
                chosen_bins = bins;
            }
        }

        let mut chosen = vec![k];
        let mut end = k;
        for bins in (2..=chosen_bins).rev() {
            end = back[bins * stride + end];
            chosen.push(end);
        }
        chosen.push(0);
        chosen.reverse();
        Ok(CutSolution { chosen, ops })
    }
}
