//! Joint multi-dimensional histograms by greedy coordinate-wise refinement.
//!
//! Every dimension starts with its singleton bins plus one interval over its
//! continuous range. Each iteration re-cuts every dimension from scratch,
//! holding all other dimensions fixed, and accepts only the single
//! re-cutting that lowers the total code length the most. The fit stops when
//! no dimension improves or after `i_max` iterations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complexity::{total_score, ScoreBreakdown};
use crate::data::{checked_product, BinSet, CandidateCuts, Grid, Labeling, MixedColumn};
use crate::error::{Error, Result};
pub use crate::hist1d::LogBase;
use crate::hist1d::{bin_budget, candidate_cuts, CutProblem};

/// Minimum score decrease, in bits, for a refinement to be accepted.
const ACCEPT_EPS: f64 = 1e-9;

/// Parameters of the histogram fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Maximum number of greedy iterations.
    pub i_max: usize,
    /// Multiplicity at which a repeated value becomes a discrete point.
    pub t: usize,
    /// `K_init = ⌈k_init_factor · log n⌉` candidate cells per dimension.
    pub k_init_factor: f64,
    /// `K_max = ⌈k_max_factor · log n⌉` intervals at most per dimension.
    pub k_max_factor: f64,
    pub log_base: LogBase,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            i_max: 5,
            t: 5,
            k_init_factor: 20.0,
            k_max_factor: 5.0,
            log_base: LogBase::Natural,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.i_max < 1 {
            return Err(Error::InvalidInput("i_max must be at least 1".into()));
        }
        if self.t < 2 {
            return Err(Error::InvalidInput("t must be at least 2".into()));
        }
        if !(self.k_max_factor > 0.0) || !(self.k_init_factor > 0.0) {
            return Err(Error::InvalidInput("bin budget factors must be positive".into()));
        }
        if self.k_max_factor > self.k_init_factor {
            return Err(Error::InvalidInput(
                "k_max_factor must not exceed k_init_factor".into(),
            ));
        }
        Ok(())
    }

    pub fn k_init(&self, n: usize) -> usize {
        bin_budget(n, self.k_init_factor, self.log_base)
    }

    pub fn k_max(&self, n: usize) -> usize {
        bin_budget(n, self.k_max_factor, self.log_base)
    }
}

/// One accepted refinement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub dimension: usize,
    pub score_before: f64,
    pub score_after: f64,
    pub bin_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitTrace {
    pub initial_score: f64,
    pub final_score: f64,
    /// Iterations started, including a final one that found no improvement.
    pub iterations: usize,
    pub steps: Vec<TraceStep>,
}

/// Outcome of [`greedy_fit`].
#[derive(Debug, Clone)]
pub struct FitResult {
    pub grid: Grid,
    pub binsets: Vec<BinSet>,
    pub labeling: Labeling,
    pub trace: FitTrace,
    pub score: ScoreBreakdown,
}

/// Candidate re-cutting of one dimension.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub binset: BinSet,
    pub score: ScoreBreakdown,
    /// Inner-loop work of the segment-cost sweep; zero when nothing was re-cut.
    pub ops: u64,
}

/// Per-column data that does not change during a fit.
struct Prepared {
    /// Candidate cell of every unmasked row; `u32::MAX` for masked rows.
    cand_cell: Vec<u32>,
    /// Singleton label of every masked row; unused for the others.
    singleton_label: Vec<u32>,
}

fn initial_binset(column: &MixedColumn, k_init: usize) -> Result<BinSet> {
    let atoms = column.atoms();
    if column.num_continuous() == 0 {
        return BinSet::discrete(atoms);
    }
    if column.num_distinct_continuous() < 2 {
        let x = column.continuous_values().next().unwrap();
        return BinSet::new(atoms, Some(CandidateCuts::degenerate(x)), vec![0, 1], true);
    }
    let cand = candidate_cuts(column, k_init)?;
    BinSet::new(atoms, Some(cand), vec![0, k_init], false)
}

fn prepare(column: &MixedColumn, bins: &BinSet) -> Result<Prepared> {
    let n = column.len();
    let mut cand_cell = vec![u32::MAX; n];
    let mut singleton_label = vec![0u32; n];
    for (i, (&v, &m)) in column.values().iter().zip(column.discrete_mask()).enumerate() {
        let missing = || Error::Labeling {
            column: column.name().to_string(),
            value: v,
        };
        if m {
            singleton_label[i] = bins.label_of(v, true).ok_or_else(missing)?;
        } else {
            let cand = bins.candidate_cuts().ok_or_else(missing)?;
            cand_cell[i] = cand.cell_of(v).ok_or_else(missing)? as u32;
        }
    }
    Ok(Prepared {
        cand_cell,
        singleton_label,
    })
}

fn labels_for(prep: &Prepared, bins: &BinSet) -> Vec<u32> {
    let map = bins.cell_to_interval();
    let s = bins.num_singletons() as u32;
    prep.cand_cell
        .iter()
        .zip(&prep.singleton_label)
        .map(|(&cell, &sl)| if cell == u32::MAX { sl } else { s + map[cell as usize] })
        .collect()
}

fn score_labels(labels: &[Vec<u32>], binsets: &[BinSet]) -> Result<(Grid, Labeling, ScoreBreakdown)> {
    let labeling = Labeling::new(labels.to_vec(), binsets.iter().map(BinSet::len).collect())?;
    let grid = Grid::from_labeling(&labeling, binsets.to_vec())?;
    let score = total_score(&grid)?;
    Ok((grid, labeling, score))
}

struct FitState<'a> {
    columns: &'a [&'a MixedColumn],
    prepared: Vec<Prepared>,
    k_max: usize,
    binsets: Vec<BinSet>,
    labels: Vec<Vec<u32>>,
    score: ScoreBreakdown,
}

impl<'a> FitState<'a> {
    fn new(columns: &'a [&'a MixedColumn], binsets: Vec<BinSet>, config: &FitConfig) -> Result<Self> {
        let n = columns[0].len();
        let prepared = columns
            .iter()
            .zip(&binsets)
            .map(|(c, b)| prepare(c, b))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<Vec<u32>> = prepared
            .iter()
            .zip(&binsets)
            .map(|(p, b)| labels_for(p, b))
            .collect();
        let (_, _, score) = score_labels(&labels, &binsets)?;
        Ok(Self {
            columns,
            prepared,
            k_max: config.k_max(n),
            binsets,
            labels,
            score,
        })
    }

    fn refinable(&self, j: usize) -> bool {
        self.binsets[j].has_continuous() && !self.binsets[j].is_degenerate()
    }

    fn refine(&self, j: usize) -> Result<Refinement> {
        if !self.refinable(j) {
            return Ok(Refinement {
                binset: self.binsets[j].clone(),
                score: self.score,
                ops: 0,
            });
        }
        let n = self.columns[j].len();
        let others: Vec<usize> = (0..self.binsets.len()).filter(|&i| i != j).collect();
        let other_cells = checked_product(others.iter().map(|&i| self.binsets[i].len()))?;

        // Context of each row = its cell in the other dimensions.
        let mut ctx_code = vec![0u64; n];
        for &i in &others {
            let radix = self.binsets[i].len() as u64;
            for (code, &l) in ctx_code.iter_mut().zip(&self.labels[i]) {
                *code = *code * radix + l as u64;
            }
        }
        let mut distinct = ctx_code.clone();
        distinct.sort_unstable();
        distinct.dedup();

        let prep = &self.prepared[j];
        let mut pairs: Vec<(u32, u32)> = prep
            .cand_cell
            .iter()
            .zip(&ctx_code)
            .filter(|(&cell, _)| cell != u32::MAX)
            .map(|(&cell, code)| (cell, distinct.binary_search(code).unwrap() as u32))
            .collect();
        pairs.sort_unstable();

        let bins = &self.binsets[j];
        let cand = bins.candidate_cuts().unwrap();
        let mut cells: Vec<Vec<(u32, u32)>> = vec![Vec::new(); cand.k_init()];
        for (cell, r) in pairs {
            let list = &mut cells[cell as usize];
            match list.last_mut() {
                Some((last, c)) if *last == r => *c += 1,
                _ => list.push((r, 1)),
            }
        }

        let problem = CutProblem {
            candidates: cand,
            cells,
            num_contexts: distinct.len(),
            n,
            singleton_bins: bins.num_singletons(),
            other_cells,
            k_max: self.k_max,
        };
        let sol = problem.solve()?;
        let binset = bins.with_chosen(sol.chosen)?;

        let mut labels = self.labels.clone();
        labels[j] = labels_for(prep, &binset);
        let mut binsets = self.binsets.clone();
        binsets[j] = binset.clone();
        let (_, _, score) = score_labels(&labels, &binsets)?;
        Ok(Refinement {
            binset,
            score,
            ops: sol.ops,
        })
    }

    fn accept(&mut self, j: usize, r: Refinement) {
        self.labels[j] = labels_for(&self.prepared[j], &r.binset);
        self.binsets[j] = r.binset;
        self.score = r.score;
    }
}

fn check_columns(columns: &[&MixedColumn], config: &FitConfig) -> Result<()> {
    config.validate()?;
    let Some(first) = columns.first() else {
        return Err(Error::InvalidInput("no columns to fit".into()));
    };
    if first.is_empty() {
        return Err(Error::InvalidInput("empty dataset".into()));
    }
    if columns.iter().any(|c| c.len() != first.len()) {
        return Err(Error::InvalidInput("columns differ in length".into()));
    }
    Ok(())
}

/// Singleton bins plus one interval per dimension.
pub fn init_discretization(
    columns: &[&MixedColumn],
    config: &FitConfig,
) -> Result<(Grid, Vec<BinSet>)> {
    check_columns(columns, config)?;
    let k_init = config.k_init(columns[0].len());
    let binsets = columns
        .iter()
        .map(|c| initial_binset(c, k_init))
        .collect::<Result<Vec<_>>>()?;
    let state = FitState::new(columns, binsets, config)?;
    let (grid, _, _) = score_labels(&state.labels, &state.binsets)?;
    Ok((grid, state.binsets))
}

/// Best re-cutting of dimension `j` with every other dimension held at `binsets`.
///
/// Dimensions without a (non-degenerate) continuous part come back unchanged.
pub fn refine_dimension(
    j: usize,
    columns: &[&MixedColumn],
    binsets: &[BinSet],
    config: &FitConfig,
) -> Result<Refinement> {
    check_columns(columns, config)?;
    if binsets.len() != columns.len() || j >= columns.len() {
        return Err(Error::InvalidInput(format!(
            "dimension {j} out of range for {} columns / {} bin sets",
            columns.len(),
            binsets.len()
        )));
    }
    FitState::new(columns, binsets.to_vec(), config)?.refine(j)
}

/// Learns a joint histogram over `columns`.
pub fn greedy_fit(columns: &[&MixedColumn], config: &FitConfig) -> Result<FitResult> {
    let (_, binsets) = init_discretization(columns, config)?;
    let mut state = FitState::new(columns, binsets, config)?;
    let mut trace = FitTrace {
        initial_score: state.score.total,
        final_score: state.score.total,
        iterations: 0,
        steps: Vec::new(),
    };

    // The last accepted dimension would come back unchanged: its context did not move.
    let mut last: Option<usize> = None;
    for iteration in 1..=config.i_max {
        trace.iterations = iteration;
        let candidates = (0..columns.len())
            .into_par_iter()
            .map(|j| {
                if Some(j) == last || !state.refinable(j) {
                    Ok(None)
                } else {
                    state.refine(j).map(Some)
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let mut best: Option<(usize, f64)> = None;
        for (j, r) in candidates.iter().enumerate() {
            if let Some(r) = r {
                let gain = state.score.total - r.score.total;
                if gain > ACCEPT_EPS && best.is_none_or(|(_, g)| gain > g) {
                    best = Some((j, gain));
                }
            }
        }
        let Some((j, _)) = best else { break };

        let before = state.score.total;
        let refinement = candidates.into_iter().nth(j).flatten().unwrap();
        state.accept(j, refinement);
        trace.steps.push(TraceStep {
            iteration,
            dimension: j,
            score_before: before,
            score_after: state.score.total,
            bin_counts: state.binsets.iter().map(BinSet::len).collect(),
        });
        last = Some(j);
    }
    trace.final_score = state.score.total;

    let (grid, labeling, score) = score_labels(&state.labels, &state.binsets)?;
    Ok(FitResult {
        grid,
        binsets: state.binsets,
        labeling,
        trace,
        score,
    })
}
