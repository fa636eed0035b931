//! Columns, bins, grids and label assignments.
//!
//! A [`MixedColumn`] is one variable's sample together with the mask of rows
//! treated as discrete atoms. A [`BinSet`] partitions one dimension into
//! singleton bins (one per atom, volume 1) followed by contiguous intervals
//! over the continuous range. A [`Grid`] is the Cartesian product of the
//! per-dimension bin sets with sparse cell counts.
//!
//! Bin labels within a dimension are ordered singletons first, then intervals
//! from left to right.

use serde::Serialize;

use crate::error::{Error, Result};

/// One variable's sample with its detected discrete points.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedColumn {
    name: String,
    values: Vec<f64>,
    discrete_mask: Vec<bool>,
    threshold: usize,
}

/// Marks every value whose exact multiplicity in `values` is at least `t`.
///
/// Equality is exact floating-point equality, so `-0.0` and `0.0` are the
/// same point.
pub fn detect_discrete_points(
    name: impl Into<String>,
    values: &[f64],
    t: usize,
) -> Result<MixedColumn> {
    let name = name.into();
    if t < 2 {
        return Err(Error::InvalidInput(format!(
            "discreteness threshold must be at least 2, got {t}"
        )));
    }
    if values.is_empty() {
        return Err(Error::InvalidInput(format!("column `{name}` is empty")));
    }
    if let Some((row, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite {
            column: name,
            row,
            value,
        });
    }

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());

    let mut discrete_mask = vec![false; values.len()];
    let mut start = 0;
    while start < order.len() {
        let v = values[order[start]];
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == v {
            end += 1;
        }
        if end - start >= t {
            for &row in &order[start..end] {
                discrete_mask[row] = true;
            }
        }
        start = end;
    }

    Ok(MixedColumn {
        name,
        values: values.to_vec(),
        discrete_mask,
        threshold: t,
    })
}

impl MixedColumn {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn discrete_mask(&self) -> &[bool] {
        &self.discrete_mask
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted distinct masked values.
    pub fn atoms(&self) -> Vec<f64> {
        let mut atoms: Vec<f64> = self
            .values
            .iter()
            .zip(&self.discrete_mask)
            .filter(|(_, &m)| m)
            .map(|(&v, _)| v + 0.0) // folds -0.0 into 0.0
            .collect();
        atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        atoms.dedup();
        atoms
    }

    /// Values not masked as discrete.
    pub fn continuous_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.discrete_mask)
            .filter(|(_, &m)| !m)
            .map(|(&v, _)| v)
    }

    pub fn num_continuous(&self) -> usize {
        self.discrete_mask.iter().filter(|&&m| !m).count()
    }

    pub fn num_distinct_continuous(&self) -> usize {
        let mut v: Vec<f64> = self.continuous_values().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v.len()
    }

    /// Range of the unmasked values, if any.
    pub fn continuous_range(&self) -> Option<(f64, f64)> {
        self.continuous_values().fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

/// A dataset: equally long mixed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<MixedColumn>,
}

impl Dataset {
    pub fn new(columns: Vec<MixedColumn>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::InvalidInput("dataset has no columns".into()));
        };
        let n = first.len();
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::InvalidInput(format!(
                "column `{}` has {} rows, expected {n}",
                c.name(),
                c.len()
            )));
        }
        Ok(Self { columns })
    }

    /// Builds a dataset from raw named columns, detecting discrete points with threshold `t`.
    pub fn from_raw<S: AsRef<str>>(names: &[S], columns: &[Vec<f64>], t: usize) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidInput(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let cols = names
            .iter()
            .zip(columns)
            .map(|(name, values)| detect_discrete_points(name.as_ref(), values, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(cols)
    }

    pub fn columns(&self) -> &[MixedColumn] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &MixedColumn {
        &self.columns[j]
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn n(&self) -> usize {
        self.columns[0].len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    /// Same data with rows reordered: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        let cols = self
            .columns
            .iter()
            .map(|c| {
                let v: Vec<f64> = perm.iter().map(|&i| c.values[i]).collect();
                detect_discrete_points(c.name.clone(), &v, c.threshold)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cols)
    }
}

/// Shape of a single bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BinKind {
    Singleton(f64),
    Interval { lo: f64, hi: f64, closed_right: bool },
}

/// A bin with its volume under the mixed reference measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub kind: BinKind,
    pub volume: f64,
}

impl Bin {
    pub fn singleton(point: f64) -> Self {
        Self {
            kind: BinKind::Singleton(point),
            volume: 1.0,
        }
    }

    pub fn interval(lo: f64, hi: f64, closed_right: bool) -> Self {
        Self {
            kind: BinKind::Interval {
                lo,
                hi,
                closed_right,
            },
            volume: hi - lo,
        }
    }
}

/// Equi-width candidate boundaries spanning the continuous range of a column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateCuts {
    boundaries: Vec<f64>,
}

impl CandidateCuts {
    /// `k_init` equal cells over `[lo, hi]`; requires `lo < hi`.
    pub fn equi_width(lo: f64, hi: f64, k_init: usize) -> Result<Self> {
        if k_init == 0 || !(lo < hi) {
            return Err(Error::InvalidInput(format!(
                "cannot build {k_init} candidate cells over [{lo}, {hi}]"
            )));
        }
        let width = (hi - lo) / k_init as f64;
        let mut boundaries: Vec<f64> = (0..k_init).map(|i| lo + i as f64 * width).collect();
        boundaries.push(hi);
        if boundaries.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput(format!(
                "range [{lo}, {hi}] too narrow for {k_init} candidate cells"
            )));
        }
        Ok(Self { boundaries })
    }

    /// A single cell of the smallest representable positive width starting at `x`.
    pub fn degenerate(x: f64) -> Self {
        Self {
            boundaries: vec![x, x.next_up()],
        }
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Number of equi-width candidate cells.
    pub fn k_init(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Cell containing `v`, left-closed with the last cell right-closed.
    pub fn cell_of(&self, v: f64) -> Option<usize> {
        let b = &self.boundaries;
        if v < b[0] || v > b[b.len() - 1] {
            return None;
        }
        let idx = b.partition_point(|&x| x <= v);
        Some((idx - 1).min(self.k_init() - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct ContinuousBins {
    candidates: CandidateCuts,
    /// Indices into the candidate boundaries, always starting at 0 and ending at `k_init`.
    chosen: Vec<usize>,
    degenerate: bool,
}

/// Partition of one dimension: singleton bins followed by intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSet {
    singletons: Vec<f64>,
    continuous: Option<ContinuousBins>,
}

impl BinSet {
    /// Bins for a purely discrete dimension.
    pub fn discrete(singletons: Vec<f64>) -> Result<Self> {
        Self::new(singletons, None, Vec::new(), false)
    }

    /// `chosen` are indices into the candidate boundaries and must include both ends.
    pub fn new(
        singletons: Vec<f64>,
        candidates: Option<CandidateCuts>,
        chosen: Vec<usize>,
        degenerate: bool,
    ) -> Result<Self> {
        if singletons.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidModel(
                "singletons must be strictly increasing".into(),
            ));
        }
        let continuous = match candidates {
            None => None,
            Some(candidates) => {
                let k = candidates.k_init();
                let valid = chosen.len() >= 2
                    && chosen[0] == 0
                    && *chosen.last().unwrap() == k
                    && chosen.windows(2).all(|w| w[0] < w[1]);
                if !valid {
                    return Err(Error::InvalidModel(format!(
                        "chosen cuts {chosen:?} are not an increasing subset of 0..={k} with both ends"
                    )));
                }
                Some(ContinuousBins {
                    candidates,
                    chosen,
                    degenerate,
                })
            }
        };
        if singletons.is_empty() && continuous.is_none() {
            return Err(Error::InvalidModel("bin set has no bins".into()));
        }
        Ok(Self {
            singletons,
            continuous,
        })
    }

    /// Same candidates and singletons, different chosen cuts.
    pub fn with_chosen(&self, chosen: Vec<usize>) -> Result<Self> {
        let c = self
            .continuous
            .as_ref()
            .ok_or_else(|| Error::InvalidModel("dimension has no continuous part".into()))?;
        Self::new(
            self.singletons.clone(),
            Some(c.candidates.clone()),
            chosen,
            c.degenerate,
        )
    }

    pub fn singletons(&self) -> &[f64] {
        &self.singletons
    }

    pub fn candidate_cuts(&self) -> Option<&CandidateCuts> {
        self.continuous.as_ref().map(|c| &c.candidates)
    }

    /// Chosen boundary indices into the candidate boundaries (both ends included).
    pub fn chosen_indices(&self) -> &[usize] {
        self.continuous.as_ref().map_or(&[], |c| &c.chosen)
    }

    pub fn has_continuous(&self) -> bool {
        self.continuous.is_some()
    }

    /// True when the continuous part had a single distinct value.
    pub fn is_degenerate(&self) -> bool {
        self.continuous.as_ref().is_some_and(|c| c.degenerate)
    }

    pub fn num_singletons(&self) -> usize {
        self.singletons.len()
    }

    pub fn num_intervals(&self) -> usize {
        self.continuous.as_ref().map_or(0, |c| c.chosen.len() - 1)
    }

    /// Total number of bins in this dimension.
    pub fn len(&self) -> usize {
        self.num_singletons() + self.num_intervals()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Interior candidate cut points available to this dimension.
    pub fn num_candidate_cuts(&self) -> usize {
        self.continuous
            .as_ref()
            .map_or(0, |c| c.candidates.k_init() - 1)
    }

    /// Interior cut points actually used.
    pub fn num_chosen_cuts(&self) -> usize {
        self.continuous.as_ref().map_or(0, |c| c.chosen.len() - 2)
    }

    /// Boundaries of the chosen intervals.
    pub fn interval_boundaries(&self) -> Vec<f64> {
        self.continuous.as_ref().map_or_else(Vec::new, |c| {
            c.chosen
                .iter()
                .map(|&i| c.candidates.boundaries[i])
                .collect()
        })
    }

    pub fn bins(&self) -> Vec<Bin> {
        let mut bins: Vec<Bin> = self.singletons.iter().map(|&p| Bin::singleton(p)).collect();
        let b = self.interval_boundaries();
        for (i, w) in b.windows(2).enumerate() {
            bins.push(Bin::interval(w[0], w[1], i + 2 == b.len()));
        }
        bins
    }

    /// Volume of the bin with the given label.
    pub fn volume(&self, label: usize) -> f64 {
        let s = self.singletons.len();
        if label < s {
            return 1.0;
        }
        let c = self.continuous.as_ref().expect("label out of range");
        let b = &c.candidates.boundaries;
        b[c.chosen[label - s + 1]] - b[c.chosen[label - s]]
    }

    /// Interval index (0-based among intervals) covering each candidate cell.
    pub(crate) fn cell_to_interval(&self) -> Vec<u32> {
        let Some(c) = &self.continuous else {
            return Vec::new();
        };
        let mut map = vec![0u32; c.candidates.k_init()];
        for (iv, w) in c.chosen.windows(2).enumerate() {
            for m in &mut map[w[0]..w[1]] {
                *m = iv as u32;
            }
        }
        map
    }

    /// Label of a single value: masked values go to their singleton, others to
    /// the interval containing them.
    pub fn label_of(&self, value: f64, masked: bool) -> Option<u32> {
        if masked {
            return self
                .singletons
                .binary_search_by(|p| p.partial_cmp(&value).unwrap())
                .ok()
                .map(|i| i as u32);
        }
        let b = self.interval_boundaries();
        if b.is_empty() || value < b[0] || value > b[b.len() - 1] {
            return None;
        }
        let idx = (b.partition_point(|&x| x <= value) - 1).min(b.len() - 2);
        Some((self.singletons.len() + idx) as u32)
    }
}

/// Labels every row of `column` against `bins`.
pub fn assign_labels(column: &MixedColumn, bins: &BinSet) -> Result<Vec<u32>> {
    column
        .values()
        .iter()
        .zip(column.discrete_mask())
        .map(|(&v, &m)| {
            bins.label_of(v, m).ok_or_else(|| Error::Labeling {
                column: column.name().to_string(),
                value: v,
            })
        })
        .collect()
}

/// Per-row bin labels for every dimension of a fitted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeling {
    labels: Vec<Vec<u32>>,
    bin_counts: Vec<usize>,
}

impl Labeling {
    pub fn new(labels: Vec<Vec<u32>>, bin_counts: Vec<usize>) -> Result<Self> {
        if labels.len() != bin_counts.len() || labels.is_empty() {
            return Err(Error::InvalidInput(
                "labeling needs one bin count per non-empty dimension list".into(),
            ));
        }
        let n = labels[0].len();
        for (col, &k) in labels.iter().zip(&bin_counts) {
            if col.len() != n {
                return Err(Error::InvalidInput("label columns differ in length".into()));
            }
            if col.iter().any(|&l| l as usize >= k) {
                return Err(Error::InvalidInput(format!("label out of range 0..{k}")));
            }
        }
        Ok(Self { labels, bin_counts })
    }

    pub fn n(&self) -> usize {
        self.labels[0].len()
    }

    pub fn num_dims(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, j: usize) -> &[u32] {
        &self.labels[j]
    }

    pub fn columns(&self) -> &[Vec<u32>] {
        &self.labels
    }

    pub fn bin_counts(&self) -> &[usize] {
        &self.bin_counts
    }

    pub fn row(&self, i: usize) -> Vec<u32> {
        self.labels.iter().map(|c| c[i]).collect()
    }

    /// Mixed-radix codes of each row projected onto `dims` (first dim most significant).
    pub fn codes(&self, dims: &[usize]) -> Result<Vec<u64>> {
        checked_product(dims.iter().map(|&d| self.bin_counts[d]))?;
        let mut codes = vec![0u64; self.n()];
        for &d in dims {
            let radix = self.bin_counts[d] as u64;
            for (code, &l) in codes.iter_mut().zip(&self.labels[d]) {
                *code = *code * radix + l as u64;
            }
        }
        Ok(codes)
    }
}

pub(crate) fn checked_product(it: impl IntoIterator<Item = usize>) -> Result<u64> {
    it.into_iter().try_fold(1u64, |acc, k| {
        acc.checked_mul(k as u64)
            .ok_or_else(|| Error::InvalidModel("grid cell count overflows u64".into()))
    })
}

/// Cartesian product of per-dimension bin sets with sparse cell counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dims: Vec<BinSet>,
    shape: Vec<usize>,
    cell_count: u64,
    n: usize,
    /// (mixed-radix cell code, count), sorted by code, counts nonzero.
    counts: Vec<(u64, usize)>,
}

/// Counts the labeled rows per cell of the product grid.
pub fn build_grid(labels: &[Vec<u32>], bins: &[BinSet]) -> Result<Grid> {
    if labels.len() != bins.len() {
        return Err(Error::InvalidInput(format!(
            "{} label vectors for {} bin sets",
            labels.len(),
            bins.len()
        )));
    }
    let labeling = Labeling::new(labels.to_vec(), bins.iter().map(BinSet::len).collect())?;
    Grid::from_labeling(&labeling, bins.to_vec())
}

impl Grid {
    pub fn from_labeling(labeling: &Labeling, dims: Vec<BinSet>) -> Result<Self> {
        let shape: Vec<usize> = dims.iter().map(BinSet::len).collect();
        if shape != labeling.bin_counts() {
            return Err(Error::InvalidInput(
                "labeling bin counts disagree with bin sets".into(),
            ));
        }
        let cell_count = checked_product(shape.iter().copied())?;
        let all: Vec<usize> = (0..dims.len()).collect();
        let counts = run_lengths(labeling.codes(&all)?);
        Ok(Self {
            dims,
            shape,
            cell_count,
            n: labeling.n(),
            counts,
        })
    }

    pub fn dims(&self) -> &[BinSet] {
        &self.dims
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Total number of cells `K`, occupied or not.
    pub fn cell_count(&self) -> u64 {
        self.cell_count
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_occupied(&self) -> usize {
        self.counts.len()
    }

    pub fn decode(&self, mut code: u64) -> Vec<u32> {
        let mut idx = vec![0u32; self.shape.len()];
        for (slot, &k) in idx.iter_mut().zip(&self.shape).rev() {
            *slot = (code % k as u64) as u32;
            code /= k as u64;
        }
        idx
    }

    /// Nonzero cells as (index tuple, count) in lexicographic order.
    pub fn counts(&self) -> impl Iterator<Item = (Vec<u32>, usize)> + '_ {
        self.counts.iter().map(|&(c, n)| (self.decode(c), n))
    }

    pub fn count_of(&self, index: &[u32]) -> usize {
        let code = index
            .iter()
            .zip(&self.shape)
            .fold(0u64, |acc, (&l, &k)| acc * k as u64 + l as u64);
        self.counts
            .binary_search_by_key(&code, |&(c, _)| c)
            .map_or(0, |i| self.counts[i].1)
    }

    /// Product of the per-dimension bin volumes.
    pub fn cell_volume(&self, index: &[u32]) -> f64 {
        index
            .iter()
            .zip(&self.dims)
            .map(|(&l, d)| d.volume(l as usize))
            .product()
    }
}

/// Sorts codes and returns (code, multiplicity) runs.
pub(crate) fn run_lengths(mut codes: Vec<u64>) -> Vec<(u64, usize)> {
    codes.sort_unstable();
    let mut out: Vec<(u64, usize)> = Vec::new();
    for c in codes {
        match out.last_mut() {
            Some((last, n)) if *last == c => *n += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}
