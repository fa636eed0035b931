//! Plug-in entropies over grid labels and the histogram CMI estimator.
//!
//! One joint histogram is fitted over every column that appears in X, Y or
//! Z; each entropy term is then the plug-in entropy of the labels projected
//! onto the relevant dimensions. Outputs are in nats.

use serde::Serialize;

use crate::data::{detect_discrete_points, run_lengths, Dataset, Grid, Labeling, MixedColumn};
use crate::error::{Error, Result};
use crate::histmd::{greedy_fit, FitConfig, FitResult};

/// A named set of dataset columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableGroup {
    pub name: String,
    pub columns: Vec<usize>,
}

impl VariableGroup {
    pub fn new(name: impl Into<String>, columns: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            columns,
        }
    }

    /// Looks columns up by name.
    pub fn by_names<S: AsRef<str>>(name: &str, dataset: &Dataset, names: &[S]) -> Result<Self> {
        let columns = names
            .iter()
            .map(|s| {
                dataset.column_index(s.as_ref()).ok_or_else(|| {
                    Error::InvalidInput(format!("unknown column `{}`", s.as_ref()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(name, columns))
    }
}

/// A CMI (or MI, when Z is empty) estimate with its entropy terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateResult {
    /// H(X,Z) + H(Y,Z) − H(X,Y,Z) − H(Z), nats.
    pub value: f64,
    pub h_xz: f64,
    pub h_yz: f64,
    pub h_xyz: f64,
    pub h_z: f64,
    /// Discretized domain sizes: product of the bin counts of each group.
    pub domain_x: u64,
    pub domain_y: u64,
    pub domain_z: u64,
    /// Cell counts of the joint projections used by the regret correction.
    pub cells_xz: u64,
    pub cells_yz: u64,
    pub cells_xyz: u64,
    pub n: usize,
    /// Dataset column behind each fitted dimension.
    pub fitted_columns: Vec<usize>,
    pub bin_counts: Vec<usize>,
    /// The same quantity computed from histogram densities with bin volumes.
    /// `None` when X and Y share columns, where the volumes do not cancel.
    pub continuous_form: Option<f64>,
    pub fit_score_bits: f64,
    pub fit_iterations: usize,
}

impl EstimateResult {
    /// |continuous form − plug-in value|; zero up to rounding.
    pub fn cancellation_residual(&self) -> Option<f64> {
        self.continuous_form.map(|c| (c - self.value).abs())
    }
}

fn entropy_of_runs(runs: &[(u64, usize)], n: usize) -> f64 {
    let n = n as f64;
    -runs
        .iter()
        .map(|&(_, c)| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// −Σ p̂ ln p̂ over the distinct values of `labels`, in nats.
pub fn plugin_entropy<T: Ord + Clone>(labels: &[T]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("entropy of an empty sample".into()));
    }
    let mut sorted = labels.to_vec();
    sorted.sort();
    let n = sorted.len() as f64;
    let mut h = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let p = (end - start) as f64 / n;
        h -= p * p.ln();
        start = end;
    }
    Ok(h)
}

/// Plug-in entropy of the labels projected onto `dims`; zero for no dims.
pub fn projected_entropy(labeling: &Labeling, dims: &[usize]) -> Result<f64> {
    if dims.is_empty() {
        return Ok(0.0);
    }
    Ok(entropy_of_runs(&run_lengths(labeling.codes(dims)?), labeling.n()))
}

/// Entropy of the marginal histogram density on `dims`, volumes included:
/// −Σ_cells (c/n) ln(c / (n·v)).
pub fn continuous_entropy(grid: &Grid, labeling: &Labeling, dims: &[usize]) -> Result<f64> {
    if dims.is_empty() {
        return Ok(0.0);
    }
    let n = labeling.n() as f64;
    let mut h = 0.0;
    for (mut code, c) in run_lengths(labeling.codes(dims)?) {
        let mut volume = 1.0;
        for &d in dims.iter().rev() {
            let k = labeling.bin_counts()[d] as u64;
            volume *= grid.dims()[d].volume((code % k) as usize);
            code /= k;
        }
        if !(volume > 0.0) {
            return Err(Error::InvalidModel(format!(
                "zero-volume cell on dimensions {dims:?}"
            )));
        }
        let c = c as f64;
        h -= c / n * (c / (n * volume)).ln();
    }
    Ok(h)
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = a.to_vec();
    out.extend(b.iter().filter(|d| !a.contains(d)));
    out.sort_unstable();
    out
}

/// Joint histogram over the given dataset columns, in that order.
///
/// Columns are re-thresholded when their discrete-point threshold differs from `config.t`.
pub fn fit_columns(dataset: &Dataset, columns: &[usize], config: &FitConfig) -> Result<FitResult> {
    if let Some(&bad) = columns.iter().find(|&&c| c >= dataset.num_columns()) {
        return Err(Error::InvalidInput(format!("column index {bad} out of range")));
    }
    let rethresholded: Vec<MixedColumn> = columns
        .iter()
        .map(|&c| {
            let col = dataset.column(c);
            if col.threshold() == config.t {
                Ok(col.clone())
            } else {
                detect_discrete_points(col.name(), col.values(), config.t)
            }
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&MixedColumn> = rethresholded.iter().collect();
    greedy_fit(&refs, config)
}

/// Fitted problem: the joint histogram and each group's dimension positions.
pub(crate) struct FittedGroups {
    pub fit: FitResult,
    pub fitted_columns: Vec<usize>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

pub(crate) fn fit_groups(
    dataset: &Dataset,
    x: &VariableGroup,
    y: &VariableGroup,
    z: &VariableGroup,
    config: &FitConfig,
) -> Result<FittedGroups> {
    if x.columns.is_empty() || y.columns.is_empty() {
        return Err(Error::InvalidInput("X and Y must name at least one column".into()));
    }
    let all = x.columns.iter().chain(&y.columns).chain(&z.columns);
    if let Some(&bad) = all.clone().find(|&&c| c >= dataset.num_columns()) {
        return Err(Error::InvalidInput(format!("column index {bad} out of range")));
    }
    if z.columns.iter().any(|c| x.columns.contains(c) || y.columns.contains(c)) {
        return Err(Error::InvalidInput("Z must be disjoint from X and Y".into()));
    }

    let mut fitted_columns: Vec<usize> = Vec::new();
    for &c in all {
        if !fitted_columns.contains(&c) {
            fitted_columns.push(c);
        }
    }
    let fit = fit_columns(dataset, &fitted_columns, config)?;

    let pos = |g: &VariableGroup| -> Vec<usize> {
        let mut v: Vec<usize> = g
            .columns
            .iter()
            .map(|c| fitted_columns.iter().position(|f| f == c).unwrap())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    Ok(FittedGroups {
        x: pos(x),
        y: pos(y),
        z: pos(z),
        fitted_columns,
        fit,
    })
}

fn domain(labeling: &Labeling, dims: &[usize]) -> u64 {
    dims.iter().map(|&d| labeling.bin_counts()[d] as u64).product()
}

/// Estimates I(X;Y|Z) in nats from one joint histogram over X ∪ Y ∪ Z.
///
/// X and Y may share columns (I(X;X) = H(X)); Z must be disjoint from both
/// and may be empty, in which case this is the mutual information.
pub fn cmi_estimate(
    dataset: &Dataset,
    x: &VariableGroup,
    y: &VariableGroup,
    z: &VariableGroup,
    config: &FitConfig,
) -> Result<EstimateResult> {
    let fg = fit_groups(dataset, x, y, z, config)?;
    let labeling = &fg.fit.labeling;
    let grid = &fg.fit.grid;
    let xz = union(&fg.x, &fg.z);
    let yz = union(&fg.y, &fg.z);
    let xyz = union(&xz, &fg.y);

    let h_xz = projected_entropy(labeling, &xz)?;
    let h_yz = projected_entropy(labeling, &yz)?;
    let h_xyz = projected_entropy(labeling, &xyz)?;
    let h_z = projected_entropy(labeling, &fg.z)?;
    let value = h_xz + h_yz - h_xyz - h_z;

    let continuous_form = if fg.x.iter().any(|d| fg.y.contains(d)) {
        None
    } else {
        let c = continuous_entropy(grid, labeling, &xz)?
            + continuous_entropy(grid, labeling, &yz)?
            - continuous_entropy(grid, labeling, &xyz)?
            - continuous_entropy(grid, labeling, &fg.z)?;
        debug_assert!((c - value).abs() < 1e-9);
        Some(c)
    };

    Ok(EstimateResult {
        value,
        h_xz,
        h_yz,
        h_xyz,
        h_z,
        domain_x: domain(labeling, &fg.x),
        domain_y: domain(labeling, &fg.y),
        domain_z: domain(labeling, &fg.z),
        cells_xz: domain(labeling, &xz),
        cells_yz: domain(labeling, &yz),
        cells_xyz: domain(labeling, &xyz),
        n: labeling.n(),
        bin_counts: labeling.bin_counts().to_vec(),
        fitted_columns: fg.fitted_columns,
        continuous_form,
        fit_score_bits: fg.fit.score.total,
        fit_iterations: fg.fit.trace.iterations,
    })
}
