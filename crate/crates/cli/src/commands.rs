//! Subcommand implementations and the JSON run report.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::Instant;

use mixhist::datagen::derive_seed;
use mixhist::{
    citest_chi2, citest_sc, cmi_estimate, generate, ground_truth, pc_stable_skeleton,
    true_network_edges, CiMethod, DataCiTest, Dataset, FitConfig, ScenarioId, ScenarioSpec,
    VariableGroup,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::io::{read_csv, write_dataset, write_rows};
use crate::{CliError, FitArgs, Format, Groups, OutputArgs, TestKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct ConfigEcho {
    fit: FitConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    test: Option<CiMethod>,
}

#[derive(Serialize)]
struct RunReport<T: Serialize> {
    schema_version: u32,
    command: Vec<String>,
    config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    results: T,
    wall_clock_seconds: f64,
}

fn method(test: TestKind, alpha: f64) -> Result<CiMethod, CliError> {
    match test {
        TestKind::Chi2 if !(alpha > 0.0 && alpha < 1.0) => {
            Err(CliError::Usage(format!("--alpha must lie in (0, 1), got {alpha}")))
        }
        TestKind::Chi2 => Ok(CiMethod::Chi2 { alpha }),
        TestKind::Sc => Ok(CiMethod::Sc),
    }
}

fn open_output(output: &OutputArgs) -> Result<Box<dyn Write>, CliError> {
    match &output.out {
        Some(path) => File::create(path)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| CliError::Internal(format!("cannot create {}: {e}", path.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Internal(format!("write failed: {e}"))
}

fn emit_json<T: Serialize>(
    output: &OutputArgs,
    argv: &[String],
    config: ConfigEcho,
    seed: Option<u64>,
    results: T,
    started: Instant,
) -> Result<(), CliError> {
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        command: argv.iter().skip(1).cloned().collect(),
        config,
        seed,
        results,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let mut out = open_output(output)?;
    serde_json::to_writer_pretty(&mut out, &report)
        .map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out).and_then(|_| out.flush()).map_err(io_err)
}

fn emit_csv(output: &OutputArgs, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut out = open_output(output)?;
    write_rows(&mut out, header, rows).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn load(input: &Path, t: usize) -> Result<Dataset, CliError> {
    let table = read_csv(input)?;
    Ok(Dataset::from_raw(&table.names, &table.columns, t)?)
}

fn resolve(ds: &Dataset, groups: &Groups) -> Result<[VariableGroup; 3], CliError> {
    Ok([
        VariableGroup::by_names("X", ds, &groups.x)?,
        VariableGroup::by_names("Y", ds, &groups.y)?,
        VariableGroup::by_names("Z", ds, &groups.z)?,
    ])
}

#[derive(Serialize)]
struct Entropies {
    h_xz: f64,
    h_yz: f64,
    h_xyz: f64,
    h_z: f64,
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    x: &'a [String],
    y: &'a [String],
    z: &'a [String],
    n: usize,
    estimate_nats: f64,
    entropies_nats: Entropies,
    bin_counts: BTreeMap<String, usize>,
    fit_score_bits: f64,
    fit_iterations: usize,
}

pub fn estimate(
    argv: &[String],
    input: &Path,
    groups: &Groups,
    fit: &FitArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = fit.config()?;
    let ds = load(input, cfg.t)?;
    let [x, y, z] = resolve(&ds, groups)?;
    let est = cmi_estimate(&ds, &x, &y, &z, &cfg)?;
    let bin_counts: BTreeMap<String, usize> = est
        .fitted_columns
        .iter()
        .zip(&est.bin_counts)
        .map(|(&c, &k)| (ds.column(c).name().to_string(), k))
        .collect();
    match output.format.unwrap_or(Format::Json) {
        Format::Json => {
            let results = EstimateOutput {
                x: &groups.x,
                y: &groups.y,
                z: &groups.z,
                n: est.n,
                estimate_nats: est.value,
                entropies_nats: Entropies { h_xz: est.h_xz, h_yz: est.h_yz, h_xyz: est.h_xyz, h_z: est.h_z },
                bin_counts,
                fit_score_bits: est.fit_score_bits,
                fit_iterations: est.fit_iterations,
            };
            emit_json(output, argv, ConfigEcho { fit: cfg, test: None }, None, results, started)
        }
        Format::Csv => {
            let bins: Vec<String> = bin_counts.iter().map(|(c, k)| format!("{c}={k}")).collect();
            let row = vec![
                groups.x.join(";"),
                groups.y.join(";"),
                groups.z.join(";"),
                est.n.to_string(),
                est.value.to_string(),
                est.h_xz.to_string(),
                est.h_yz.to_string(),
                est.h_xyz.to_string(),
                est.h_z.to_string(),
                bins.join(";"),
            ];
            emit_csv(
                output,
                &["x", "y", "z", "n", "estimate", "h_xz", "h_yz", "h_xyz", "h_z", "bin_counts"],
                &[row],
            )
        }
    }
}

pub fn citest(
    argv: &[String],
    input: &Path,
    groups: &Groups,
    test: TestKind,
    alpha: f64,
    fit: &FitArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = fit.config()?;
    let m = method(test, alpha)?;
    let ds = load(input, cfg.t)?;
    let [x, y, z] = resolve(&ds, groups)?;
    let r = match m {
        CiMethod::Chi2 { alpha } => citest_chi2(&ds, &x, &y, &z, alpha, &cfg)?,
        CiMethod::Sc => citest_sc(&ds, &x, &y, &z, &cfg)?,
    };
    match output.format.unwrap_or(Format::Json) {
        Format::Json => {
            emit_json(output, argv, ConfigEcho { fit: cfg, test: Some(m) }, None, r, started)
        }
        Format::Csv => {
            let row = vec![
                m.name().to_string(),
                r.n.to_string(),
                r.raw.to_string(),
                r.correction.to_string(),
                r.corrected.to_string(),
                r.independent.to_string(),
            ];
            emit_csv(
                output,
                &["test", "n", "raw", "correction", "corrected", "independent"],
                &[row],
            )
        }
    }
}

#[derive(Serialize)]
struct DiscoverOutput {
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_generated: Option<usize>,
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
    separating_sets: Vec<SepSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recall: Option<f64>,
}

#[derive(Serialize)]
struct SepSet {
    x: String,
    y: String,
    given: Vec<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn discover(
    argv: &[String],
    input: &str,
    n: usize,
    seed: u64,
    test: TestKind,
    alpha: f64,
    max_level: Option<usize>,
    fit: &FitArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = fit.config()?;
    let m = method(test, alpha)?;
    let path = Path::new(input);
    let (ds, truth, generated) = if path.exists() {
        (load(path, cfg.t)?, None, false)
    } else {
        let id: ScenarioId = input.parse().map_err(|_| {
            CliError::Usage(format!("`{input}` is neither a readable file nor a scenario name"))
        })?;
        let g = generate(&ScenarioSpec::new(id, n, seed))?;
        let truth = (id == ScenarioId::Network).then(true_network_edges);
        (g.to_dataset(cfg.t)?, truth, true)
    };
    let oracle = DataCiTest { dataset: &ds, method: m, config: cfg };
    let skeleton = pc_stable_skeleton(&ds.names(), &oracle, max_level)?;
    let (precision, recall) = match &truth {
        Some(t) => {
            let (p, r) = skeleton.precision_recall(t);
            (Some(p), Some(r))
        }
        None => (None, None),
    };
    let name = |i: usize| ds.column(i).name().to_string();
    let results = DiscoverOutput {
        source: input.to_string(),
        n_generated: generated.then_some(n),
        nodes: skeleton.nodes.clone(),
        edges: skeleton.edge_names(),
        separating_sets: skeleton
            .separating_sets
            .iter()
            .map(|(&(a, b), s)| SepSet { x: name(a), y: name(b), given: s.iter().map(|&g| name(g)).collect() })
            .collect(),
        precision,
        recall,
    };
    match output.format.unwrap_or(Format::Json) {
        Format::Json => emit_json(
            output,
            argv,
            ConfigEcho { fit: cfg, test: Some(m) },
            generated.then_some(seed),
            results,
            started,
        ),
        Format::Csv => {
            let rows: Vec<Vec<String>> =
                results.edges.iter().map(|(a, b)| vec![a.clone(), b.clone()]).collect();
            emit_csv(output, &["x", "y"], &rows)?;
            if let (Some(p), Some(r)) = (precision, recall) {
                eprintln!("precision={p} recall={r}");
            }
            Ok(())
        }
    }
}

fn scenario(name: &str) -> Result<ScenarioId, CliError> {
    name.parse().map_err(|e: mixhist::Error| CliError::Usage(e.to_string()))
}

pub fn datagen(
    name: &str,
    n: usize,
    seed: u64,
    k: usize,
    output: &OutputArgs,
) -> Result<(), CliError> {
    if output.format == Some(Format::Json) {
        return Err(CliError::Usage("datagen only writes CSV".into()));
    }
    let spec = ScenarioSpec::new(scenario(name)?, n, seed).with_k(k);
    let g = generate(&spec)?;
    let mut out = open_output(output)?;
    write_dataset(&mut out, &spec, &g).map_err(io_err)?;
    out.flush().map_err(io_err)
}

/// Parses `a..b` (step `a`), `a..b:step`, or a comma-separated list.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse sample sizes `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let sizes = if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (num(hi)?, num(step)?),
            None => (num(rest)?, num(lo)?),
        };
        let lo = num(lo)?;
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(bad());
    }
    Ok(sizes)
}

#[derive(Serialize)]
struct BenchRow {
    scenario: String,
    n: usize,
    replicate_count: u64,
    mean_estimate: f64,
    mse: f64,
    truth: f64,
}

/// Seed of replicate `r` at sample size `n`.
pub fn replicate_seed(seed: u64, n: usize, r: u64) -> u64 {
    derive_seed(derive_seed(seed, n as u64), r)
}

fn replicate(spec: &ScenarioSpec, cfg: &FitConfig) -> Result<f64, CliError> {
    let g = generate(spec)?;
    let ds = g.to_dataset(cfg.t)?;
    let x = VariableGroup::by_names("X", &ds, &g.roles.x)?;
    let y = VariableGroup::by_names("Y", &ds, &g.roles.y)?;
    let z = VariableGroup::by_names("Z", &ds, &g.roles.z)?;
    Ok(cmi_estimate(&ds, &x, &y, &z, cfg)?.value)
}

#[allow(clippy::too_many_arguments)]
pub fn benchmark(
    argv: &[String],
    name: &str,
    sizes: &str,
    reps: u64,
    seed: u64,
    k: usize,
    fit: &FitArgs,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let started = Instant::now();
    let cfg = fit.config()?;
    let id = scenario(name)?;
    let sizes = parse_sizes(sizes)?;
    if reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    let truth = ground_truth(&ScenarioSpec::new(id, sizes[0], seed).with_k(k))
        .ok_or_else(|| CliError::Usage(format!("scenario `{id}` has no closed-form truth")))?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in &sizes {
        let values = (0..reps)
            .into_par_iter()
            .map(|r| replicate(&ScenarioSpec::new(id, n, replicate_seed(seed, n, r)).with_k(k), &cfg))
            .collect::<Result<Vec<f64>, CliError>>()?;
        let count = values.len() as f64;
        rows.push(BenchRow {
            scenario: id.to_string(),
            n,
            replicate_count: reps,
            mean_estimate: values.iter().sum::<f64>() / count,
            mse: values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / count,
            truth,
        });
    }
    match output.format.unwrap_or(Format::Csv) {
        Format::Json => emit_json(
            output,
            argv,
            ConfigEcho { fit: cfg, test: None },
            Some(seed),
            rows,
            started,
        ),
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.scenario.clone(),
                        r.n.to_string(),
                        r.replicate_count.to_string(),
                        r.mean_estimate.to_string(),
                        r.mse.to_string(),
                        r.truth.to_string(),
                    ]
                })
                .collect();
            emit_csv(
                output,
                &["scenario", "n", "replicate_count", "mean_estimate", "mse", "truth"],
                &cells,
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_ranges() {
        assert_eq!(parse_sizes("100..500").unwrap(), [100, 200, 300, 400, 500]);
        assert_eq!(parse_sizes("100..300:50").unwrap(), [100, 150, 200, 250, 300]);
        assert_eq!(parse_sizes("200, 1000").unwrap(), [200, 1000]);
        assert_eq!(parse_sizes("64").unwrap(), [64]);
        for bad in ["", "a..b", "5..1", "0", "1..5:0", "10..20:x"] {
            assert!(parse_sizes(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn replicate_seeds_differ_across_sizes() {
        assert_ne!(replicate_seed(1, 100, 0), replicate_seed(1, 200, 0));
        assert_ne!(replicate_seed(1, 100, 0), replicate_seed(1, 100, 1));
    }
}
