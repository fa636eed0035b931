//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::time::Instant;

use common::{brute_regret_bits, exhaustive_best, random_mixed_dataset, score_1d};
use mixhist::citest::chi2_from_estimate;
use mixhist::datagen::derive_seed;
use mixhist::{
    candidate_cuts, cmi_estimate, detect_discrete_points, generate, ground_truth, log_regret,
    optimal_histogram_1d, pc_stable_skeleton, true_network_edges, CiMethod, Dag, DataCiTest,
    DSeparation, EstimateResult, FitConfig, ScenarioId, ScenarioSpec, VariableGroup,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn estimate(spec: ScenarioSpec) -> EstimateResult {
    let g = generate(&spec).unwrap();
    let ds = g.to_dataset(5).unwrap();
    let x = VariableGroup::by_names("X", &ds, &g.roles.x).unwrap();
    let y = VariableGroup::by_names("Y", &ds, &g.roles.y).unwrap();
    let z = VariableGroup::by_names("Z", &ds, &g.roles.z).unwrap();
    cmi_estimate(&ds, &x, &y, &z, &FitConfig::default()).unwrap()
}

/// (mean, mse) of the estimate over `reps` seeded replicates.
fn mean_mse(id: ScenarioId, n: usize, k: usize, reps: u64, base: u64) -> (f64, f64) {
    let truth = ground_truth(&ScenarioSpec::new(id, n, 0).with_k(k)).unwrap();
    let vals: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| estimate(ScenarioSpec::new(id, n, derive_seed(base, r)).with_k(k)).value)
        .collect();
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let mse = vals.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / m;
    (mean, mse)
}

fn exp1() -> Outcome {
    let (mean, mse) = mean_mse(ScenarioId::Exp1, 1000, 1, 100, 101);
    Outcome {
        pass: mse <= 0.005,
        detail: format!("mean {mean:.4}, MSE {mse:.5} (need <= 0.005)"),
    }
}

fn exp4() -> Outcome {
    let (mean, mse) = mean_mse(ScenarioId::Exp4, 1000, 1, 100, 104);
    Outcome {
        pass: mean.abs() <= 0.02 && mse <= 0.01,
        detail: format!("mean {mean:.4} (need |mean| <= 0.02), MSE {mse:.5} (need <= 0.01)"),
    }
}

fn exp5() -> Outcome {
    let truth = ground_truth(&ScenarioSpec::new(ScenarioId::Exp5, 1, 0)).unwrap();
    let (mean, mse_1000) = mean_mse(ScenarioId::Exp5, 1000, 1, 100, 105);
    let (_, mse_200) = mean_mse(ScenarioId::Exp5, 200, 1, 100, 205);
    Outcome {
        pass: (mean - truth).abs() <= 0.05 && mse_1000 < mse_200,
        detail: format!(
            "mean {mean:.4} vs {truth:.4} (need within 0.05); MSE n=200 {mse_200:.5} -> n=1000 {mse_1000:.5} (need decrease)"
        ),
    }
}

fn exp6() -> Outcome {
    let (_, k1) = mean_mse(ScenarioId::Exp6, 2000, 1, 100, 161);
    let (_, k2) = mean_mse(ScenarioId::Exp6, 2000, 2, 100, 162);
    let (_, k4) = mean_mse(ScenarioId::Exp6, 10_000, 4, 100, 164);
    Outcome {
        pass: k1 <= 0.01 && k2 <= 0.01 && k4 <= 0.005,
        detail: format!(
            "MSE k=1 {k1:.5}, k=2 {k2:.5} (need <= 0.01 at n=2000); k=4 {k4:.5} (need <= 0.005 at n=10000)"
        ),
    }
}

fn cancellation() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = rng.random_range(50..=500);
        let k = rng.random_range(0..=3);
        let ds = random_mixed_dataset(1000 + i, n, 2 + k);
        let x = VariableGroup::new("X", vec![0]);
        let y = VariableGroup::new("Y", vec![1]);
        let z = VariableGroup::new("Z", (2..2 + k).collect());
        let est = cmi_estimate(&ds, &x, &y, &z, &FitConfig::default()).unwrap();
        worst = worst.max(est.cancellation_residual().unwrap());
    }
    Outcome {
        pass: worst < 1e-9,
        detail: format!("max |continuous - plug-in| over 50 datasets = {worst:.3e} nats"),
    }
}

fn dp_optimality() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let n = rng.random_range(10..200);
        let v: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.2) {
                    rng.random_range(0..3) as f64
                } else {
                    rng.random::<f64>().powi(3) * 4.0 - 1.0
                }
            })
            .collect();
        let col = detect_discrete_points("x", &v, 5).unwrap();
        let k_init = rng.random_range(2..=13);
        let k_max = rng.random_range(1..=k_init);
        let cand = candidate_cuts(&col, k_init).unwrap();
        let dp = score_1d(&col, &optimal_histogram_1d(&col, &cand, k_max).unwrap());
        let (brute, _) = exhaustive_best(&col, &cand, k_max);
        worst = worst.max((dp - brute).abs());
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("max |DP - exhaustive| over 30 instances = {worst:.3e} bits"),
    }
}

fn regret_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        for k in 1..=6u64 {
            worst = worst.max((log_regret(n, k).unwrap() - brute_regret_bits(n, k as usize)).abs());
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("max |recurrence - direct sum| = {worst:.3e} bits"),
    }
}

fn bin_growth() -> Outcome {
    let cfg = FitConfig::default();
    let sizes = [500usize, 1000, 5000, 20_000];
    let medians: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let mut counts: Vec<usize> = (0..20u64)
                .into_par_iter()
                .map(|r| {
                    let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(n as u64, r));
                    let v: Vec<f64> = (0..n).map(|_| Normal::new(0.0, 1.0).unwrap().sample(&mut rng)).collect();
                    let col = detect_discrete_points("x", &v, cfg.t).unwrap();
                    let cand = candidate_cuts(&col, cfg.k_init(n)).unwrap();
                    optimal_histogram_1d(&col, &cand, cfg.k_max(n)).unwrap().num_intervals()
                })
                .collect();
            counts.sort_unstable();
            (counts[9] + counts[10]) as f64 / 2.0
        })
        .collect();
    let increasing = medians.windows(2).all(|w| w[1] > w[0]);
    let below = sizes.iter().zip(&medians).all(|(&n, &m)| m < (n as f64).sqrt());
    Outcome {
        pass: increasing && below,
        detail: format!("median bins {medians:?} at n = {sizes:?}"),
    }
}

fn accuracy(id: ScenarioId, n: usize, base: u64, want_independent: bool) -> f64 {
    let hits = (0..100u64)
        .into_par_iter()
        .filter(|&r| {
            let est = estimate(ScenarioSpec::new(id, n, derive_seed(base, r)));
            chi2_from_estimate(&est, 0.01).unwrap().independent == want_independent
        })
        .count();
    hits as f64 / 100.0
}

fn ci_batteries() -> Outcome {
    let rows = [
        (ScenarioId::NonCollider(1), 1000, true),
        (ScenarioId::NonCollider(2), 1000, true),
        (ScenarioId::Collider(5), 400, false),
        (ScenarioId::Collider(6), 400, false),
    ];
    let accs: Vec<(ScenarioId, f64)> = rows
        .iter()
        .enumerate()
        .map(|(i, &(id, n, indep))| (id, accuracy(id, n, 900 + i as u64, indep)))
        .collect();
    Outcome {
        pass: accs.iter().all(|&(_, a)| a >= 0.9),
        detail: accs
            .iter()
            .map(|(id, a)| format!("{id} {a:.2}"))
            .collect::<Vec<_>>()
            .join(", "),
    }
}

fn discovery() -> Outcome {
    let truth = true_network_edges();
    let scores: Vec<(f64, f64)> = (0..10u64)
        .map(|r| {
            let g = generate(&ScenarioSpec::new(ScenarioId::Network, 10_000, derive_seed(1010, r))).unwrap();
            let ds = g.to_dataset(5).unwrap();
            let oracle = DataCiTest {
                dataset: &ds,
                method: CiMethod::Chi2 { alpha: 0.01 },
                config: FitConfig::default(),
            };
            pc_stable_skeleton(&g.names, &oracle, None).unwrap().precision_recall(&truth)
        })
        .collect();
    let p = scores.iter().map(|s| s.0).sum::<f64>() / 10.0;
    let r = scores.iter().map(|s| s.1).sum::<f64>() / 10.0;
    Outcome {
        pass: p >= 0.95 && r >= 0.85,
        detail: format!("mean precision {p:.3} (need >= 0.95), mean recall {r:.3} (need >= 0.85)"),
    }
}

/// Every DAG over `p` labelled nodes with at most `max_edges` edges.
fn all_dags(p: usize, max_edges: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let total = 3usize.pow(pairs.len() as u32);
    for mut code in 0..total {
        let mut edges = Vec::new();
        for &(a, b) in &pairs {
            match code % 3 {
                1 => edges.push((a, b)),
                2 => edges.push((b, a)),
                _ => {}
            }
            code /= 3;
        }
        if edges.len() <= max_edges && Dag::new(p, &edges).is_ok() {
            out.push(edges);
        }
    }
    out
}

fn small_dags() -> Outcome {
    let mut checked = 0;
    let mut wrong = 0;
    for p in 1..=5 {
        for edges in all_dags(p, 6) {
            let dag = Dag::new(p, &edges).unwrap();
            let truth = dag.skeleton();
            let names: Vec<String> = (0..p).map(|i| format!("v{i}")).collect();
            checked += 1;
            match pc_stable_skeleton(&names, &DSeparation { dag }, None) {
                Ok(s) if s.edges == truth => {}
                Ok(_) => wrong += 1,
                // a single node has nothing to discover
                Err(_) if p == 1 => {}
                Err(_) => wrong += 1,
            }
        }
    }
    Outcome {
        pass: wrong == 0,
        detail: format!("{wrong} mismatches over {checked} DAGs"),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("Experiment I MSE", exp1),
        ("Experiment IV mean and MSE", exp4),
        ("Experiment V mean and MSE trend", exp5),
        ("Experiment VI MSE", exp6),
        ("volume cancellation identity", cancellation),
        ("DP optimality vs exhaustive search", dp_optimality),
        ("regret vs multinomial sum", regret_oracle),
        ("sub-sqrt(n) bin growth", bin_growth),
        ("CI test batteries", ci_batteries),
        ("network discovery", discovery),
        ("PC-stable with d-separation on small DAGs", small_dags),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict}: {name}: {} [{:.1}s]",
            i + 1,
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 11 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
