//! Seeded synthetic scenarios with known ground truth.
//!
//! Every scenario draws from a single ChaCha20 stream seeded with
//! `seed_from_u64(seed)`. Per-dataset parameters (mechanism choices, rates)
//! are drawn first, then rows are generated in order, so an identical
//! `(spec, seed)` always yields the identical dataset.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution, Exp, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Name of the generator written into every emitted dataset.
pub const GENERATOR: &str = "chacha20 (rand_chacha 0.9, seed_from_u64) v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScenarioId {
    Exp1,
    Exp2,
    Exp3,
    Exp4,
    Exp5,
    Exp6,
    Network,
    Collider(u8),
    NonCollider(u8),
}

impl ScenarioId {
    pub fn all() -> Vec<ScenarioId> {
        let mut v = vec![
            ScenarioId::Exp1,
            ScenarioId::Exp2,
            ScenarioId::Exp3,
            ScenarioId::Exp4,
            ScenarioId::Exp5,
            ScenarioId::Exp6,
            ScenarioId::Network,
        ];
        v.extend((1..=6).map(ScenarioId::Collider));
        v.extend((1..=4).map(ScenarioId::NonCollider));
        v
    }

    /// Whether the declared roles satisfy `X ⊥ Y | Z`, for CI-test scenarios.
    pub fn ci_truth(self) -> Option<bool> {
        match self {
            ScenarioId::Collider(_) => Some(false),
            ScenarioId::NonCollider(_) | ScenarioId::Exp4 => Some(true),
            _ => None,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioId::Exp1 => write!(f, "exp1"),
            ScenarioId::Exp2 => write!(f, "exp2"),
            ScenarioId::Exp3 => write!(f, "exp3"),
            ScenarioId::Exp4 => write!(f, "exp4"),
            ScenarioId::Exp5 => write!(f, "exp5"),
            ScenarioId::Exp6 => write!(f, "exp6"),
            ScenarioId::Network => write!(f, "network"),
            ScenarioId::Collider(m) => write!(f, "collider{m}"),
            ScenarioId::NonCollider(m) => write!(f, "noncollider{m}"),
        }
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownScenario(s.to_string());
        let lower = s.to_ascii_lowercase();
        let id = match lower.as_str() {
            "exp1" => ScenarioId::Exp1,
            "exp2" => ScenarioId::Exp2,
            "exp3" => ScenarioId::Exp3,
            "exp4" => ScenarioId::Exp4,
            "exp5" => ScenarioId::Exp5,
            "exp6" => ScenarioId::Exp6,
            "network" => ScenarioId::Network,
            other => {
                let (m, max, ctor): (&str, u8, fn(u8) -> ScenarioId) =
                    if let Some(m) = other.strip_prefix("noncollider") {
                        (m, 4, ScenarioId::NonCollider)
                    } else if let Some(m) = other.strip_prefix("collider") {
                        (m, 6, ScenarioId::Collider)
                    } else {
                        return Err(unknown());
                    };
                let m: u8 = m.parse().map_err(|_| unknown())?;
                if !(1..=max).contains(&m) {
                    return Err(unknown());
                }
                ctor(m)
            }
        };
        Ok(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub id: ScenarioId,
    pub n: usize,
    pub seed: u64,
    /// Number of conditioning variables (exp6 only).
    pub k: usize,
}

impl ScenarioSpec {
    pub fn new(id: ScenarioId, n: usize, seed: u64) -> Self {
        Self { id, n, seed, k: 1 }
    }

    pub fn with_k(self, k: usize) -> Self {
        Self { k, ..self }
    }
}

/// Column names playing the X, Y and Z roles of a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Roles {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub roles: Roles,
}

impl Generated {
    pub fn to_dataset(&self, t: usize) -> Result<Dataset> {
        Dataset::from_raw(&self.names, &self.columns, t)
    }
}

/// splitmix64 of `base + index·γ`; seeds for replicate `index` of a run.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn normal(rng: &mut ChaCha20Rng, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        return mean;
    }
    Normal::new(mean, sd).expect("finite normal parameters").sample(rng)
}

fn poisson(rng: &mut ChaCha20Rng, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    Poisson::new(lambda).expect("finite poisson rate").sample(rng)
}

fn binomial(rng: &mut ChaCha20Rng, trials: u64, p: f64) -> f64 {
    Binomial::new(trials, p).expect("valid binomial").sample(rng) as f64
}

fn exponential(rng: &mut ChaCha20Rng, rate: f64) -> f64 {
    Exp::new(rate).expect("positive rate").sample(rng)
}

/// Polynomials up to degree three or the tangent.
#[derive(Debug, Clone, Copy)]
enum Mechanism {
    Linear,
    Square,
    Cube,
    Tan,
}

impl Mechanism {
    fn draw(rng: &mut ChaCha20Rng) -> Self {
        match rng.random_range(0..4) {
            0 => Mechanism::Linear,
            1 => Mechanism::Square,
            2 => Mechanism::Cube,
            _ => Mechanism::Tan,
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Mechanism::Linear => x,
            Mechanism::Square => x * x,
            Mechanism::Cube => x * x * x,
            Mechanism::Tan => x.tan(),
        }
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn xyz(columns: Vec<Vec<f64>>, z: &[&str]) -> Generated {
    let mut all = vec!["X", "Y"];
    all.extend_from_slice(z);
    Generated {
        names: names(&all[..columns.len()]),
        columns,
        roles: Roles {
            x: names(&["X"]),
            y: names(&["Y"]),
            z: names(z),
        },
    }
}

fn exp2_pair(rng: &mut ChaCha20Rng) -> (f64, f64) {
    let x = rng.random_range(0..5) as f64;
    let y = rng.random_range(x..x + 2.0);
    (x, y)
}

/// Markov chain X → Z → Y; returned as (x, z, y).
fn exp4_row(rng: &mut ChaCha20Rng) -> (f64, f64, f64) {
    let x = exponential(rng, 0.5);
    let z = poisson(rng, x);
    let y = binomial(rng, z as u64, 0.5);
    (x, z, y)
}

/// Draws the scenario's dataset.
pub fn generate(spec: &ScenarioSpec) -> Result<Generated> {
    if spec.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if spec.id == ScenarioId::Exp6 && spec.k == 0 {
        return Err(Error::InvalidInput("exp6 needs k >= 1".into()));
    }
    let n = spec.n;
    let rng = &mut ChaCha20Rng::seed_from_u64(spec.seed);
    let cols = |width: usize| vec![Vec::with_capacity(n); width];

    let out = match spec.id {
        ScenarioId::Exp1 => {
            let mut c = cols(2);
            let rho: f64 = 0.6;
            for _ in 0..n {
                let x = normal(rng, 0.0, 1.0);
                let e = normal(rng, 0.0, 1.0);
                c[0].push(x);
                c[1].push(rho * x + (1.0 - rho * rho).sqrt() * e);
            }
            xyz(c, &[])
        }
        ScenarioId::Exp2 => {
            let mut c = cols(2);
            for _ in 0..n {
                let (x, y) = exp2_pair(rng);
                c[0].push(x);
                c[1].push(y);
            }
            xyz(c, &[])
        }
        ScenarioId::Exp3 => {
            let mut c = cols(2);
            for _ in 0..n {
                let x = exponential(rng, 1.0);
                let y = if rng.random_bool(0.15) { 0.0 } else { poisson(rng, x) };
                c[0].push(x);
                c[1].push(y);
            }
            xyz(c, &[])
        }
        ScenarioId::Exp4 | ScenarioId::NonCollider(3) => {
            let mut c = cols(3);
            for _ in 0..n {
                let (x, z, y) = exp4_row(rng);
                c[0].push(x);
                c[1].push(y);
                c[2].push(z);
            }
            xyz(c, &["Z"])
        }
        ScenarioId::Exp5 => {
            let mut c = cols(3);
            let rho: f64 = 0.8;
            for _ in 0..n {
                let (x, y) = if rng.random_bool(0.5) {
                    let x = normal(rng, 0.0, 1.0);
                    let e = normal(rng, 0.0, 1.0);
                    (x, rho * x + (1.0 - rho * rho).sqrt() * e)
                } else {
                    match rng.random::<f64>() {
                        u if u < 0.4 => (1.0, 1.0),
                        u if u < 0.8 => (-1.0, -1.0),
                        u if u < 0.9 => (1.0, -1.0),
                        _ => (-1.0, 1.0),
                    }
                };
                c[0].push(x);
                c[1].push(y);
                c[2].push(binomial(rng, 3, 0.2));
            }
            xyz(c, &["Z"])
        }
        ScenarioId::Exp6 => {
            let mut c = cols(2 + spec.k);
            for _ in 0..n {
                let (x, y) = exp2_pair(rng);
                c[0].push(x);
                c[1].push(y);
                for col in c.iter_mut().skip(2) {
                    col.push(binomial(rng, 3, 0.5));
                }
            }
            let z: Vec<String> = (1..=spec.k).map(|i| format!("Z{i}")).collect();
            let zr: Vec<&str> = z.iter().map(String::as_str).collect();
            xyz(c, &zr)
        }
        ScenarioId::Network => network(rng, n),
        ScenarioId::Collider(m) => collider(rng, n, m)?,
        ScenarioId::NonCollider(m) => noncollider(rng, n, m)?,
    };
    Ok(out)
}

fn network(rng: &mut ChaCha20Rng, n: usize) -> Generated {
    let mut c = (0..7).map(|_| Vec::with_capacity(n)).collect::<Vec<_>>();
    for _ in 0..n {
        let a = exponential(rng, 1.0);
        let b = rng.random_range(0..=4) as f64;
        let cc = binomial(rng, b as u64, 0.5);
        let d = normal(rng, b - 2.0, 1.0);
        let e = exponential(rng, 1.0 / (cc + 1.0));
        let power = cc.round();
        let base = if (power as u64).is_multiple_of(2) {
            d.powi(power as i32 / 2)
        } else {
            d.signum() * d.abs().powf(power / 2.0)
        };
        let f = base + normal(rng, 0.0, 1.0);
        let e_bit = (e - 1.0).signum() + 1.0 > 0.0;
        let g = if e_bit { poisson(rng, a) } else { normal(rng, a, 1.0) };
        for (col, v) in c.iter_mut().zip([a, b, cc, d, e, f, g]) {
            col.push(v);
        }
    }
    Generated {
        names: names(&["A", "B", "C", "D", "E", "F", "G"]),
        columns: c,
        roles: Roles { x: vec![], y: vec![], z: vec![] },
    }
}

/// Index pairs of the network's true undirected edges, over nodes A..G.
pub fn true_network_edges() -> BTreeSet<(usize, usize)> {
    // A-G, B-C, B-D, C-E, C-F, D-F, E-G
    BTreeSet::from([(0, 6), (1, 2), (1, 3), (2, 4), (2, 5), (3, 5), (4, 6)])
}

/// Directed edges of the network, as (parent, child).
pub fn network_dag_edges() -> Vec<(usize, usize)> {
    vec![(0, 6), (1, 2), (1, 3), (2, 4), (2, 5), (3, 5), (4, 6)]
}

/// Replaces 10% of the entries with a value drawn from the column itself.
fn scramble_tenth(rng: &mut ChaCha20Rng, z: &mut [f64]) {
    let n = z.len();
    for i in 0..n {
        if rng.random_bool(0.1) {
            z[i] = z[rng.random_range(0..n)];
        }
    }
}

fn collider(rng: &mut ChaCha20Rng, n: usize, m: u8) -> Result<Generated> {
    let mut c = (0..3).map(|_| Vec::with_capacity(n)).collect::<Vec<_>>();
    match m {
        1 => {
            let uniform = rng.random_bool(0.5);
            let (fx, fy) = (Mechanism::draw(rng), Mechanism::draw(rng));
            for _ in 0..n {
                let (x, y) = if uniform {
                    (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
                } else {
                    (normal(rng, 0.0, 1.0), normal(rng, 0.0, 1.0))
                };
                let z = fx.apply(x) + fy.apply(y) + normal(rng, 0.0, 0.1);
                c[0].push(x);
                c[1].push(y);
                c[2].push(z);
            }
        }
        2 | 3 => {
            for _ in 0..n {
                let x = normal(rng, 0.0, 1.0);
                let y = normal(rng, 0.0, 1.0);
                let s = (x * y).signum();
                let z = if m == 2 { s * exponential(rng, 1.0 / 2f64.sqrt()) } else { s };
                c[0].push(x);
                c[1].push(y);
                c[2].push(z);
            }
            if m == 3 {
                for z in c[2].iter_mut() {
                    if rng.random_bool(0.1) {
                        *z = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    }
                }
            }
        }
        4 => {
            let lambda = rng.random_range(1..=3) as f64;
            for _ in 0..n {
                let x = normal(rng, 0.0, 1.0);
                let y = poisson(rng, lambda);
                let z = if y == 0.0 { x } else { x.rem_euclid(y) };
                c[0].push(x);
                c[1].push(y);
                c[2].push(z);
            }
            scramble_tenth(rng, &mut c[2]);
        }
        5 | 6 => {
            for _ in 0..n {
                let x = rng.random_range(0..2u8);
                let y = rng.random_range(0..2u8);
                let noise = normal(rng, 0.0, 0.1);
                let z = match (x ^ y, m) {
                    (0, _) => noise,
                    (_, 5) => poisson(rng, 5.0) * noise,
                    _ => poisson(rng, 5.0) + noise,
                };
                c[0].push(x as f64);
                c[1].push(y as f64);
                c[2].push(z);
            }
        }
        _ => return Err(Error::UnknownScenario(format!("collider{m}"))),
    }
    Ok(xyz(c, &["Z"]))
}

fn noncollider(rng: &mut ChaCha20Rng, n: usize, m: u8) -> Result<Generated> {
    let mut c = (0..3).map(|_| Vec::with_capacity(n)).collect::<Vec<_>>();
    match m {
        1 | 2 => {
            let (f, g) = (Mechanism::draw(rng), Mechanism::draw(rng));
            for _ in 0..n {
                let (x, y, z);
                if m == 1 {
                    x = normal(rng, 0.0, 1.0);
                    z = f.apply(x) + normal(rng, 0.0, 1.0);
                    y = g.apply(z) + normal(rng, 0.0, 1.0);
                } else {
                    z = normal(rng, 0.0, 1.0);
                    x = f.apply(z) + normal(rng, 0.0, 1.0);
                    y = g.apply(z) + normal(rng, 0.0, 1.0);
                }
                c[0].push(x);
                c[1].push(y);
                c[2].push(z);
            }
        }
        3 => {
            for _ in 0..n {
                let (x, z, y) = exp4_row(rng);
                c[0].push(x);
                c[1].push(y);
                c[2].push(z);
            }
        }
        4 => {
            // Fork Y ← X → Z: the tested pair is (Z, Y) given X.
            let mu = rng.random_range(-4.0..=4.0);
            for _ in 0..n {
                let (x, y) = exp2_pair(rng);
                let z = normal(rng, mu, x);
                c[0].push(x);
                c[1].push(y);
                c[2].push(z);
            }
            return Ok(Generated {
                names: names(&["X", "Y", "Z"]),
                columns: c,
                roles: Roles {
                    x: names(&["Z"]),
                    y: names(&["Y"]),
                    z: names(&["X"]),
                },
            });
        }
        _ => return Err(Error::UnknownScenario(format!("noncollider{m}"))),
    }
    Ok(xyz(c, &["Z"]))
}

fn exp2_truth() -> f64 {
    let m = 5.0f64;
    m.ln() - (m - 1.0) * 2f64.ln() / m
}

/// True CMI of the declared roles in nats, or `None` when it is not known in closed form.
pub fn ground_truth(spec: &ScenarioSpec) -> Option<f64> {
    match spec.id {
        ScenarioId::Exp1 => Some(-0.5 * (1.0 - 0.6f64.powi(2)).ln()),
        ScenarioId::Exp2 | ScenarioId::Exp6 => Some(exp2_truth()),
        ScenarioId::Exp3 => {
            const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
            let tail: f64 = (2..200).map(|k| (k as f64).ln() * 0.5f64.powi(k)).sum();
            Some(0.85 * (2.0 * 2f64.ln() - EULER_GAMMA - tail))
        }
        ScenarioId::Exp4 | ScenarioId::NonCollider(_) => Some(0.0),
        ScenarioId::Exp5 => Some(
            0.4 * (0.4f64 / 0.25).ln() + 0.1 * (0.1f64 / 0.25).ln() - 0.25 * (1.0 - 0.8f64.powi(2)).ln(),
        ),
        ScenarioId::Network | ScenarioId::Collider(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(id: ScenarioId, n: usize, seed: u64) -> Generated {
        generate(&ScenarioSpec::new(id, n, seed)).unwrap()
    }

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    #[test]
    fn ids_round_trip() {
        for id in ScenarioId::all() {
            assert_eq!(id.to_string().parse::<ScenarioId>().unwrap(), id);
        }
        for bad in ["exp7", "collider0", "collider7", "noncollider5", "colliderx", ""] {
            assert!(matches!(bad.parse::<ScenarioId>(), Err(Error::UnknownScenario(_))), "{bad}");
        }
    }

    #[test]
    fn truths() {
        let t = |id| ground_truth(&ScenarioSpec::new(id, 10, 0));
        assert!((t(ScenarioId::Exp1).unwrap() - 0.22314).abs() < 1e-5);
        assert!((t(ScenarioId::Exp2).unwrap() - 1.05492).abs() < 1e-5);
        assert!((t(ScenarioId::Exp3).unwrap() - 0.25602).abs() < 1e-3);
        assert_eq!(t(ScenarioId::Exp4), Some(0.0));
        assert!((t(ScenarioId::Exp5).unwrap() - 0.352).abs() < 1e-3);
        assert_eq!(t(ScenarioId::Network), None);
    }

    #[test]
    fn same_seed_same_data() {
        for id in ScenarioId::all() {
            let spec = ScenarioSpec::new(id, 200, 42).with_k(2);
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap(), "{id}");
            let other = ScenarioSpec { seed: 43, ..spec };
            assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap(), "{id}");
        }
    }

    #[test]
    fn roles_name_existing_columns() {
        for id in ScenarioId::all() {
            let g = generate(&ScenarioSpec::new(id, 50, 1).with_k(3)).unwrap();
            assert_eq!(g.names.len(), g.columns.len());
            for r in g.roles.x.iter().chain(&g.roles.y).chain(&g.roles.z) {
                assert!(g.names.contains(r), "{id}: {r}");
            }
            assert!(g.columns.iter().flatten().all(|v| v.is_finite()), "{id}");
        }
    }

    #[test]
    fn exp1_correlation() {
        let g = gen(ScenarioId::Exp1, 100_000, 7);
        let (x, y) = (&g.columns[0], &g.columns[1]);
        let (mx, my) = (mean(x), mean(y));
        let cov = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>();
        let vx = x.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        let vy = y.iter().map(|b| (b - my).powi(2)).sum::<f64>();
        let r = cov / (vx * vy).sqrt();
        assert!((r - 0.6).abs() < 0.01, "{r}");
    }

    #[test]
    fn exp2_marginals() {
        let g = gen(ScenarioId::Exp2, 100_000, 8);
        for k in 0..5 {
            let f = g.columns[0].iter().filter(|&&x| x == k as f64).count() as f64 / 1e5;
            assert!((f - 0.2).abs() < 0.01, "{k}: {f}");
        }
        assert!(g.columns[0].iter().zip(&g.columns[1]).all(|(x, y)| (0.0..=2.0).contains(&(y - x))));
    }

    #[test]
    fn exp3_zero_inflation() {
        let g = gen(ScenarioId::Exp3, 100_000, 9);
        let zeros = g.columns[1].iter().filter(|&&y| y == 0.0).count() as f64 / 1e5;
        assert!(zeros >= 0.15);
        // P(Y=0) = 0.15 + 0.85·E[e^{-X}] = 0.15 + 0.85/2
        assert!((zeros - 0.575).abs() < 3.0 * (0.575f64 * 0.425 / 1e5).sqrt() + 1e-3, "{zeros}");
    }

    #[test]
    fn exp5_mixture_fractions() {
        let g = gen(ScenarioId::Exp5, 100_000, 10);
        let (x, y) = (&g.columns[0], &g.columns[1]);
        let disc = x.iter().zip(y).filter(|(a, b)| a.abs() == 1.0 && b.abs() == 1.0).count() as f64 / 1e5;
        assert!((disc - 0.5).abs() < 0.01, "{disc}");
        let pp = x.iter().zip(y).filter(|(&a, &b)| a == 1.0 && b == 1.0).count() as f64 / 1e5;
        assert!((pp - 0.2).abs() < 0.01, "{pp}");
        let z = mean(&g.columns[2]);
        assert!((z - 0.6).abs() < 3.0 * (0.48f64 / 1e5).sqrt(), "{z}");
    }

    #[test]
    fn exp4_chain_moments() {
        // E[X] = 2, E[Z] = E[X] = 2, E[Y] = E[Z]/2 = 1
        let g = gen(ScenarioId::Exp4, 100_000, 11);
        assert!((mean(&g.columns[0]) - 2.0).abs() < 3.0 * 2.0 / 1e5f64.sqrt());
        assert!((mean(&g.columns[2]) - 2.0).abs() < 0.05);
        assert!((mean(&g.columns[1]) - 1.0).abs() < 0.03);
    }

    #[test]
    fn exp6_columns() {
        let g = generate(&ScenarioSpec::new(ScenarioId::Exp6, 1000, 3).with_k(3)).unwrap();
        assert_eq!(g.names, ["X", "Y", "Z1", "Z2", "Z3"]);
        assert_eq!(g.roles.z, ["Z1", "Z2", "Z3"]);
        assert!(g.columns[2..].iter().flatten().all(|&z| (0.0..=3.0).contains(&z) && z.fract() == 0.0));
        assert!(generate(&ScenarioSpec::new(ScenarioId::Exp6, 10, 3).with_k(0)).is_err());
    }

    #[test]
    fn network_sources_and_edges() {
        let g = gen(ScenarioId::Network, 100_000, 12);
        assert!((mean(&g.columns[0]) - 1.0).abs() < 3.0 / 1e5f64.sqrt());
        assert!((mean(&g.columns[1]) - 2.0).abs() < 3.0 * 2f64.sqrt() / 1e5f64.sqrt());
        let edges = true_network_edges();
        assert_eq!(edges.len(), 7);
        assert!(edges.contains(&(2, 4)) && edges.contains(&(4, 6)));
        assert!(!edges.contains(&(0, 1)));
    }

    #[test]
    fn collider_xor_structure() {
        let g = gen(ScenarioId::Collider(6), 10_000, 13);
        for i in 0..10_000 {
            let (x, y, z) = (g.columns[0][i], g.columns[1][i], g.columns[2][i]);
            if x == y {
                assert!(z.abs() < 1.0);
            }
        }
    }

    #[test]
    fn seed_split_is_stable() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(5, 3), derive_seed(5, 3));
    }

    #[test]
    fn zero_rows_rejected() {
        assert!(generate(&ScenarioSpec::new(ScenarioId::Exp1, 0, 1)).is_err());
    }
}
