//! PC-stable skeleton discovery.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Answers conditional independence queries between variables by index.
pub trait CiOracle: Sync {
    fn independent(&self, x: usize, y: usize, given: &[usize]) -> Result<bool>;
}

/// Undirected graph recovered by [`pc_stable_skeleton`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skeleton {
    pub nodes: Vec<String>,
    /// Unordered pairs stored as (smaller, larger).
    pub edges: BTreeSet<(usize, usize)>,
    /// Conditioning set that separated each removed pair.
    pub separating_sets: BTreeMap<(usize, usize), Vec<usize>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Skeleton {
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&key(a, b))
    }

    pub fn sepset(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.separating_sets.get(&key(a, b)).map(Vec::as_slice)
    }

    pub fn edge_names(&self) -> Vec<(String, String)> {
        self.edges
            .iter()
            .map(|&(a, b)| (self.nodes[a].clone(), self.nodes[b].clone()))
            .collect()
    }

    /// Precision and recall of the edge set against `truth`.
    ///
    /// An empty prediction has precision 1; an empty truth has recall 1.
    pub fn precision_recall(&self, truth: &BTreeSet<(usize, usize)>) -> (f64, f64) {
        let truth: BTreeSet<_> = truth.iter().map(|&(a, b)| key(a, b)).collect();
        let hits = self.edges.intersection(&truth).count() as f64;
        let precision = if self.edges.is_empty() { 1.0 } else { hits / self.edges.len() as f64 };
        let recall = if truth.is_empty() { 1.0 } else { hits / truth.len() as f64 };
        (precision, recall)
    }
}

/// All size-`k` subsets of `items`, in lexicographic order of positions.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + items.len() - k) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Searches the frozen adjacencies of both endpoints for a separating set of size `level`.
fn find_sepset(
    test: &impl CiOracle,
    frozen: &[BTreeSet<usize>],
    a: usize,
    b: usize,
    level: usize,
) -> Result<Option<Vec<usize>>> {
    let from_a: Vec<usize> = frozen[a].iter().copied().filter(|&v| v != b).collect();
    let from_b: Vec<usize> = frozen[b].iter().copied().filter(|&v| v != a).collect();
    for subset in combinations(&from_a, level) {
        if test.independent(a, b, &subset)? {
            return Ok(Some(subset));
        }
    }
    for subset in combinations(&from_b, level) {
        if subset.iter().all(|v| from_a.contains(v)) {
            continue; // already tested from a's side
        }
        if test.independent(a, b, &subset)? {
            return Ok(Some(subset));
        }
    }
    Ok(None)
}

/// Level-wise edge removal with adjacency sets frozen at the start of each level.
///
/// `max_level` bounds the conditioning-set size; `None` runs until no
/// adjacency set is large enough.
pub fn pc_stable_skeleton<S: AsRef<str>>(
    nodes: &[S],
    test: &impl CiOracle,
    max_level: Option<usize>,
) -> Result<Skeleton> {
    let p = nodes.len();
    if p < 2 {
        return Err(Error::InvalidInput("skeleton discovery needs at least two variables".into()));
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..p).map(|i| (0..p).filter(|&j| j != i).collect()).collect();
    let mut separating_sets = BTreeMap::new();

    for level in 0.. {
        if max_level.is_some_and(|m| level > m) {
            break;
        }
        let frozen = adj.clone();
        let edges: Vec<(usize, usize)> = (0..p)
            .flat_map(|a| frozen[a].iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
            .collect();
        let testable = edges
            .iter()
            .any(|&(a, b)| frozen[a].len() > level || frozen[b].len() > level);
        if !testable {
            break;
        }
        let found = edges
            .par_iter()
            .map(|&(a, b)| find_sepset(test, &frozen, a, b, level))
            .collect::<Result<Vec<_>>>()?;
        for (&(a, b), sep) in edges.iter().zip(found) {
            if let Some(sep) = sep {
                adj[a].remove(&b);
                adj[b].remove(&a);
                separating_sets.insert((a, b), sep);
            }
        }
    }

    let edges = (0..p)
        .flat_map(|a| adj[a].iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
        .collect();
    Ok(Skeleton {
        nodes: nodes.iter().map(|s| s.as_ref().to_string()).collect(),
        edges,
        separating_sets,
    })
}

/// A directed acyclic graph over `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    parents: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut parents = vec![Vec::new(); n];
        for &(from, to) in edges {
            if from >= n || to >= n || from == to {
                return Err(Error::InvalidInput(format!("bad edge {from} -> {to}")));
            }
            if !parents[to].contains(&from) {
                parents[to].push(from);
            }
        }
        let dag = Self { parents };
        if dag.has_cycle() {
            return Err(Error::InvalidInput("graph has a directed cycle".into()));
        }
        Ok(dag)
    }

    fn has_cycle(&self) -> bool {
        // Kahn's algorithm on the reversed edges.
        let n = self.parents.len();
        let mut children = vec![Vec::new(); n];
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for &c in &children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    stack.push(c);
                }
            }
        }
        seen != n
    }

    pub fn num_nodes(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    /// Undirected edge set.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| key(p, c)))
            .collect()
    }
}

/// d-separation in a known DAG, via the moralized ancestral graph.
pub struct DSeparation {
    pub dag: Dag,
}

impl CiOracle for DSeparation {
    fn independent(&self, x: usize, y: usize, given: &[usize]) -> Result<bool> {
        let n = self.dag.num_nodes();
        let mut keep = vec![false; n];
        let mut stack: Vec<usize> = given.iter().copied().chain([x, y]).collect();
        while let Some(v) = stack.pop() {
            if !keep[v] {
                keep[v] = true;
                stack.extend(self.dag.parents(v));
            }
        }
        let mut nbrs = vec![BTreeSet::new(); n];
        for v in (0..n).filter(|&v| keep[v]) {
            let ps = self.dag.parents(v);
            for &p in ps {
                nbrs[v].insert(p);
                nbrs[p].insert(v);
            }
            for (i, &p) in ps.iter().enumerate() {
                for &q in &ps[i + 1..] {
                    nbrs[p].insert(q);
                    nbrs[q].insert(p);
                }
            }
        }
        let blocked: BTreeSet<usize> = given.iter().copied().collect();
        let mut seen = vec![false; n];
        let mut stack = vec![x];
        seen[x] = true;
        while let Some(v) = stack.pop() {
            if v == y {
                return Ok(false);
            }
            for &w in &nbrs[v] {
                if !seen[w] && !blocked.contains(&w) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        Ok(true)
    }
}
