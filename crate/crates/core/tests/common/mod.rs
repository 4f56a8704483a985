//! Reference implementations used only by tests. None of them call into the
//! solver's graph code: distances come from Floyd–Warshall or from explicit
//! path enumeration.
#![allow(dead_code)]

use clustp::instance::{ClusteredInstance, EdgeRef, WeightMatrix};
use clustp::io::parse_instance;
use clustp::nrga::{EdgeCandidate, EdgeSelector, NrgaError, SelectionStep};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WALKTHROUGH: &str = include_str!("../../data/walkthrough.clustp");
pub const PUBLISHED_TABLES: &str = include_str!("../../data/published_tables.csv");

pub fn walkthrough() -> ClusteredInstance {
    parse_instance(WALKTHROUGH).expect("walkthrough fixture parses")
}

/// Selector for the `walkthrough` fixture. Takes 1-10 when joining C2 from C1
/// and otherwise insists on a single candidate. Records every call.
#[derive(Default)]
pub struct Scripted {
    pub calls: Vec<(SelectionStep, Vec<EdgeCandidate>)>,
}

impl EdgeSelector for Scripted {
    fn select(
        &mut self,
        step: &SelectionStep,
        candidates: &[EdgeCandidate],
        _rng: &mut dyn RngCore,
    ) -> Result<usize, NrgaError> {
        self.calls.push((*step, candidates.to_vec()));
        if (step.current, step.target) == (0, 1) {
            Ok(candidates.iter().position(|c| c.edge.canonical() == EdgeRef::new(0, 9)).expect("1-10 offered"))
        } else {
            assert_eq!(candidates.len(), 1, "single edge expected for {step:?}");
            Ok(0)
        }
    }
}

/// All-pairs shortest paths over the subgraph induced by `members`, indexed
/// by position in `members`.
pub fn floyd_warshall(inst: &ClusteredInstance, members: &[usize]) -> Vec<Vec<f64>> {
    let m = members.len();
    let mut d = vec![vec![f64::INFINITY; m]; m];
    for i in 0..m {
        d[i][i] = 0.0;
        for j in 0..m {
            if i != j {
                d[i][j] = inst.weight(members[i], members[j]);
            }
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Shortest distance from `from` to every vertex of `members` by enumerating
/// every simple path inside the induced subgraph.
pub fn enumerate_paths(inst: &ClusteredInstance, members: &[usize], from: usize) -> Vec<f64> {
    fn walk(inst: &ClusteredInstance, members: &[usize], at: usize, len: f64, seen: &mut [bool], best: &mut [f64]) {
        if len < best[at] {
            best[at] = len;
        }
        for next in 0..members.len() {
            if seen[next] {
                continue;
            }
            let w = inst.weight(members[at], members[next]);
            if w.is_finite() {
                seen[next] = true;
                walk(inst, members, next, len + w, seen, best);
                seen[next] = false;
            }
        }
    }
    let start = members.iter().position(|&v| v == from).expect("from is a member");
    let mut seen = vec![false; members.len()];
    let mut best = vec![f64::INFINITY; members.len()];
    seen[start] = true;
    walk(inst, members, start, 0.0, &mut seen, &mut best);
    best
}

/// Source-rooted cost of a spanning tree, computed by Floyd–Warshall on the
/// tree's own adjacency matrix.
pub fn tree_cost_by_floyd(inst: &ClusteredInstance, edges: &[EdgeRef]) -> f64 {
    let n = inst.num_vertices();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in edges {
        let w = inst.weight(e.u, e.v);
        d[e.u][e.v] = w;
        d[e.v][e.u] = w;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d[inst.source()].iter().sum()
}

/// Random partition of `0..n` into `k` nonempty clusters.
pub fn random_partition(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut clusters = vec![Vec::new(); k];
    for (i, &v) in order.iter().enumerate() {
        let c = if i < k { i } else { rng.random_range(0..k) };
        clusters[c].push(v);
    }
    clusters
}

/// Sparse explicit instance with integer weights in `1..=20`. Every cluster
/// induces a connected subgraph and the clusters are connected to each
/// other, so a feasible tree exists. Extra edges appear with probability
/// `density`.
pub fn random_sparse(seed: u64, n: usize, k: usize, density: f64) -> ClusteredInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clusters = random_partition(&mut rng, n, k);
    let mut w = vec![f64::INFINITY; n * n];
    let set = |w: &mut Vec<f64>, u: usize, v: usize, x: f64| {
        w[u * n + v] = x;
        w[v * n + u] = x;
    };
    for members in &clusters {
        for i in 1..members.len() {
            let j = rng.random_range(0..i);
            let x = rng.random_range(1..=20) as f64;
            set(&mut w, members[i], members[j], x);
        }
    }
    for c in 1..k {
        let other = rng.random_range(0..c);
        let u = *clusters[c].choose(&mut rng).unwrap();
        let v = *clusters[other].choose(&mut rng).unwrap();
        let x = rng.random_range(1..=20) as f64;
        set(&mut w, u, v, x);
    }
    for u in 0..n {
        for v in u + 1..n {
            if w[u * n + v].is_infinite() && rng.random::<f64>() < density {
                let x = rng.random_range(1..=20) as f64;
                set(&mut w, u, v, x);
            }
        }
        w[u * n + u] = 0.0;
    }
    let source = rng.random_range(0..n);
    let matrix = WeightMatrix::from_row_major(n, w).expect("symmetric matrix");
    ClusteredInstance::explicit(format!("sparse{n}"), matrix, clusters, source).expect("valid instance")
}

/// Complete Euclidean instance with uniform points in a 100x100 square and a
/// random partition.
pub fn random_euclidean(seed: u64, n: usize, k: usize) -> ClusteredInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..n)
        .map(|_| clustp::Point::new(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect();
    let clusters = random_partition(&mut rng, n, k);
    let source = rng.random_range(0..n);
    ClusteredInstance::euclidean(format!("euc{n}"), coords, clusters, source).expect("valid instance")
}

/// The same instance with vertex `v` renamed to `perm[v]`.
pub fn relabel(inst: &ClusteredInstance, perm: &[usize]) -> ClusteredInstance {
    let n = inst.num_vertices();
    let mut w = vec![0.0; n * n];
    for u in 0..n {
        for v in 0..n {
            w[perm[u] * n + perm[v]] = if u == v { 0.0 } else { inst.weight(u, v) };
        }
    }
    let clusters = inst.clusters().iter().map(|c| c.iter().map(|&v| perm[v]).collect()).collect();
    let matrix = WeightMatrix::from_row_major(n, w).unwrap();
    ClusteredInstance::explicit(inst.name(), matrix, clusters, perm[inst.source()]).unwrap()
}

/// Relative closeness with an absolute floor of `tol` near zero.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// True when `edges` is acyclic on `vertices` and joins them all.
fn spans(vertices: &[usize], edges: &[EdgeRef], n: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    for e in edges {
        let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    let root = find(&mut parent, vertices[0]);
    vertices.iter().all(|&v| find(&mut parent, v) == root)
}

/// Optimum by trying every `(n-1)`-subset of the finite edges. Only for
/// very small graphs.
pub fn naive_optimum(inst: &ClusteredInstance) -> Option<f64> {
    let n = inst.num_vertices();
    let all: Vec<EdgeRef> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| EdgeRef::new(u, v)))
        .filter(|e| inst.weight(e.u, e.v).is_finite())
        .collect();
    let everyone: Vec<usize> = (0..n).collect();
    let mut best: Option<f64> = None;
    let mut pick = Vec::with_capacity(n - 1);
    fn choose(
        inst: &ClusteredInstance,
        all: &[EdgeRef],
        start: usize,
        pick: &mut Vec<EdgeRef>,
        everyone: &[usize],
        best: &mut Option<f64>,
    ) {
        let n = inst.num_vertices();
        if pick.len() == n - 1 {
            if !spans(everyone, pick, n) {
                return;
            }
            for members in inst.clusters() {
                let inner: Vec<EdgeRef> =
                    pick.iter().copied().filter(|e| members.contains(&e.u) && members.contains(&e.v)).collect();
                if inner.len() + 1 != members.len() || !spans(members, &inner, n) {
                    return;
                }
            }
            let c = tree_cost_by_floyd(inst, pick);
            if best.is_none_or(|b| c < b) {
                *best = Some(c);
            }
            return;
        }
        for i in start..all.len() {
            pick.push(all[i]);
            choose(inst, all, i + 1, pick, everyone, best);
            pick.pop();
        }
    }
    if n == 1 {
        return Some(0.0);
    }
    choose(inst, &all, 0, &mut pick, &everyone, &mut best);
    best
}
