//! Feasibility and objective evaluation for clustered spanning trees.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::instance::{ClusteredInstance, EdgeRef};

/// A candidate solution: an edge list over the instance's vertices.
///
/// Local roots and inter-cluster edges are derived from the edges, so a tree
/// parsed from disk and one built by the solver behave identically.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTree {
    edges: Vec<EdgeRef>,
}

impl SolutionTree {
    pub fn new(edges: Vec<EdgeRef>) -> Self {
        SolutionTree { edges }
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    pub fn into_edges(self) -> Vec<EdgeRef> {
        self.edges
    }

    /// Edges as canonical pairs, sorted.
    pub fn canonical_edges(&self) -> Vec<EdgeRef> {
        let mut out: Vec<EdgeRef> = self.edges.iter().map(|e| e.canonical()).collect();
        out.sort_unstable();
        out
    }

    pub fn inter_cluster_edges(&self, inst: &ClusteredInstance) -> Vec<EdgeRef> {
        self.edges
            .iter()
            .copied()
            .filter(|e| inst.cluster_index(e.u) != inst.cluster_index(e.v))
            .collect()
    }

    /// First vertex of each cluster met on tree paths from the source.
    /// `None` if the tree does not reach every vertex.
    pub fn local_roots(&self, inst: &ClusteredInstance) -> Option<Vec<usize>> {
        let (order, _) = bfs_from_source(&self.edges, inst)?;
        let mut roots = vec![usize::MAX; inst.num_clusters()];
        for v in order {
            let c = inst.cluster_index(v);
            if roots[c] == usize::MAX {
                roots[c] = v;
            }
        }
        Some(roots)
    }

    /// Tree distances `d_T(s, v)` for every vertex, or `None` when the edges
    /// do not form a spanning tree with finite weights.
    pub fn distances_from_source(&self, inst: &ClusteredInstance) -> Option<Vec<f64>> {
        bfs_from_source(&self.edges, inst).map(|(_, d)| d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Some vertex is not connected to the rest (or the edge count is short).
    NotSpanning { components: usize },
    /// `edge` closes a cycle with earlier edges.
    HasCycle { edge: EdgeRef },
    /// Tree edges inside cluster `cluster` do not connect its members.
    ClusterDisconnected { cluster: usize },
    /// Self-loop, out-of-range endpoint or missing edge in the graph.
    EdgeNotInGraph { edge: EdgeRef },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotSpanning { components } => {
                write!(f, "not spanning: {components} components")
            }
            Violation::HasCycle { edge } => write!(f, "cycle closed by edge ({}, {})", edge.u + 1, edge.v + 1),
            Violation::ClusterDisconnected { cluster } => {
                write!(f, "cluster {} is disconnected in the tree", cluster + 1)
            }
            Violation::EdgeNotInGraph { edge } => {
                write!(f, "edge ({}, {}) is not in the graph", edge.u + 1, edge.v + 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("tree is infeasible ({} violations)", .0.len())]
    InfeasibleTree(Vec<Violation>),
}

struct DisjointSets {
    parent: Vec<usize>,
    sets: usize,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), sets: n }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.sets -= 1;
        true
    }
}

/// Lists every violation of the clustered spanning-tree constraints.
pub fn check_feasible(tree: &SolutionTree, inst: &ClusteredInstance) -> Vec<Violation> {
    let n = inst.num_vertices();
    let mut violations = Vec::new();
    let mut global = DisjointSets::new(n);
    let mut local = DisjointSets::new(n);
    for &edge in tree.edges() {
        if edge.u >= n || edge.v >= n || !inst.has_edge(edge.u, edge.v) {
            violations.push(Violation::EdgeNotInGraph { edge });
            continue;
        }
        if !global.union(edge.u, edge.v) {
            violations.push(Violation::HasCycle { edge });
        }
        if inst.cluster_index(edge.u) == inst.cluster_index(edge.v) {
            local.union(edge.u, edge.v);
        }
    }
    if global.sets > 1 {
        violations.push(Violation::NotSpanning { components: global.sets });
    }
    for (cluster, members) in inst.clusters().iter().enumerate() {
        let head = local.find(members[0]);
        if members[1..].iter().any(|&v| local.find(v) != head) {
            violations.push(Violation::ClusterDisconnected { cluster });
        }
    }
    violations
}

/// Objective value `sum_v d_T(s, v)` of a feasible tree.
pub fn total_cost(tree: &SolutionTree, inst: &ClusteredInstance) -> Result<f64, CostError> {
    let violations = check_feasible(tree, inst);
    if !violations.is_empty() {
        return Err(CostError::InfeasibleTree(violations));
    }
    let dist = tree
        .distances_from_source(inst)
        .expect("feasible tree reaches every vertex");
    Ok(kahan_sum(dist))
}

/// BFS over the tree from the source. Returns visit order and distances, or
/// `None` unless the edges form a spanning tree (n-1 valid edges, connected).
fn bfs_from_source(edges: &[EdgeRef], inst: &ClusteredInstance) -> Option<(Vec<usize>, Vec<f64>)> {
    let n = inst.num_vertices();
    if edges.len() + 1 != n {
        return None;
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for e in edges {
        if e.u >= n || e.v >= n || !inst.has_edge(e.u, e.v) {
            return None;
        }
        let w = inst.weight(e.u, e.v);
        adj[e.u].push((e.v, w));
        adj[e.v].push((e.u, w));
    }
    let mut dist = vec![f64::NAN; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    let s = inst.source();
    dist[s] = 0.0;
    queue.push_back(s);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &(y, w) in &adj[x] {
            if dist[y].is_nan() {
                dist[y] = dist[x] + w;
                queue.push_back(y);
            }
        }
    }
    (order.len() == n).then_some((order, dist))
}

/// Compensated summation.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in values {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
