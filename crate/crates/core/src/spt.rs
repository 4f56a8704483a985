//! Shortest-path trees inside a vertex subset.
//!
//! Dijkstra is run on the subgraph induced by a member set. Extraction order
//! breaks equal keys by the smaller vertex id and a parent is only replaced on
//! strict improvement, so the resulting parent map is fully deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::instance::{ClusteredInstance, EdgeRef};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SptError {
    #[error("root {root} is not a member of the vertex set")]
    RootNotMember { root: usize },
    #[error("vertex {vertex} is unreachable from the root inside the induced subgraph")]
    DisconnectedInducedSubgraph { vertex: usize },
    #[error("vertex {vertex} listed twice in the member set")]
    DuplicateMember { vertex: usize },
    #[error("vertex {vertex} is out of range")]
    OutOfRange { vertex: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPathTree {
    root: usize,
    members: Vec<usize>,
    parent: Vec<Option<usize>>,
    dist: Vec<f64>,
}

impl ShortestPathTree {
    pub fn root(&self) -> usize {
        self.root
    }

    /// Members sorted ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    fn slot(&self, v: usize) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.slot(v).is_some()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.slot(v).and_then(|i| self.parent[i])
    }

    /// Tree distance from the root, `None` for non-members.
    pub fn dist(&self, v: usize) -> Option<f64> {
        self.slot(v).map(|i| self.dist[i])
    }

    /// `(vertex, distance)` pairs in member order.
    pub fn distances(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.members.iter().copied().zip(self.dist.iter().copied())
    }

    /// Tree edges oriented `(parent, child)`, in member order of the child.
    pub fn edges(&self) -> impl Iterator<Item = EdgeRef> + '_ {
        self.members
            .iter()
            .zip(&self.parent)
            .filter_map(|(&v, p)| p.map(|p| EdgeRef::new(p, v)))
    }

    /// Sum of root-to-member distances (the cluster's costSPT for this root).
    pub fn total_distance(&self) -> f64 {
        crate::objective::kahan_sum(self.dist.iter().copied())
    }
}

#[derive(Clone, Copy, PartialEq)]
struct HeapEntry {
    dist: f64,
    slot: usize,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for a min-heap
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `root` over `G[members]`.
pub fn dijkstra_spt(
    inst: &ClusteredInstance,
    members: &[usize],
    root: usize,
) -> Result<ShortestPathTree, SptError> {
    let mut sorted = members.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(SptError::DuplicateMember { vertex: w[0] });
        }
    }
    if let Some(&last) = sorted.last() {
        if last >= inst.num_vertices() {
            return Err(SptError::OutOfRange { vertex: last });
        }
    }
    let root_slot = sorted.binary_search(&root).map_err(|_| SptError::RootNotMember { root })?;

    let m = sorted.len();
    let mut dist = vec![f64::INFINITY; m];
    let mut parent: Vec<Option<usize>> = vec![None; m];
    let mut settled = vec![false; m];
    let mut heap = BinaryHeap::with_capacity(m);
    dist[root_slot] = 0.0;
    heap.push(HeapEntry { dist: 0.0, slot: root_slot, vertex: root });

    while let Some(HeapEntry { dist: d, slot, vertex }) = heap.pop() {
        if settled[slot] {
            continue;
        }
        settled[slot] = true;
        for (next, &other) in sorted.iter().enumerate() {
            if settled[next] || other == vertex {
                continue;
            }
            let w = inst.weight(vertex, other);
            if !w.is_finite() {
                continue;
            }
            let nd = d + w;
            if nd < dist[next] {
                dist[next] = nd;
                parent[next] = Some(vertex);
                heap.push(HeapEntry { dist: nd, slot: next, vertex: other });
            }
        }
    }

    if let Some(i) = settled.iter().position(|s| !s) {
        return Err(SptError::DisconnectedInducedSubgraph { vertex: sorted[i] });
    }
    Ok(ShortestPathTree { root, members: sorted, parent, dist })
}

/// Sum of shortest-path distances from `v` to every other vertex of `members`.
pub fn cost_spt(inst: &ClusteredInstance, members: &[usize], v: usize) -> Result<f64, SptError> {
    Ok(dijkstra_spt(inst, members, v)?.total_distance())
}

/// Above this value of `sum |V_i|^2`, costSPT values are filled lazily.
pub const PRECOMPUTE_LIMIT: usize = 10_000_000;

/// Per-vertex costSPT values within each vertex's own cluster.
///
/// Either fully precomputed (shared read-only between trials) or memoized
/// lazily; cloning gives a trial its own copy to fill.
#[derive(Debug, Clone)]
pub struct CostSptTable {
    values: Vec<f64>,
}

impl CostSptTable {
    /// An empty memo table.
    pub fn lazy(inst: &ClusteredInstance) -> Self {
        CostSptTable { values: vec![f64::NAN; inst.num_vertices()] }
    }

    /// Precomputes every vertex outside the root cluster when cheap enough,
    /// otherwise returns an empty memo table.
    pub fn for_instance(inst: &ClusteredInstance) -> Result<Self, SptError> {
        let work: usize = inst.clusters().iter().map(|c| c.len() * c.len()).sum();
        let mut table = Self::lazy(inst);
        if work <= PRECOMPUTE_LIMIT {
            let root_cluster = inst.root_cluster();
            for (i, members) in inst.clusters().iter().enumerate() {
                if i == root_cluster {
                    continue;
                }
                for &v in members {
                    table.values[v] = cost_spt(inst, members, v)?;
                }
            }
        }
        Ok(table)
    }

    pub fn get(&mut self, inst: &ClusteredInstance, v: usize) -> Result<f64, SptError> {
        let cached = self.values[v];
        if !cached.is_nan() {
            return Ok(cached);
        }
        let members = inst.cluster(inst.cluster_index(v));
        let value = cost_spt(inst, members, v)?;
        self.values[v] = value;
        Ok(value)
    }
}
