//! Randomized-greedy construction of clustered shortest-path trees.
//!
//! The root cluster gets a Dijkstra tree from the source. Then, while some
//! cluster is unattached, every unattached cluster is scored against the
//! current cluster: one edge is drawn with probability proportional to
//! `f(u, v)^-gamma`, where
//!
//! ```text
//! f(u, v) = h * (d[u] + w(u, v)) + costSPT(v)
//! ```
//!
//! `d[u]` is the tree distance from the current cluster's local root to `u`,
//! `costSPT(v)` the total shortest-path distance from `v` inside its cluster,
//! and `h` is drawn uniformly from `|V_i| ..= sum of unattached cluster sizes`.
//! The drawn edge replaces the cluster's tentative attachment only when it
//! strictly shortens the source-to-local-root distance. The unattached
//! cluster with the smallest tentative distance is attached next and receives
//! its own Dijkstra tree rooted at the attachment endpoint.
//!
//! Larger `gamma` is greedier; `gamma = 0` picks uniformly.

use rand::{Rng as _, RngCore};
use thiserror::Error;

use crate::instance::{ClusteredInstance, EdgeRef};
use crate::objective::SolutionTree;
use crate::rng::TrialRng;
use crate::spt::{dijkstra_spt, CostSptTable, ShortestPathTree, SptError};

/// Stand-in for a zero reward so that `f^-gamma` stays finite.
pub const MIN_REWARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NrgaError {
    #[error("gamma must be finite and nonnegative, got {0}")]
    InvalidGamma(f64),
    #[error("no candidate edges to choose from")]
    EmptyCandidateSet,
    #[error("reward {reward} of edge ({}, {}) is not positive", .edge.u, .edge.v)]
    NonpositiveReward { edge: EdgeRef, reward: f64 },
    #[error("edge ({u}, {v}) has infinite weight")]
    InfiniteWeight { u: usize, v: usize },
    #[error("vertex {vertex} is not in the current cluster's tree")]
    NotInCurrentTree { vertex: usize },
    #[error("clusters {clusters:?} cannot be reached from the attached part of the tree")]
    DisconnectedClusters { clusters: Vec<usize> },
    #[error("selector returned index {index} for {len} candidates")]
    BadSelection { index: usize, len: usize },
    #[error(transparent)]
    Spt(#[from] SptError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NrgaParams {
    pub gamma: f64,
    pub seed: u64,
}

impl NrgaParams {
    pub fn new(gamma: f64, seed: u64) -> Result<Self, NrgaError> {
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(NrgaError::InvalidGamma(gamma));
        }
        Ok(NrgaParams { gamma, seed })
    }
}

/// A scored inter-cluster edge: `u` is attached, `v` lies in the target cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCandidate {
    pub edge: EdgeRef,
    pub reward: f64,
}

/// Context handed to an [`EdgeSelector`] for one (current, target) pair.
#[derive(Debug, Clone, Copy)]
pub struct SelectionStep {
    pub current: usize,
    pub target: usize,
    pub h: u64,
}

/// Picks one candidate per (current, target) cluster pair.
pub trait EdgeSelector {
    fn select(
        &mut self,
        step: &SelectionStep,
        candidates: &[EdgeCandidate],
        rng: &mut dyn RngCore,
    ) -> Result<usize, NrgaError>;
}

/// Sampling with probability proportional to `reward^-gamma`.
#[derive(Debug, Clone, Copy)]
pub struct RandomizedGreedy {
    pub gamma: f64,
}

impl EdgeSelector for RandomizedGreedy {
    fn select(
        &mut self,
        _step: &SelectionStep,
        candidates: &[EdgeCandidate],
        rng: &mut dyn RngCore,
    ) -> Result<usize, NrgaError> {
        select_index(candidates, self.gamma, rng)
    }
}

/// Deterministic argmin-reward selection (first index on ties); the
/// `gamma -> infinity` limit of [`RandomizedGreedy`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Greedy;

impl EdgeSelector for Greedy {
    fn select(
        &mut self,
        _step: &SelectionStep,
        candidates: &[EdgeCandidate],
        _rng: &mut dyn RngCore,
    ) -> Result<usize, NrgaError> {
        validate(candidates)?;
        let mut best = 0;
        for (i, c) in candidates.iter().enumerate().skip(1) {
            if c.reward < candidates[best].reward {
                best = i;
            }
        }
        Ok(best)
    }
}

fn validate(candidates: &[EdgeCandidate]) -> Result<(), NrgaError> {
    if candidates.is_empty() {
        return Err(NrgaError::EmptyCandidateSet);
    }
    for c in candidates {
        if !(c.reward > 0.0) || !c.reward.is_finite() {
            return Err(NrgaError::NonpositiveReward { edge: c.edge, reward: c.reward });
        }
    }
    Ok(())
}

/// Unnormalized weights `exp(-gamma * (ln f - ln f_min))`; the minimum gets 1.
fn relative_weights(candidates: &[EdgeCandidate], gamma: f64) -> Vec<f64> {
    let log_min = candidates
        .iter()
        .map(|c| c.reward.ln())
        .fold(f64::INFINITY, f64::min);
    candidates
        .iter()
        .map(|c| {
            let gap = c.reward.ln() - log_min;
            if gap == 0.0 {
                1.0
            } else {
                (-gamma * gap).exp()
            }
        })
        .collect()
}

/// Selection probabilities `f^-gamma / sum f'^-gamma`, computed in log space.
pub fn selection_probabilities(candidates: &[EdgeCandidate], gamma: f64) -> Result<Vec<f64>, NrgaError> {
    validate(candidates)?;
    let weights = relative_weights(candidates, gamma);
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

fn select_index(candidates: &[EdgeCandidate], gamma: f64, rng: &mut dyn RngCore) -> Result<usize, NrgaError> {
    validate(candidates)?;
    let weights = relative_weights(candidates, gamma);
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if target < acc {
            return Ok(i);
        }
    }
    Ok(last_positive)
}

/// Samples one candidate edge with probability proportional to `reward^-gamma`.
/// Consumes exactly one uniform draw.
pub fn select_edge(candidates: &[EdgeCandidate], gamma: f64, rng: &mut dyn RngCore) -> Result<EdgeRef, NrgaError> {
    select_index(candidates, gamma, rng).map(|i| candidates[i].edge)
}

/// Uniform integer in `target_size ..= remaining_size`.
pub fn draw_h(rng: &mut dyn RngCore, target_size: usize, remaining_size: usize) -> u64 {
    assert!(
        1 <= target_size && target_size <= remaining_size,
        "h range {target_size}..={remaining_size} is empty"
    );
    rng.random_range(target_size as u64..=remaining_size as u64)
}

/// `h * (d[u] + w(u, v)) + costSPT(v)`, with `d[u]` read from the current
/// cluster's tree.
pub fn reward(
    inst: &ClusteredInstance,
    spt_cur: &ShortestPathTree,
    h: u64,
    u: usize,
    v: usize,
    costs: &mut CostSptTable,
) -> Result<f64, NrgaError> {
    let d = spt_cur.dist(u).ok_or(NrgaError::NotInCurrentTree { vertex: u })?;
    let w = inst.weight(u, v);
    if !w.is_finite() {
        return Err(NrgaError::InfiniteWeight { u, v });
    }
    Ok(reward_value(h, d, w, costs.get(inst, v)?))
}

#[inline]
fn reward_value(h: u64, path: f64, w: f64, cost_spt: f64) -> f64 {
    h as f64 * (path + w) + cost_spt
}

/// Per-run record of the attachment process.
#[derive(Debug, Clone, PartialEq)]
pub struct NrgaOutcome {
    pub tree: SolutionTree,
    /// Clusters in attachment order; starts with the root cluster.
    pub attach_order: Vec<usize>,
    /// `dis[i]` when cluster `i` was attached.
    pub dis: Vec<f64>,
    /// Local root of each cluster.
    pub local_roots: Vec<usize>,
    /// `attach_edge[i]` links cluster `i` to the tree; `None` for the root cluster.
    pub attach_edge: Vec<Option<EdgeRef>>,
}

/// Solver bound to one instance. Precomputed costSPT values are shared
/// read-only by every run.
#[derive(Debug, Clone)]
pub struct Nrga<'a> {
    inst: &'a ClusteredInstance,
    costs: CostSptTable,
    rescan_all: bool,
}

impl<'a> Nrga<'a> {
    pub fn new(inst: &'a ClusteredInstance) -> Result<Self, NrgaError> {
        Ok(Nrga { inst, costs: CostSptTable::for_instance(inst)?, rescan_all: false })
    }

    /// Experimental: score edges from every attached cluster on each
    /// iteration instead of only the current one. The path term then uses
    /// the full source distance `dis[c(u)] + d[u]`.
    pub fn rescan_all(mut self, on: bool) -> Self {
        self.rescan_all = on;
        self
    }

    pub fn instance(&self) -> &'a ClusteredInstance {
        self.inst
    }

    pub fn run(&self, params: &NrgaParams) -> Result<SolutionTree, NrgaError> {
        let mut selector = RandomizedGreedy { gamma: params.gamma };
        let mut rng = TrialRng::new(params.seed);
        self.run_with(&mut selector, &mut rng).map(|o| o.tree)
    }

    pub fn run_with<S: EdgeSelector + ?Sized>(
        &self,
        selector: &mut S,
        rng: &mut TrialRng,
    ) -> Result<NrgaOutcome, NrgaError> {
        let inst = self.inst;
        let n = inst.num_vertices();
        let k = inst.num_clusters();
        let mut costs = self.costs.clone();

        let mut unattached = vec![true; k];
        let mut dis = vec![f64::INFINITY; k];
        let mut local_root = vec![usize::MAX; k];
        let mut temp_edge: Vec<Option<EdgeRef>> = vec![None; k];
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        let mut attach_order = Vec::with_capacity(k);
        // d[u] within u's own cluster, for attached vertices
        let mut local_dist = vec![f64::NAN; n];

        let mut cur = inst.root_cluster();
        let mut spt_cur = dijkstra_spt(inst, inst.cluster(cur), inst.source())?;
        dis[cur] = 0.0;
        local_root[cur] = inst.source();
        unattached[cur] = false;
        attach_order.push(cur);
        absorb(&spt_cur, &mut edges, &mut local_dist);
        let mut remaining_size = n - inst.cluster(cur).len();

        let mut candidates: Vec<EdgeCandidate> = Vec::new();
        let mut via: Vec<f64> = Vec::new();
        while attach_order.len() < k {
            for target in 0..k {
                if !unattached[target] {
                    continue;
                }
                let members = inst.cluster(target);
                let h = draw_h(&mut rng.h, members.len(), remaining_size);
                candidates.clear();
                via.clear();
                let sources: &[usize] = if self.rescan_all { &attach_order } else { std::slice::from_ref(&cur) };
                for &from in sources {
                    for &u in inst.cluster(from) {
                        let d = local_dist[u];
                        let path = if self.rescan_all { dis[from] + d } else { d };
                        for &v in members {
                            let w = inst.weight(u, v);
                            if !w.is_finite() {
                                continue;
                            }
                            let f = reward_value(h, path, w, costs.get(inst, v)?);
                            candidates.push(EdgeCandidate {
                                edge: EdgeRef::new(u, v),
                                reward: if f > 0.0 { f } else { MIN_REWARD },
                            });
                            via.push(dis[from] + d + w);
                        }
                    }
                }
                if candidates.is_empty() {
                    continue;
                }
                let step = SelectionStep { current: cur, target, h };
                let pick = selector.select(&step, &candidates, &mut rng.selection)?;
                if pick >= candidates.len() {
                    return Err(NrgaError::BadSelection { index: pick, len: candidates.len() });
                }
                if via[pick] < dis[target] {
                    let edge = candidates[pick].edge;
                    dis[target] = via[pick];
                    local_root[target] = edge.v;
                    temp_edge[target] = Some(edge);
                }
            }

            let mut next = None;
            for i in 0..k {
                if unattached[i] && next.is_none_or(|j: usize| dis[i] < dis[j]) {
                    next = Some(i);
                }
            }
            let next = next.expect("loop runs only while clusters remain");
            if !dis[next].is_finite() {
                let clusters = (0..k).filter(|&i| unattached[i]).collect();
                return Err(NrgaError::DisconnectedClusters { clusters });
            }
            cur = next;
            edges.push(temp_edge[cur].expect("finite dis implies an attachment edge"));
            spt_cur = dijkstra_spt(inst, inst.cluster(cur), local_root[cur])?;
            absorb(&spt_cur, &mut edges, &mut local_dist);
            unattached[cur] = false;
            attach_order.push(cur);
            remaining_size -= inst.cluster(cur).len();
        }

        Ok(NrgaOutcome {
            tree: SolutionTree::new(edges),
            attach_order,
            dis,
            local_roots: local_root,
            attach_edge: temp_edge,
        })
    }
}

fn absorb(spt: &ShortestPathTree, edges: &mut Vec<EdgeRef>, local_dist: &mut [f64]) {
    edges.extend(spt.edges());
    for (v, d) in spt.distances() {
        local_dist[v] = d;
    }
}

/// One randomized-greedy run on `inst`.
pub fn nrga_run(inst: &ClusteredInstance, params: &NrgaParams) -> Result<SolutionTree, NrgaError> {
    Nrga::new(inst)?.run(params)
}
