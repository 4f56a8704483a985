//! Exhaustive optimum for tiny instances.
//!
//! Walks every subset of `n - 1` graph edges by include/exclude recursion.
//! Branches that close a cycle, exceed `|V_i| - 1` edges inside a cluster, or
//! exceed `k - 1` inter-cluster edges are cut, as are branches that can no
//! longer reach those counts; every surviving leaf is a feasible tree.

use thiserror::Error;

use crate::instance::{ClusteredInstance, EdgeRef};
use crate::objective::{check_feasible, kahan_sum, SolutionTree};

/// Hard cap on vertex count.
pub const MAX_VERTICES: usize = 10;
/// Cap on the number of feasible trees (product of per-cluster spanning-tree
/// counts and the cluster-level tree count).
pub const MAX_FEASIBLE_TREES: f64 = 2.0e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {reason}")]
    InstanceTooLarge { reason: String },
    #[error("instance admits no feasible clustered spanning tree")]
    NoFeasibleTree,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub cost: f64,
    pub tree: SolutionTree,
    /// Number of feasible trees enumerated.
    pub feasible_trees: u64,
}

/// Relative tolerance under which two costs count as a tie.
const TIE_TOLERANCE: f64 = 1e-9;

struct Search<'a> {
    inst: &'a ClusteredInstance,
    edges: Vec<EdgeRef>,
    /// category of each edge: cluster id, or `k` for inter-cluster
    category: Vec<usize>,
    /// suffix[i][c]: edges of category c at positions >= i
    suffix: Vec<Vec<usize>>,
    need: Vec<usize>,
    parent: Vec<usize>,
    chosen: Vec<EdgeRef>,
    best: Option<(f64, Vec<EdgeRef>)>,
    count: u64,
}

impl Search<'_> {
    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn recurse(&mut self, i: usize) {
        if self.need.iter().all(|&c| c == 0) {
            self.leaf();
            return;
        }
        if i == self.edges.len() {
            return;
        }
        if self.need.iter().zip(&self.suffix[i]).any(|(need, avail)| need > avail) {
            return;
        }
        let e = self.edges[i];
        let cat = self.category[i];
        if self.need[cat] > 0 {
            let (ru, rv) = (self.find(e.u), self.find(e.v));
            if ru != rv {
                // no path compression, so undo is a single reset
                self.parent[ru] = rv;
                self.need[cat] -= 1;
                self.chosen.push(e);
                self.recurse(i + 1);
                self.chosen.pop();
                self.need[cat] += 1;
                self.parent[ru] = ru;
            }
        }
        self.recurse(i + 1);
    }

    fn leaf(&mut self) {
        self.count += 1;
        let tree = SolutionTree::new(self.chosen.clone());
        debug_assert!(check_feasible(&tree, self.inst).is_empty());
        let cost = kahan_sum(tree.distances_from_source(self.inst).expect("leaf is a spanning tree"));
        let replace = match &self.best {
            None => true,
            Some((best, best_edges)) => {
                let tol = TIE_TOLERANCE * best.abs().max(1.0);
                cost < best - tol || (cost <= best + tol && self.chosen < *best_edges)
            }
        };
        if replace {
            self.best = Some((cost, self.chosen.clone()));
        }
    }
}

/// Number of spanning trees of a multigraph given by its Laplacian, via
/// Gaussian elimination on the first principal minor.
fn spanning_tree_count(mut lap: Vec<Vec<f64>>) -> f64 {
    let m = lap.len();
    if m <= 1 {
        return 1.0;
    }
    lap.remove(0);
    for row in lap.iter_mut() {
        row.remove(0);
    }
    let m = m - 1;
    let mut det = 1.0;
    for col in 0..m {
        let pivot = (col..m).max_by(|&a, &b| lap[a][col].abs().total_cmp(&lap[b][col].abs())).unwrap();
        if lap[pivot][col].abs() < 1e-12 {
            return 0.0;
        }
        lap.swap(col, pivot);
        det *= lap[col][col];
        for r in (col + 1)..m {
            let factor = lap[r][col] / lap[col][col];
            for c in col..m {
                lap[r][c] -= factor * lap[col][c];
            }
        }
    }
    det.abs().round()
}

/// Feasible trees = product over clusters of spanning trees of `G[V_i]`,
/// times spanning trees of the cluster multigraph.
pub fn feasible_tree_count(inst: &ClusteredInstance) -> f64 {
    let k = inst.num_clusters();
    let mut total = 1.0;
    for members in inst.clusters() {
        let m = members.len();
        let mut lap = vec![vec![0.0; m]; m];
        for a in 0..m {
            for b in (a + 1)..m {
                if inst.has_edge(members[a], members[b]) {
                    lap[a][b] -= 1.0;
                    lap[b][a] -= 1.0;
                    lap[a][a] += 1.0;
                    lap[b][b] += 1.0;
                }
            }
        }
        total *= spanning_tree_count(lap);
    }
    let mut lap = vec![vec![0.0; k]; k];
    for e in inst.edges() {
        let (a, b) = (inst.cluster_index(e.u), inst.cluster_index(e.v));
        if a != b {
            lap[a][b] -= 1.0;
            lap[b][a] -= 1.0;
            lap[a][a] += 1.0;
            lap[b][b] += 1.0;
        }
    }
    total * spanning_tree_count(lap)
}

/// Exact optimum; ties go to the lexicographically smallest sorted edge list.
pub fn brute_force_optimum(inst: &ClusteredInstance) -> Result<OracleSolution, OracleError> {
    let n = inst.num_vertices();
    if n > MAX_VERTICES {
        return Err(OracleError::InstanceTooLarge {
            reason: format!("{n} vertices exceeds the cap of {MAX_VERTICES}"),
        });
    }
    let trees = feasible_tree_count(inst);
    if trees > MAX_FEASIBLE_TREES {
        return Err(OracleError::InstanceTooLarge {
            reason: format!("{trees:.0} feasible trees exceeds the cap of {MAX_FEASIBLE_TREES:.0}"),
        });
    }
    if trees == 0.0 {
        return Err(OracleError::NoFeasibleTree);
    }

    let k = inst.num_clusters();
    let edges = inst.edges();
    let category: Vec<usize> = edges
        .iter()
        .map(|e| {
            let (a, b) = (inst.cluster_index(e.u), inst.cluster_index(e.v));
            if a == b {
                a
            } else {
                k
            }
        })
        .collect();
    let mut suffix = vec![vec![0usize; k + 1]; edges.len() + 1];
    for i in (0..edges.len()).rev() {
        suffix[i] = suffix[i + 1].clone();
        suffix[i][category[i]] += 1;
    }
    let mut need: Vec<usize> = inst.clusters().iter().map(|c| c.len() - 1).collect();
    need.push(k - 1);

    let mut search = Search {
        inst,
        edges,
        category,
        suffix,
        need,
        parent: (0..n).collect(),
        chosen: Vec::with_capacity(n.saturating_sub(1)),
        best: None,
        count: 0,
    };
    search.recurse(0);
    let (cost, edges) = search.best.ok_or(OracleError::NoFeasibleTree)?;
    Ok(OracleSolution { cost, tree: SolutionTree::new(edges), feasible_trees: search.count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Point, WeightMatrix};
    use crate::objective::total_cost;

    fn square() -> ClusteredInstance {
        let coords = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0)];
        ClusteredInstance::euclidean("sq", coords, vec![vec![0, 1], vec![2, 3]], 0).unwrap()
    }

    #[test]
    fn unit_square_two_clusters() {
        let inst = square();
        let sol = brute_force_optimum(&inst).unwrap();
        // One internal edge per cluster, one of the four cross edges: 4 trees.
        assert_eq!(sol.feasible_trees, 4);
        assert_eq!(feasible_tree_count(&inst), 4.0);
        // Frozen from the enumeration: 0-1, 2-3, 0-2 gives 0 + 1 + 1 + 2.
        assert_eq!(sol.cost, 4.0);
        assert_eq!(sol.tree.edges(), &[EdgeRef::new(0, 1), EdgeRef::new(0, 2), EdgeRef::new(2, 3)]);
        assert!(check_feasible(&sol.tree, &inst).is_empty());
        assert_eq!(total_cost(&sol.tree, &inst).unwrap(), sol.cost);
    }

    #[test]
    fn two_vertices_two_clusters() {
        let coords = vec![Point::new(0.0, 0.0), Point::new(2.0, 0.0)];
        let inst = ClusteredInstance::euclidean("two", coords, vec![vec![0], vec![1]], 0).unwrap();
        let sol = brute_force_optimum(&inst).unwrap();
        assert_eq!(sol.cost, 2.0);
        assert_eq!(sol.feasible_trees, 1);
    }

    #[test]
    fn cayley_count() {
        let coords: Vec<Point> = (0..5).map(|i| Point::new(i as f64, (i * i) as f64)).collect();
        let inst = ClusteredInstance::euclidean("k5", coords, vec![(0..5).collect()], 0).unwrap();
        assert_eq!(feasible_tree_count(&inst), 125.0);
        assert_eq!(brute_force_optimum(&inst).unwrap().feasible_trees, 125);
    }

    #[test]
    fn caps_and_infeasible() {
        let coords: Vec<Point> = (0..11).map(|i| Point::new(i as f64, 0.0)).collect();
        let inst = ClusteredInstance::euclidean("big", coords, vec![(0..11).collect()], 0).unwrap();
        assert!(matches!(brute_force_optimum(&inst), Err(OracleError::InstanceTooLarge { .. })));

        let coords: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 0.0)).collect();
        let inst = ClusteredInstance::euclidean("k10", coords, vec![(0..10).collect()], 0).unwrap();
        assert!(matches!(brute_force_optimum(&inst), Err(OracleError::InstanceTooLarge { .. })));

        let m = WeightMatrix::from_upper_triangle(3, &[1.0, f64::INFINITY, f64::INFINITY]).unwrap();
        let inst = ClusteredInstance::explicit("t", m, vec![vec![0, 1], vec![2]], 0).unwrap();
        assert_eq!(brute_force_optimum(&inst), Err(OracleError::NoFeasibleTree));
    }
}
