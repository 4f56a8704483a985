//! Clustered graph instances.
//!
//! A [`ClusteredInstance`] is an undirected weighted graph whose vertex set is
//! partitioned into clusters, together with a distinguished source vertex.
//! Euclidean instances are complete graphs; explicit instances carry a
//! symmetric weight matrix in which `f64::INFINITY` marks a missing edge.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("instance has no clusters")]
    NoClusters,
    #[error("vertex {vertex} appears in more than one cluster")]
    OverlappingClusters { vertex: usize },
    #[error("vertex {vertex} is not covered by any cluster")]
    UncoveredVertex { vertex: usize },
    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },
    #[error("source vertex {vertex} is out of range for {n} vertices")]
    SourceOutOfRange { vertex: usize, n: usize },
    #[error("weight matrix is not symmetric at ({u}, {v})")]
    AsymmetricMatrix { u: usize, v: usize },
    #[error("negative or undefined weight at ({u}, {v})")]
    NegativeWeight { u: usize, v: usize },
    #[error("nonzero diagonal entry at vertex {vertex}")]
    NonzeroDiagonal { vertex: usize },
    #[error("weight matrix has {len} entries, expected {expected}")]
    MatrixShape { len: usize, expected: usize },
    #[error("coordinate of vertex {vertex} is not finite")]
    NonFiniteCoordinate { vertex: usize },
    #[error("vertex {vertex} is out of range for {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("edge endpoints coincide at vertex {vertex}")]
    SameVertex { vertex: usize },
}

/// A point in the plane, in instance units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Dense symmetric weight matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    n: usize,
    data: Vec<f64>,
}

impl WeightMatrix {
    /// Builds a matrix from row-major data. Validation of symmetry and sign
    /// happens in [`ClusteredInstance::explicit`].
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self, InstanceError> {
        if data.len() != n * n {
            return Err(InstanceError::MatrixShape { len: data.len(), expected: n * n });
        }
        Ok(WeightMatrix { n, data })
    }

    /// Builds a symmetric matrix from the strict upper triangle, listed row by
    /// row: `w(0,1), w(0,2), ..., w(0,n-1), w(1,2), ...`.
    pub fn from_upper_triangle(n: usize, upper: &[f64]) -> Result<Self, InstanceError> {
        let expected = n * n.saturating_sub(1) / 2;
        if upper.len() != expected {
            return Err(InstanceError::MatrixShape { len: upper.len(), expected });
        }
        let mut data = vec![0.0; n * n];
        let mut it = upper.iter();
        for u in 0..n {
            for v in (u + 1)..n {
                let w = *it.next().expect("length checked above");
                data[u * n + v] = w;
                data[v * n + u] = w;
            }
        }
        Ok(WeightMatrix { n, data })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    Euclidean2D,
    Explicit,
}

#[derive(Debug, Clone, PartialEq)]
enum Weights {
    Euclidean(Vec<Point>),
    Explicit(WeightMatrix),
}

/// An undirected edge. Orientation is kept (NRGA emits `(parent, child)`),
/// but weight lookup and equality via [`EdgeRef::canonical`] ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeRef {
    pub u: usize,
    pub v: usize,
}

impl EdgeRef {
    pub fn new(u: usize, v: usize) -> Self {
        EdgeRef { u, v }
    }

    /// The same edge with `u <= v`.
    pub fn canonical(self) -> Self {
        if self.u <= self.v {
            self
        } else {
            EdgeRef { u: self.v, v: self.u }
        }
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }
}

/// Validated clustered instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredInstance {
    name: String,
    weights: Weights,
    clusters: Vec<Vec<usize>>,
    source: usize,
    membership: Vec<usize>,
}

impl ClusteredInstance {
    /// Complete Euclidean instance over `coords`.
    pub fn euclidean(
        name: impl Into<String>,
        coords: Vec<Point>,
        clusters: Vec<Vec<usize>>,
        source: usize,
    ) -> Result<Self, InstanceError> {
        for (vertex, p) in coords.iter().enumerate() {
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(InstanceError::NonFiniteCoordinate { vertex });
            }
        }
        Self::build(name.into(), Weights::Euclidean(coords), clusters, source)
    }

    /// Instance over an explicit symmetric weight matrix; infinite entries are
    /// missing edges.
    pub fn explicit(
        name: impl Into<String>,
        matrix: WeightMatrix,
        clusters: Vec<Vec<usize>>,
        source: usize,
    ) -> Result<Self, InstanceError> {
        let n = matrix.dimension();
        for u in 0..n {
            if matrix.get(u, u) != 0.0 {
                return Err(InstanceError::NonzeroDiagonal { vertex: u });
            }
            for v in (u + 1)..n {
                let a = matrix.get(u, v);
                let b = matrix.get(v, u);
                // NaN fails this comparison too.
                if !(a >= 0.0) || !(b >= 0.0) {
                    return Err(InstanceError::NegativeWeight { u, v });
                }
                if a != b {
                    return Err(InstanceError::AsymmetricMatrix { u, v });
                }
            }
        }
        Self::build(name.into(), Weights::Explicit(matrix), clusters, source)
    }

    fn build(
        name: String,
        weights: Weights,
        mut clusters: Vec<Vec<usize>>,
        source: usize,
    ) -> Result<Self, InstanceError> {
        let n = match &weights {
            Weights::Euclidean(c) => c.len(),
            Weights::Explicit(m) => m.dimension(),
        };
        if clusters.is_empty() {
            return Err(InstanceError::NoClusters);
        }
        let mut membership = vec![usize::MAX; n];
        for (cluster, members) in clusters.iter_mut().enumerate() {
            if members.is_empty() {
                return Err(InstanceError::EmptyCluster { cluster });
            }
            for &vertex in members.iter() {
                if vertex >= n {
                    return Err(InstanceError::OutOfRange { vertex, n });
                }
                if membership[vertex] != usize::MAX {
                    return Err(InstanceError::OverlappingClusters { vertex });
                }
                membership[vertex] = cluster;
            }
            members.sort_unstable();
        }
        if let Some(vertex) = membership.iter().position(|&c| c == usize::MAX) {
            return Err(InstanceError::UncoveredVertex { vertex });
        }
        if source >= n {
            return Err(InstanceError::SourceOutOfRange { vertex: source, n });
        }
        Ok(ClusteredInstance { name, weights, clusters, source, membership })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_vertices(&self) -> usize {
        self.membership.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Clusters with members sorted ascending.
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster(&self, i: usize) -> &[usize] {
        &self.clusters[i]
    }

    /// The cluster containing the source.
    pub fn root_cluster(&self) -> usize {
        self.membership[self.source]
    }

    pub fn weight_kind(&self) -> WeightKind {
        match self.weights {
            Weights::Euclidean(_) => WeightKind::Euclidean2D,
            Weights::Explicit(_) => WeightKind::Explicit,
        }
    }

    pub fn coords(&self) -> Option<&[Point]> {
        match &self.weights {
            Weights::Euclidean(c) => Some(c),
            Weights::Explicit(_) => None,
        }
    }

    pub fn explicit_weights(&self) -> Option<&WeightMatrix> {
        match &self.weights {
            Weights::Euclidean(_) => None,
            Weights::Explicit(m) => Some(m),
        }
    }

    pub fn cluster_of(&self, v: usize) -> Result<usize, InstanceError> {
        self.membership
            .get(v)
            .copied()
            .ok_or(InstanceError::OutOfRange { vertex: v, n: self.num_vertices() })
    }

    /// Unchecked variant of [`cluster_of`](Self::cluster_of); panics when out of range.
    #[inline]
    pub fn cluster_index(&self, v: usize) -> usize {
        self.membership[v]
    }

    /// Weight of edge `(u, v)`; `INFINITY` when the edge is absent.
    pub fn edge_weight(&self, u: usize, v: usize) -> Result<f64, InstanceError> {
        let n = self.num_vertices();
        for vertex in [u, v] {
            if vertex >= n {
                return Err(InstanceError::OutOfRange { vertex, n });
            }
        }
        if u == v {
            return Err(InstanceError::SameVertex { vertex: u });
        }
        Ok(self.weight(u, v))
    }

    /// Unchecked weight lookup for hot loops. `weight(v, v) == 0`.
    #[inline]
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        match &self.weights {
            Weights::Euclidean(c) => c[u].distance(&c[v]),
            Weights::Explicit(m) => m.get(u, v),
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.weight(u, v).is_finite()
    }

    /// All finite edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<EdgeRef> {
        let n = self.num_vertices();
        let mut out = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if self.has_edge(u, v) {
                    out.push(EdgeRef::new(u, v));
                }
            }
        }
        out
    }
}
