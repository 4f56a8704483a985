//! Clustered shortest-path tree (CluSTP) toolkit.
//!
//! Given a graph whose vertices are partitioned into clusters and a source
//! vertex, find a spanning tree in which every cluster induces a connected
//! subtree and the total source-to-vertex tree distance is minimal.
//!
//! - [`instance`]: the clustered graph model.
//! - [`spt`]: Dijkstra shortest-path trees inside a cluster.
//! - [`nrga`]: the randomized greedy construction heuristic.
//! - [`objective`]: feasibility checks and the objective.
//! - [`oracle`]: exhaustive optimum for tiny instances.
//! - [`io`], [`gen`], [`bench`], [`cli`]: files, instance synthesis,
//!   experiments and the command line.

pub mod bench;
pub mod cli;
pub mod gen;
pub mod instance;
pub mod io;
pub mod nrga;
pub mod objective;
pub mod oracle;
pub mod rng;
pub mod spt;

pub use instance::{ClusteredInstance, EdgeRef, InstanceError, Point, WeightKind, WeightMatrix};
pub use nrga::{nrga_run, Nrga, NrgaParams};
pub use objective::{check_feasible, total_cost, SolutionTree, Violation};
