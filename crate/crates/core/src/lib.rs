//! Linear clustering process (LCP) for community detection on undirected
//! graphs.
//!
//! Nodes sit on a line and move under attraction and repulsion between
//! neighbours, weighted by how much their neighbourhoods overlap. The
//! resulting linear operator `I + W − diag(Wu)` is symmetric; its second
//! eigenvector orders the nodes so that communities become contiguous
//! segments, which a recursive modularity bisection then cuts apart.
//!
//! Modules:
//! - [`graph`]: CSR graphs, partitions, modularity, SSBM generation, file I/O.
//! - [`numerics`]: deflated power iteration and dense eigensolvers.
//! - [`lcp`]: the weight matrix, operator, spectral extraction and link scaling.
//! - [`partition`]: ranking, threshold and modularity-based clustering, fixed-`c` merge.
//! - [`baselines`]: Louvain, Newman spectral, non-backtracking and `W*` cluster counts.
//! - [`bench`]: SSBM sweeps, parameter scans, agreement metrics and CSV output.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod graph;
pub mod lcp;
pub mod numerics;
pub mod partition;

pub use error::{Error, Result};
pub use graph::{community_count, modularity, Graph, Partition, SsbmConfig};
pub use lcp::{LcpParams, WeightMatrix};
pub use partition::{lcp_pipeline, Mode};
