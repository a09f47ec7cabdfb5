//! Coined discrete-time quantum walks on undirected graphs, and community
//! detection from their time-averaged transition probabilities.
//!
//! The walk lives on the directed-arc basis `{|i→j⟩}`: one state per
//! orthogonal direction of each edge, `D = Σ kᵢ` in total. Arcs are numbered
//! per node, contiguously, with neighbours in ascending order. One step is
//! `U = S·C`, a per-node coin followed by the arc-reversal shift.
//!
//! ```
//! use arcwalk::{community, datasets, spectral, CoinKind};
//!
//! let graph = datasets::three_community();
//! let dec = spectral::decompose_walk(&graph, CoinKind::Fourier, 6000, 1e-8).unwrap();
//! let averages = spectral::infinite_time_matrix(&dec, &graph).unwrap();
//! let q = 1.0 / graph.arc_count() as f64;
//! let partition =
//!     community::detect(&averages, &graph, q, community::AverageSource::InfiniteTime).unwrap();
//! assert_eq!(partition.hubs, vec![0, 12, 20]);
//! ```

pub mod classical;
pub mod community;
pub mod datasets;
pub mod evolution;
pub mod graph;
pub mod loaders;
pub mod operators;
mod parallel;
pub mod report;
pub mod spectral;

pub use community::{AverageSource, CommunityPartition};
pub use evolution::{AveragingWindow, TransitionMatrix, TransitionRow, WalkState};
pub use graph::{Graph, GraphError};
pub use operators::{CoinKind, WalkOperator};
pub use spectral::SpectralDecomposition;
