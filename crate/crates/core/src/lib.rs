//! Hierarchical clustering with structural (triplet) constraints.
//!
//! Objectives and trees live in [`objective`] and [`tree`]; [`constraints`]
//! handles feasibility and contraction; [`divisive`] and [`randomized`] hold
//! the clustering algorithms and [`oracle`] the exact small-instance optima.

pub mod cli;
pub mod constraints;
pub mod cuts;
pub mod demo;
pub mod divisive;
pub mod error;
pub mod graph;
pub mod io;
pub mod objective;
pub mod oracle;
pub mod randomized;
pub mod spectral;
pub mod tree;
pub mod zoo;

pub use constraints::{ConstraintSet, TripletConstraint};
pub use error::{HcError, Result};
pub use graph::WeightedGraph;
pub use tree::ClusterTree;
