//! Demand-aware topology synthesis and throughput evaluation.
//!
//! Topologies are `(2n-1)`-regular directed multigraphs on `n` nodes, demands
//! are doubly stochastic matrices, and every quantity is an exact rational.

pub mod families;
pub mod flow;
pub mod matrix;
pub mod oracle;
pub mod rational;
pub mod reduction;
pub mod rounding;
pub mod synthesis;
pub mod topology;

pub use families::{paper_matrix, FamilyError, MatrixFamily};
pub use flow::{FlowPlan, Mode, Path, Route, ThroughputReport};
pub use matrix::{random_doubly_stochastic, DemandMatrix, MatrixError};
pub use rational::{int, parse_rational, ratio, Rational};
pub use topology::{default_degree, enumerate_regular_topologies, Topology, TopologyError};
pub use rounding::{cycle_round, dependent_round, FractionalMatrix, RoundingError, RoundingSample};
pub use reduction::{brute_force_x3c, witness_from_cover, x3c_to_instance, ReductionArtifacts, ReductionError, X3CInstance};
pub use synthesis::{best_known, synthesize, Algorithm};
