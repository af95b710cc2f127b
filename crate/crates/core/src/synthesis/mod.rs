//! Topology synthesis algorithms.

pub mod baseline;
pub mod best;
pub mod greedy;
pub mod mincost;
pub mod two_stage;
pub mod weak_direct;

pub use baseline::oblivious_baseline;
pub use best::{best_known, synthesize, two_stage_search, Algorithm, BestKnown, Candidate};
pub use greedy::greedy_direct;
pub use mincost::{max_cost_flow, min_cost_flow, FlowError, FlowSolution, MinCostFlowNetwork};
pub use two_stage::{stage_quantities, two_stage_aware, StageQuantities, TwoStageError, TwoStagePlan};
pub use weak_direct::{construct_weak_direct, construction_bound, maxcost_weak_direct};
