//! Throughput oracles: closed forms for direct hosting, exact linear programs
//! for general routing, plan verification and the relation audit.

pub mod audit;
pub mod direct;
pub mod general;
pub mod lp;
pub mod verify;

use thiserror::Error;

use crate::flow::{Mode, ThroughputReport};
use crate::matrix::DemandMatrix;
use crate::topology::Topology;

pub use audit::{relation_audit, RelationAudit};
pub use direct::{direct_throughput, weak_direct_throughput};
pub use general::{lp_variable_count, throughput, weak_throughput};
pub use lp::{solve_lp, LinearProgram, LpError, LpSolution, Relation};
pub use verify::{verify_flow_plan, HostingCheck, VerificationReport, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("topology has {graph} nodes but the matrix has {matrix}")]
    DimensionMismatch { graph: usize, matrix: usize },
    #[error("LP solver failure: {0}")]
    LpNumericalFailure(#[from] LpError),
    #[error("relation chain violated: {0}")]
    RelationViolation(String),
}

pub(crate) fn check_dims(g: &Topology, m: &DemandMatrix) -> Result<(), OracleError> {
    if g.n() != m.n() {
        return Err(OracleError::DimensionMismatch { graph: g.n(), matrix: m.n() });
    }
    Ok(())
}

/// Dispatches to the oracle for `mode`.
pub fn evaluate(g: &Topology, m: &DemandMatrix, mode: Mode) -> Result<ThroughputReport, OracleError> {
    match mode {
        Mode::DirectStrict => direct_throughput(g, m),
        Mode::DirectWeak => weak_direct_throughput(g, m),
        Mode::GeneralStrict => throughput(g, m),
        Mode::GeneralWeak => weak_throughput(g, m),
    }
}
