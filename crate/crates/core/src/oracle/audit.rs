//! Cross-check of the four notions against their known ordering.

use serde::Serialize;

use super::{direct_throughput, throughput, weak_direct_throughput, weak_throughput, OracleError};
use crate::matrix::DemandMatrix;
use crate::rational::{serde_str, Rational};
use crate::topology::Topology;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationAudit {
    #[serde(with = "serde_str")]
    pub direct: Rational,
    #[serde(with = "serde_str")]
    pub weak_direct: Rational,
    #[serde(with = "serde_str")]
    pub strict: Rational,
    #[serde(with = "serde_str")]
    pub weak: Rational,
}

impl RelationAudit {
    pub fn as_tuple(&self) -> (Rational, Rational, Rational, Rational) {
        (self.direct.clone(), self.weak_direct.clone(), self.strict.clone(), self.weak.clone())
    }
}

/// Evaluates all four oracles and checks `weak >= strict >= direct` and
/// `weak >= weak_direct >= direct`. A violation means an oracle is wrong.
pub fn relation_audit(g: &Topology, m: &DemandMatrix) -> Result<RelationAudit, OracleError> {
    let audit = RelationAudit {
        direct: direct_throughput(g, m)?.value,
        weak_direct: weak_direct_throughput(g, m)?.value,
        strict: throughput(g, m)?.value,
        weak: weak_throughput(g, m)?.value,
    };
    let chain = [
        ("weak", &audit.weak, "strict", &audit.strict),
        ("strict", &audit.strict, "direct", &audit.direct),
        ("weak", &audit.weak, "weak-direct", &audit.weak_direct),
        ("weak-direct", &audit.weak_direct, "direct", &audit.direct),
    ];
    for (hi_name, hi, lo_name, lo) in chain {
        if hi < lo {
            return Err(OracleError::RelationViolation(format!("{hi_name} = {hi} < {lo_name} = {lo}")));
        }
    }
    Ok(audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{paper_matrix, MatrixFamily};
    use crate::rational::{int, ratio};

    #[test]
    fn separation_graph() {
        let g = Topology::with_default_degree(vec![vec![1, 2], vec![2, 1]]).unwrap();
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        assert_eq!(relation_audit(&g, &m1).unwrap().as_tuple(), (ratio(2, 3), ratio(5, 6), ratio(8, 9), ratio(11, 12)));
    }

    #[test]
    fn coinciding_cases() {
        let ones = (int(1), int(1), int(1), int(1));
        let g = Topology::with_default_degree(vec![vec![3, 0], vec![0, 3]]).unwrap();
        assert_eq!(relation_audit(&g, &DemandMatrix::identity(2)).unwrap().as_tuple(), ones);
        let g = Topology::new(vec![vec![4]], 4).unwrap();
        assert_eq!(relation_audit(&g, &DemandMatrix::identity(1)).unwrap().as_tuple(), ones);
    }
}
