//! Direct hosting: every demand travels over a single arc, so both notions
//! have closed forms in the arc counts.

use num_traits::{One, Signed, Zero};

use super::{check_dims, OracleError};
use crate::flow::{FlowPlan, Mode, ThroughputReport};
use crate::matrix::{zero_grid, DemandMatrix};
use crate::rational::Rational;
use crate::topology::Topology;

/// Largest `theta` such that every pair's `theta * a` fits on its own arcs:
/// the minimum of `counts / (r * a)` over the support, capped at 1.
pub fn direct_throughput(g: &Topology, m: &DemandMatrix) -> Result<ThroughputReport, OracleError> {
    check_dims(g, m)?;
    let r = Rational::from_integer(g.degree().into());
    let mut value = Rational::one();
    for (i, j) in m.support() {
        let ratio = Rational::from_integer(g.count(i, j).into()) / (&r * m.get(i, j));
        if ratio < value {
            value = ratio;
        }
    }
    let mut plan = FlowPlan::new();
    let mut hosted = zero_grid(m.n());
    if value.is_positive() {
        for (i, j) in m.support() {
            let amount = &value * m.get(i, j);
            hosted[i][j] = amount.clone();
            plan.push(vec![(i, j)], amount);
        }
    }
    Ok(ThroughputReport { mode: Mode::DirectStrict, value, witness: Some(plan), hosted: Some(hosted) })
}

/// Each pair keeps `min(r * a, counts) / r` on its own arcs; the value is the
/// hosted total over `n`.
pub fn weak_direct_throughput(g: &Topology, m: &DemandMatrix) -> Result<ThroughputReport, OracleError> {
    check_dims(g, m)?;
    let n = m.n();
    let r = Rational::from_integer(g.degree().into());
    let mut hosted = zero_grid(n);
    let mut plan = FlowPlan::new();
    let mut total = Rational::zero();
    for (i, j) in m.support() {
        let want = &r * m.get(i, j);
        let have = Rational::from_integer(g.count(i, j).into());
        let h = if want < have { want } else { have } / &r;
        if h.is_positive() {
            total += &h;
            plan.push(vec![(i, j)], h.clone());
            hosted[i][j] = h;
        }
    }
    let value = total / Rational::from_integer(n.into());
    Ok(ThroughputReport { mode: Mode::DirectWeak, value, witness: Some(plan), hosted: Some(hosted) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{paper_matrix, MatrixFamily};
    use crate::rational::{int, ratio};

    fn topo(rows: &[&[u32]]) -> Topology {
        Topology::with_default_degree(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn direct_examples() {
        let m2 = paper_matrix(&MatrixFamily::M2).unwrap();
        assert_eq!(direct_throughput(&topo(&[&[2, 1], &[1, 2]]), &m2).unwrap().value, ratio(20, 27));
        let id = DemandMatrix::identity(2);
        assert_eq!(direct_throughput(&topo(&[&[3, 0], &[0, 3]]), &id).unwrap().value, int(1));
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        let report = direct_throughput(&topo(&[&[3, 0], &[0, 3]]), &m1).unwrap();
        assert_eq!(report.value, int(0));
        assert!(report.witness.unwrap().is_empty());
    }

    #[test]
    fn weak_direct_examples() {
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        assert_eq!(weak_direct_throughput(&topo(&[&[2, 1], &[1, 2]]), &m1).unwrap().value, ratio(5, 6));
        assert_eq!(weak_direct_throughput(&topo(&[&[1, 2], &[2, 1]]), &m1).unwrap().value, ratio(5, 6));
        let m2 = paper_matrix(&MatrixFamily::M2).unwrap();
        assert_eq!(weak_direct_throughput(&topo(&[&[3, 0], &[0, 3]]), &m2).unwrap().value, ratio(9, 10));
        let fig = paper_matrix(&MatrixFamily::FigFlowExample).unwrap();
        let report = weak_direct_throughput(&topo(&[&[0, 1, 4], &[1, 4, 0], &[4, 0, 1]]), &fig).unwrap();
        assert_eq!(report.value, ratio(67, 75));
        let hosted: Rational = report.hosted.unwrap().iter().flatten().sum();
        assert_eq!(hosted, ratio(268, 100));
    }

    #[test]
    fn dimension_mismatch() {
        let err = direct_throughput(&topo(&[&[1]]), &DemandMatrix::identity(2)).unwrap_err();
        assert_eq!(err, OracleError::DimensionMismatch { graph: 1, matrix: 2 });
    }
}
