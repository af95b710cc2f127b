//! Exact checking of explicit flow plans against the hosting conditions.

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{check_dims, OracleError};
use crate::flow::FlowPlan;
use crate::matrix::{zero_grid, DemandMatrix};
use crate::rational::{serde_grid, serde_str, Rational};
use crate::topology::Topology;

/// What a plan must achieve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HostingCheck {
    /// Single-arc paths serving exactly `theta * a` per pair.
    DirectStrict(Rational),
    /// Single-arc paths serving at most `a` per pair.
    DirectWeak,
    /// Arbitrary paths serving exactly `theta * a` per pair.
    GeneralStrict(Rational),
    /// Arbitrary paths serving at most `a` per pair.
    GeneralWeak,
}

impl HostingCheck {
    fn direct(&self) -> bool {
        matches!(self, HostingCheck::DirectStrict(_) | HostingCheck::DirectWeak)
    }

    fn theta(&self) -> Option<&Rational> {
        match self {
            HostingCheck::DirectStrict(t) | HostingCheck::GeneralStrict(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    EmptyPath,
    BrokenPath,
    NodeOutOfRange,
    NegativeAmount,
    PathTooLong,
    ArcMissing,
    CapacityExceeded,
    /// Strict mode: served differs from `theta * a`.
    DemandMismatch,
    /// Weak mode: served exceeds `a`.
    DemandExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending route index, if the violation is about one route.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<usize>,
    /// Offending arc or node pair, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(usize, usize)>,
    /// Exact size of the violation (excess load, demand gap, route amount).
    #[serde(with = "serde_str")]
    pub amount: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub feasible: bool,
    #[serde(with = "serde_grid")]
    pub arc_load: Vec<Vec<Rational>>,
    #[serde(with = "serde_grid")]
    pub served: Vec<Vec<Rational>>,
    /// Total served over `n`.
    #[serde(with = "serde_str")]
    pub served_fraction: Rational,
    pub violations: Vec<Violation>,
}

/// Checks `plan` exactly. Malformed routes are reported and excluded from the
/// load and served totals.
pub fn verify_flow_plan(
    g: &Topology,
    m: &DemandMatrix,
    plan: &FlowPlan,
    check: &HostingCheck,
) -> Result<VerificationReport, OracleError> {
    check_dims(g, m)?;
    let n = m.n();
    let mut load = zero_grid(n);
    let mut served = zero_grid(n);
    let mut violations = Vec::new();
    let mut flag = |kind, route, pair, amount: &Rational| {
        violations.push(Violation { kind, route, pair, amount: amount.clone() });
    };

    for (idx, route) in plan.routes.iter().enumerate() {
        let amount = &route.amount;
        if route.path.is_empty() {
            flag(ViolationKind::EmptyPath, Some(idx), None, amount);
            continue;
        }
        if let Some(&(u, v)) = route.path.iter().find(|&&(u, v)| u >= n || v >= n) {
            flag(ViolationKind::NodeOutOfRange, Some(idx), Some((u, v)), amount);
            continue;
        }
        if !route.is_walk() {
            flag(ViolationKind::BrokenPath, Some(idx), None, amount);
            continue;
        }
        if amount.is_negative() {
            flag(ViolationKind::NegativeAmount, Some(idx), None, amount);
            continue;
        }
        if check.direct() && route.path.len() > 1 {
            flag(ViolationKind::PathTooLong, Some(idx), None, amount);
        }
        for &(u, v) in &route.path {
            if g.count(u, v) == 0 && !amount.is_zero() {
                flag(ViolationKind::ArcMissing, Some(idx), Some((u, v)), amount);
            }
            load[u][v] += amount;
        }
        let (s, t) = (route.path[0].0, route.path[route.path.len() - 1].1);
        served[s][t] += amount;
    }

    for (i, row) in load.iter().enumerate() {
        for (j, l) in row.iter().enumerate() {
            let cap = g.capacity(i, j);
            if g.count(i, j) > 0 && l > &cap {
                flag(ViolationKind::CapacityExceeded, None, Some((i, j)), &(l - &cap));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let got = &served[i][j];
            let a = m.get(i, j);
            match check.theta() {
                Some(theta) => {
                    let want = theta * a;
                    if *got != want {
                        flag(ViolationKind::DemandMismatch, None, Some((i, j)), &(got - &want));
                    }
                }
                None => {
                    if got > a {
                        flag(ViolationKind::DemandExceeded, None, Some((i, j)), &(got - a));
                    }
                }
            }
        }
    }

    let total: Rational = served.iter().flatten().sum();
    let served_fraction = total / Rational::from_integer(n.into());
    Ok(VerificationReport { feasible: violations.is_empty(), arc_load: load, served, served_fraction, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{paper_matrix, MatrixFamily};
    use crate::rational::{int, ratio};

    fn topo(rows: &[&[u32]]) -> Topology {
        Topology::with_default_degree(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// The hand-built plan hosting `(8/9) M1` on `[[1,2],[2,1]]`: each
    /// self-demand uses its loop and one two-hop detour.
    fn separation_plan() -> FlowPlan {
        let mut plan = FlowPlan::new();
        plan.push(vec![(0, 0)], ratio(1, 3));
        plan.push(vec![(0, 1), (1, 0)], ratio(1, 9));
        plan.push(vec![(1, 1)], ratio(1, 3));
        plan.push(vec![(1, 0), (0, 1)], ratio(1, 9));
        plan.push(vec![(0, 1)], ratio(4, 9));
        plan.push(vec![(1, 0)], ratio(4, 9));
        plan
    }

    #[test]
    fn separation_plan_saturates_every_arc() {
        let g = topo(&[&[1, 2], &[2, 1]]);
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        let report = verify_flow_plan(&g, &m1, &separation_plan(), &HostingCheck::GeneralStrict(ratio(8, 9))).unwrap();
        assert!(report.feasible, "{:?}", report.violations);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(report.arc_load[i][j], g.capacity(i, j));
            }
        }
        assert_eq!(report.served_fraction, ratio(8, 9));
        let tighter = verify_flow_plan(&g, &m1, &separation_plan(), &HostingCheck::GeneralStrict(int(1))).unwrap();
        assert!(!tighter.feasible);
        let direct = verify_flow_plan(&g, &m1, &separation_plan(), &HostingCheck::DirectWeak).unwrap();
        assert_eq!(direct.violations.iter().filter(|v| v.kind == ViolationKind::PathTooLong).count(), 2);
    }

    #[test]
    fn empty_plan_at_zero() {
        let g = topo(&[&[3, 0], &[0, 3]]);
        let m = paper_matrix(&MatrixFamily::M1).unwrap();
        let report = verify_flow_plan(&g, &m, &FlowPlan::new(), &HostingCheck::GeneralStrict(int(0))).unwrap();
        assert!(report.feasible);
    }

    #[test]
    fn missing_arc_is_reported() {
        let g = topo(&[&[3, 0], &[0, 3]]);
        let m = paper_matrix(&MatrixFamily::M1).unwrap();
        let mut plan = FlowPlan::new();
        plan.push(vec![(0, 1)], int(1));
        let report = verify_flow_plan(&g, &m, &plan, &HostingCheck::GeneralWeak).unwrap();
        assert!(!report.feasible);
        assert_eq!(report.violations[0].kind, ViolationKind::ArcMissing);
        assert_eq!(report.violations[0].pair, Some((0, 1)));
        assert!(report.violations.iter().any(|v| v.kind == ViolationKind::DemandExceeded && v.amount == ratio(1, 2)));
    }

    #[test]
    fn malformed_routes() {
        let g = topo(&[&[1, 2], &[2, 1]]);
        let m = paper_matrix(&MatrixFamily::M1).unwrap();
        let mut plan = FlowPlan::new();
        plan.push(vec![], ratio(1, 9));
        plan.push(vec![(0, 1), (0, 1)], ratio(1, 9));
        plan.push(vec![(0, 5)], ratio(1, 9));
        plan.push(vec![(0, 0)], ratio(-1, 9));
        let kinds: Vec<_> = verify_flow_plan(&g, &m, &plan, &HostingCheck::GeneralWeak)
            .unwrap()
            .violations
            .into_iter()
            .map(|v| v.kind)
            .collect();
        assert_eq!(
            kinds,
            vec![
                ViolationKind::EmptyPath,
                ViolationKind::BrokenPath,
                ViolationKind::NodeOutOfRange,
                ViolationKind::NegativeAmount
            ]
        );
    }

    #[test]
    fn report_serializes_exactly() {
        let g = topo(&[&[1, 2], &[2, 1]]);
        let m = paper_matrix(&MatrixFamily::M1).unwrap();
        let report = verify_flow_plan(&g, &m, &separation_plan(), &HostingCheck::GeneralStrict(ratio(8, 9))).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains(r#""served_fraction":"8/9""#));
        assert!(text.contains(r#""arc_load":[["1/3","2/3"],["2/3","1/3"]]"#));
    }
}
