//! Throughput and weak throughput as exact edge-based multicommodity LPs.
//!
//! Everything inside the LP is scaled by the degree `r`, so arc capacities are
//! the integer counts and the demand of pair `(s, t)` is `r * a(s, t)`.
//! Parallel arcs are aggregated into a single edge.
//!
//! A commodity `(s, t)` with `s != t` may not enter `s` or leave `t`, and never
//! uses self-loops. A self-commodity `(s, s)` is modelled by splitting `s` into
//! a source copy (out-arcs of `s`) and a sink copy (in-arcs of `s`); the loop at
//! `s` goes straight from one to the other, and every path has at least one arc.

use num_traits::{One, Signed, Zero};

use super::lp::{solve_lp, LinearProgram, Relation};
use super::{check_dims, OracleError};
use crate::flow::{FlowPlan, Mode, Path, ThroughputReport};
use crate::matrix::{zero_grid, DemandMatrix};
use crate::rational::Rational;
use crate::topology::Topology;

struct Commodity {
    s: usize,
    t: usize,
    /// Indices into the shared edge list.
    edges: Vec<usize>,
    /// LP variable of the first edge; the rest follow contiguously.
    offset: usize,
}

struct Model {
    edges: Vec<(usize, usize)>,
    commodities: Vec<Commodity>,
    num_flow_vars: usize,
}

fn allowed(s: usize, t: usize, (u, v): (usize, usize)) -> bool {
    if s == t {
        u != v || u == s
    } else {
        u != v && v != s && u != t
    }
}

fn build_model(g: &Topology, m: &DemandMatrix) -> Model {
    let edges: Vec<_> = g.arcs().collect();
    let mut commodities = Vec::new();
    let mut offset = 0;
    for (s, t) in m.support() {
        let local: Vec<usize> = (0..edges.len()).filter(|&e| allowed(s, t, edges[e])).collect();
        let len = local.len();
        commodities.push(Commodity { s, t, edges: local, offset });
        offset += len;
    }
    Model { edges, commodities, num_flow_vars: offset }
}

/// Number of LP variables the strict-mode program for `(g, m)` would use.
pub fn lp_variable_count(g: &Topology, m: &DemandMatrix) -> usize {
    build_model(g, m).num_flow_vars + 1
}

impl Model {
    /// Capacity rows plus, per commodity, conservation at every node other
    /// than its endpoints. The caller adds the supply rows.
    fn base_program(&self, g: &Topology, n: usize, extra_vars: usize) -> LinearProgram {
        let mut lp = LinearProgram::new(self.num_flow_vars + extra_vars);
        let mut per_edge: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.edges.len()];
        for c in &self.commodities {
            for (k, &e) in c.edges.iter().enumerate() {
                per_edge[e].push((c.offset + k, Rational::one()));
            }
        }
        for (e, terms) in per_edge.into_iter().enumerate() {
            if !terms.is_empty() {
                let (u, v) = self.edges[e];
                lp.add_constraint(terms, Relation::Le, Rational::from_integer(g.count(u, v).into()));
            }
        }
        for c in &self.commodities {
            for node in 0..n {
                if node == c.s || node == c.t {
                    continue;
                }
                let mut terms = Vec::new();
                for (k, &e) in c.edges.iter().enumerate() {
                    let (u, v) = self.edges[e];
                    if v == node {
                        terms.push((c.offset + k, Rational::one()));
                    }
                    if u == node {
                        terms.push((c.offset + k, -Rational::one()));
                    }
                }
                if !terms.is_empty() {
                    lp.add_constraint(terms, Relation::Eq, Rational::zero());
                }
            }
        }
        lp
    }

    fn supply_terms(&self, c: &Commodity) -> Vec<(usize, Rational)> {
        c.edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| self.edges[e].0 == c.s)
            .map(|(k, _)| (c.offset + k, Rational::one()))
            .collect()
    }

    /// Turns optimal edge flows into explicit paths (amounts divided by `r`)
    /// and the served grid.
    fn decompose(&self, values: &[Rational], r: &Rational, n: usize) -> (FlowPlan, Vec<Vec<Rational>>) {
        let mut plan = FlowPlan::new();
        let mut served = zero_grid(n);
        for c in &self.commodities {
            let mut flow: Vec<Rational> = c.edges.iter().enumerate().map(|(k, _)| values[c.offset + k].clone()).collect();
            while let Some(path) = self.shortest_path(c, &flow, n) {
                let amount = path.iter().map(|&k| flow[k].clone()).min().expect("paths are non-empty");
                for &k in &path {
                    flow[k] -= &amount;
                }
                let arcs: Path = path.iter().map(|&k| self.edges[c.edges[k]]).collect();
                let amount = amount / r;
                served[c.s][c.t] += &amount;
                plan.push(arcs, amount);
            }
        }
        (plan, served)
    }

    /// BFS from the source over positive-flow edges; returns local edge
    /// indices of a fewest-arc path ending in the sink.
    fn shortest_path(&self, c: &Commodity, flow: &[Rational], n: usize) -> Option<Vec<usize>> {
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[c.s] = true;
        let mut queue = std::collections::VecDeque::from([c.s]);
        while let Some(x) = queue.pop_front() {
            for (k, &e) in c.edges.iter().enumerate() {
                let (u, v) = self.edges[e];
                if u != x || !flow[k].is_positive() {
                    continue;
                }
                if v == c.t {
                    let mut path = vec![k];
                    let mut node = u;
                    while node != c.s {
                        let k = via[node].expect("visited nodes have a parent");
                        path.push(k);
                        node = self.edges[c.edges[k]].0;
                    }
                    path.reverse();
                    return Some(path);
                }
                if !seen[v] {
                    seen[v] = true;
                    via[v] = Some(k);
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

fn degree_of(g: &Topology) -> Rational {
    Rational::from_integer(g.degree().into())
}

/// Largest `theta` such that `g` hosts `theta * m` (maximum concurrent flow).
pub fn throughput(g: &Topology, m: &DemandMatrix) -> Result<ThroughputReport, OracleError> {
    check_dims(g, m)?;
    let n = m.n();
    let r = degree_of(g);
    let model = build_model(g, m);
    let theta = model.num_flow_vars;
    let mut lp = model.base_program(g, n, 1);
    lp.set_objective(theta, Rational::one());
    lp.add_constraint(vec![(theta, Rational::one())], Relation::Le, Rational::one());
    for c in &model.commodities {
        let mut terms = model.supply_terms(c);
        terms.push((theta, -(&r * m.get(c.s, c.t))));
        lp.add_constraint(terms, Relation::Eq, Rational::zero());
    }
    let sol = solve_lp(&lp)?;
    let (plan, served) = if sol.optimum.is_zero() {
        (FlowPlan::new(), zero_grid(n))
    } else {
        model.decompose(&sol.values, &r, n)
    };
    Ok(ThroughputReport { mode: Mode::GeneralStrict, value: sol.optimum, witness: Some(plan), hosted: Some(served) })
}

/// Largest fraction of the total demand `n` that `g` can serve when every
/// pair may be served partially.
pub fn weak_throughput(g: &Topology, m: &DemandMatrix) -> Result<ThroughputReport, OracleError> {
    check_dims(g, m)?;
    let n = m.n();
    let r = degree_of(g);
    let model = build_model(g, m);
    let mut lp = model.base_program(g, n, 0);
    for c in &model.commodities {
        let terms = model.supply_terms(c);
        for (v, _) in &terms {
            lp.set_objective(*v, Rational::one());
        }
        lp.add_constraint(terms, Relation::Le, &r * m.get(c.s, c.t));
    }
    let sol = solve_lp(&lp)?;
    let value = sol.optimum / (&r * Rational::from_integer(n.into()));
    let (plan, served) = model.decompose(&sol.values, &r, n);
    Ok(ThroughputReport { mode: Mode::GeneralWeak, value, witness: Some(plan), hosted: Some(served) })
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
    fn separation_examples() {
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        let m2 = paper_matrix(&MatrixFamily::M2).unwrap();
        assert_eq!(throughput(&topo(&[&[1, 2], &[2, 1]]), &m1).unwrap().value, ratio(8, 9));
        assert_eq!(throughput(&topo(&[&[2, 1], &[1, 2]]), &m2).unwrap().value, ratio(50, 57));
    }

    /// Partial service beats concurrent flow on the separation graph: in
    /// r-scaled units the loops serve 1 + 1, the cross arcs serve 3/2 each
    /// and their leftover 1/2 carries one two-hop self-demand, 11/2 of 6.
    #[test]
    fn weak_exceeds_strict_on_separation_graph() {
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        let report = weak_throughput(&topo(&[&[1, 2], &[2, 1]]), &m1).unwrap();
        assert_eq!(report.value, ratio(11, 12));
        let served: Rational = report.hosted.unwrap().iter().flatten().sum();
        assert_eq!(served, ratio(11, 6));
    }

    #[test]
    fn single_node() {
        let g = topo(&[&[1]]);
        let m = DemandMatrix::identity(1);
        assert_eq!(throughput(&g, &m).unwrap().value, int(1));
        assert_eq!(weak_throughput(&g, &m).unwrap().value, int(1));
    }

    #[test]
    fn disconnected_pairs_give_zero() {
        let g = topo(&[&[3, 0], &[0, 3]]);
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        let report = throughput(&g, &m1).unwrap();
        assert_eq!(report.value, int(0));
        assert!(report.witness.unwrap().is_empty());
        assert_eq!(weak_throughput(&g, &m1).unwrap().value, ratio(1, 2));
    }

    #[test]
    fn witness_paths_are_walks_between_the_right_endpoints() {
        let m = paper_matrix(&MatrixFamily::FigSecondStage).unwrap();
        let g = topo(&[&[2, 1, 2], &[2, 2, 1], &[1, 2, 2]]);
        let report = throughput(&g, &m).unwrap();
        let plan = report.witness.unwrap();
        for route in &plan.routes {
            assert!(route.is_walk());
            assert!(route.amount.is_positive());
        }
        let hosted = report.hosted.unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(hosted[i][j], &report.value * m.get(i, j));
            }
        }
    }

    #[test]
    fn variable_count() {
        let m1 = paper_matrix(&MatrixFamily::M1).unwrap();
        // (0,0): 3 edges, (0,1): 1 edge, (1,0): 1 edge, (1,1): 3 edges, plus theta
        assert_eq!(lp_variable_count(&topo(&[&[1, 2], &[2, 1]]), &m1), 9);
    }
}
