//! Successive-shortest-path min-cost flow with Johnson potentials, over exact
//! rationals. Max-cost flow is min-cost flow on negated costs.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: Rational,
    pub cost: Rational,
}

/// Directed network with parallel arcs allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCostFlowNetwork {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<FlowArc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("only {achieved} of the requested {requested} units can reach the sink")]
    TargetUnreachable { requested: Rational, achieved: Rational },
    #[error("network has a negative-cost cycle reachable from the source")]
    NegativeCycle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowSolution {
    /// Flow on each arc, in input order.
    pub flows: Vec<Rational>,
    pub cost: Rational,
}

impl MinCostFlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        Self { nodes, source, sink, arcs: Vec::new() }
    }

    /// Appends an arc and returns its index.
    pub fn add_arc(&mut self, from: usize, to: usize, capacity: Rational, cost: Rational) -> usize {
        self.arcs.push(FlowArc { from, to, capacity, cost });
        self.arcs.len() - 1
    }
}

struct Residual {
    head: Vec<usize>,
    cap: Vec<Rational>,
    cost: Vec<Rational>,
    out: Vec<Vec<usize>>,
}

impl Residual {
    fn new(net: &MinCostFlowNetwork, sign: &Rational) -> Self {
        let mut r = Residual { head: Vec::new(), cap: Vec::new(), cost: Vec::new(), out: vec![Vec::new(); net.nodes] };
        for a in &net.arcs {
            let c = &a.cost * sign;
            r.out[a.from].push(r.head.len());
            r.head.push(a.to);
            r.cap.push(a.capacity.clone());
            r.cost.push(c.clone());
            r.out[a.to].push(r.head.len());
            r.head.push(a.from);
            r.cap.push(Rational::zero());
            r.cost.push(-c);
        }
        r
    }
}

/// Bellman-Ford distances from `src` over arcs with residual capacity.
fn initial_potentials(res: &Residual, src: usize) -> Result<Vec<Option<Rational>>, FlowError> {
    let n = res.out.len();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    dist[src] = Some(Rational::zero());
    for round in 0..=n {
        let mut changed = false;
        for u in 0..n {
            let Some(du) = dist[u].clone() else { continue };
            for &e in &res.out[u] {
                if !res.cap[e].is_positive() {
                    continue;
                }
                let cand = &du + &res.cost[e];
                let v = res.head[e];
                if dist[v].as_ref().map_or(true, |dv| cand < *dv) {
                    dist[v] = Some(cand);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(dist);
        }
        if round == n {
            break;
        }
    }
    Err(FlowError::NegativeCycle)
}

fn solve(net: &MinCostFlowNetwork, target: &Rational, sign: Rational) -> Result<FlowSolution, FlowError> {
    let mut res = Residual::new(net, &sign);
    let n = net.nodes;
    let mut pot: Vec<Rational> = initial_potentials(&res, net.source)?
        .into_iter()
        .map(|d| d.unwrap_or_else(Rational::zero))
        .collect();
    let mut sent = Rational::zero();
    while &sent < target {
        // Dijkstra on reduced costs; dense O(V^2) scan is plenty here.
        let mut dist: Vec<Option<Rational>> = vec![None; n];
        let mut via: Vec<Option<usize>> = vec![None; n];
        let mut done = vec![false; n];
        dist[net.source] = Some(Rational::zero());
        loop {
            let next = (0..n)
                .filter(|&v| !done[v] && dist[v].is_some())
                .min_by(|&a, &b| dist[a].cmp(&dist[b]));
            let Some(u) = next else { break };
            done[u] = true;
            let du = dist[u].clone().expect("selected nodes have a distance");
            for &e in &res.out[u] {
                if !res.cap[e].is_positive() {
                    continue;
                }
                let v = res.head[e];
                let cand = &du + &res.cost[e] + &pot[u] - &pot[v];
                if dist[v].as_ref().map_or(true, |dv| cand < *dv) {
                    dist[v] = Some(cand);
                    via[v] = Some(e);
                }
            }
        }
        if dist[net.sink].is_none() {
            return Err(FlowError::TargetUnreachable { requested: target.clone(), achieved: sent });
        }
        for v in 0..n {
            if let Some(d) = &dist[v] {
                pot[v] += d;
            }
        }
        let mut path = Vec::new();
        let mut v = net.sink;
        while v != net.source {
            let e = via[v].expect("reachable nodes have a predecessor arc");
            path.push(e);
            v = res.head[e ^ 1];
        }
        let mut push = target - &sent;
        for &e in &path {
            if res.cap[e] < push {
                push = res.cap[e].clone();
            }
        }
        for &e in &path {
            res.cap[e] -= &push;
            res.cap[e ^ 1] += &push;
        }
        sent += &push;
    }
    let flows: Vec<Rational> = (0..net.arcs.len()).map(|k| res.cap[2 * k + 1].clone()).collect();
    let cost = flows.iter().zip(&net.arcs).map(|(f, a)| f * &a.cost).sum();
    Ok(FlowSolution { flows, cost })
}

/// Sends exactly `target` units from source to sink at minimum total cost.
/// Flows are integral whenever capacities and `target` are.
pub fn min_cost_flow(net: &MinCostFlowNetwork, target: &Rational) -> Result<FlowSolution, FlowError> {
    solve(net, target, Rational::from_integer(1.into()))
}

/// Sends exactly `target` units at maximum total cost.
pub fn max_cost_flow(net: &MinCostFlowNetwork, target: &Rational) -> Result<FlowSolution, FlowError> {
    solve(net, target, Rational::from_integer((-1).into()))
}
