//! Weak direct throughput: exact optimisation by max-cost flow, and the
//! rounding construction with its `(7n-4)/(8n-4)` guarantee.

use crate::matrix::DemandMatrix;
use crate::rational::{floor, frac, int, to_i64, Rational};
use crate::rounding::{cycle_round, FractionalMatrix};
use crate::topology::{default_degree, Topology};

use super::mincost::{max_cost_flow, MinCostFlowNetwork};

/// Node layout: source `0`, row nodes `1..=n`, column nodes `n+1..=2n`,
/// sink `2n+1`. Each pair `(i, j)` gets three parallel arcs whose costs
/// make the first `a'` units of flow worth exactly `min(a', flow)`, with
/// `a' = (2n-1) a(i, j)`. Returns the network and the arc index of each
/// pair's first parallel arc.
pub fn weak_direct_network(m: &DemandMatrix) -> (MinCostFlowNetwork, Vec<Vec<usize>>) {
    let n = m.n();
    let r = int(default_degree(n) as i64);
    let (s, t) = (0, 2 * n + 1);
    let mut net = MinCostFlowNetwork::new(2 * n + 2, s, t);
    for i in 0..n {
        net.add_arc(s, 1 + i, r.clone(), int(0));
    }
    for j in 0..n {
        net.add_arc(1 + n + j, t, r.clone(), int(0));
    }
    let mut first = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let scaled = &r * m.get(i, j);
            first[i][j] = net.add_arc(1 + i, 1 + n + j, floor(&scaled), int(1));
            net.add_arc(1 + i, 1 + n + j, int(1), frac(&scaled));
            net.add_arc(1 + i, 1 + n + j, r.clone(), int(0));
        }
    }
    (net, first)
}

/// Topology with the largest weak direct throughput, and that value.
pub fn maxcost_weak_direct(m: &DemandMatrix) -> (Topology, Rational) {
    let n = m.n();
    let r = default_degree(n);
    let (net, first) = weak_direct_network(m);
    let total = int((n * r as usize) as i64);
    let sol = max_cost_flow(&net, &total).expect("the complete bipartite network carries n(2n-1) units");
    let counts = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = first[i][j];
                    let f: Rational = sol.flows[k..k + 3].iter().sum();
                    to_i64(&f).expect("integral capacities give integral flows") as u32
                })
                .collect()
        })
        .collect();
    let g = Topology::new(counts, r).expect("unit flows through row and column nodes fill every degree");
    (g, sol.cost / total)
}

/// `floor((2n-1) M)` plus a [`cycle_round`] of the fractional remainder.
pub fn construct_weak_direct(m: &DemandMatrix) -> Topology {
    let n = m.n();
    let r = default_degree(n);
    let scaled = m.scaled(&int(r as i64));
    let rest = FractionalMatrix::fractional_parts(&scaled).expect("(2n-1)M has integral margins");
    let bits = cycle_round(&rest).bits;
    let counts = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| to_i64(&floor(&scaled[i][j])).expect("entries are bounded by 2n-1") as u32 + bits[i][j] as u32)
                .collect()
        })
        .collect();
    Topology::new(counts, r).expect("rounding preserves the margins of (2n-1)M")
}

/// The guarantee `(7n-4)/(8n-4)`.
pub fn construction_bound(n: usize) -> Rational {
    let n = n as i64;
    Rational::new((7 * n - 4).into(), (8 * n - 4).into())
}
