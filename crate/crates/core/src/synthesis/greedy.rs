//! Greedy arc placement maximising direct throughput.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::matrix::DemandMatrix;
use crate::rational::Rational;
use crate::topology::{default_degree, Topology};

/// Demand per arc of a pair; `Inf` for positive demand and no arc yet.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Load {
    Finite(Rational),
    Inf,
}

impl Ord for Load {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Load::Inf, Load::Inf) => Ordering::Equal,
            (Load::Inf, _) => Ordering::Greater,
            (_, Load::Inf) => Ordering::Less,
            (Load::Finite(a), Load::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Load {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn load(a: &Rational, count: u32) -> Load {
    if count == 0 {
        if a.is_positive() {
            Load::Inf
        } else {
            Load::Finite(Rational::zero())
        }
    } else {
        Load::Finite(a / Rational::from_integer(count.into()))
    }
}

/// Adds one arc at a time to the pair with the largest demand per arc among
/// rows and columns that still have free degree; ties go to the smallest
/// `(i, j)`. The result maximises direct throughput over all
/// `(2n-1)`-regular topologies.
pub fn greedy_direct(m: &DemandMatrix) -> Topology {
    let n = m.n();
    let r = default_degree(n);
    let mut counts = vec![vec![0u32; n]; n];
    let mut row_used = vec![0u32; n];
    let mut col_used = vec![0u32; n];
    for _ in 0..n * r as usize {
        let mut best: Option<((usize, usize), Load)> = None;
        for i in (0..n).filter(|&i| row_used[i] < r) {
            for j in (0..n).filter(|&j| col_used[j] < r) {
                let l = load(m.get(i, j), counts[i][j]);
                if best.as_ref().map_or(true, |(_, b)| l > *b) {
                    best = Some(((i, j), l));
                }
            }
        }
        let ((i, j), _) = best.expect("a free row always meets a free column before the graph is full");
        counts[i][j] += 1;
        row_used[i] += 1;
        col_used[j] += 1;
    }
    Topology::new(counts, r).expect("every row and column is filled to the degree")
}
