//! Demand-oblivious baseline topology.

use crate::topology::{default_degree, Topology};

/// One self-loop per node and two parallel arcs per ordered pair of
/// distinct nodes, which is `(2n-1)`-regular.
pub fn oblivious_baseline(n: usize) -> Topology {
    assert!(n >= 1, "oblivious_baseline needs n >= 1");
    let counts = (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else { 2 }).collect()).collect();
    Topology::new(counts, default_degree(n)).expect("1 + 2(n-1) = 2n-1")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(oblivious_baseline(1).counts(), &[vec![1]]);
        assert_eq!(oblivious_baseline(2).counts(), &[vec![1, 2], vec![2, 1]]);
        assert_eq!(oblivious_baseline(4).degree(), 7);
    }
}
