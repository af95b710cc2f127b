#![allow(dead_code)]

use daw_core::families::families_at;
use daw_core::oracle::{direct_throughput, throughput, weak_direct_throughput, weak_throughput};
use daw_core::{
    default_degree, enumerate_regular_topologies, paper_matrix, random_doubly_stochastic, DemandMatrix, Mode, Rational,
    Topology,
};

/// Paper families at `n` followed by `randoms` seeded random matrices.
pub fn corpus(n: usize, randoms: u64) -> Vec<(String, DemandMatrix)> {
    let mut out: Vec<(String, DemandMatrix)> =
        families_at(n).into_iter().map(|f| (f.to_string(), paper_matrix(&f).unwrap())).collect();
    for seed in 0..randoms {
        let k = 1 + (seed as usize % (n + 2));
        out.push((format!("random(n={n},k={k},seed={seed})"), random_doubly_stochastic(n, k, 1000 * n as u64 + seed)));
    }
    out
}

pub fn value(g: &Topology, m: &DemandMatrix, mode: Mode) -> Rational {
    match mode {
        Mode::DirectStrict => direct_throughput(g, m).unwrap().value,
        Mode::DirectWeak => weak_direct_throughput(g, m).unwrap().value,
        Mode::GeneralStrict => throughput(g, m).unwrap().value,
        Mode::GeneralWeak => weak_throughput(g, m).unwrap().value,
    }
}

/// Best value and the first topology attaining it over all regular
/// topologies of default degree.
pub fn brute_force(m: &DemandMatrix, mode: Mode) -> (Rational, Topology, usize) {
    let mut best: Option<(Rational, Topology)> = None;
    let mut count = 0;
    for g in enumerate_regular_topologies(m.n(), default_degree(m.n())) {
        count += 1;
        let v = value(&g, m, mode);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, g));
        }
    }
    let (v, g) = best.expect("at least one regular topology exists");
    (v, g, count)
}
