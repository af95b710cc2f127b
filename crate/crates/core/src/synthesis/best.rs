//! Runs every synthesis algorithm and keeps the best topology for a mode.

use num_traits::One;
use serde::Serialize;

use crate::flow::{Mode, ThroughputReport};
use crate::matrix::DemandMatrix;
use crate::oracle::{evaluate, OracleError};
use crate::rational::{ratio, serde_str, Rational};
use crate::topology::Topology;

use super::baseline::oblivious_baseline;
use super::greedy::greedy_direct;
use super::two_stage::{kappa_lower_bound, two_stage_aware};
use super::weak_direct::{construct_weak_direct, maxcost_weak_direct};

/// Roundings tried per kappa during the two-stage search.
pub const TWO_STAGE_RETRIES: usize = 8;
/// The two-stage search stops once the kappa interval is narrower than this.
pub const KAPPA_RESOLUTION: (i64, i64) = (1, 1 << 20);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Greedy,
    Maxcost,
    WeakdirConstruct,
    TwoStage,
    Oblivious,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Greedy, Algorithm::Maxcost, Algorithm::WeakdirConstruct, Algorithm::TwoStage, Algorithm::Oblivious];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Maxcost => "maxcost",
            Algorithm::WeakdirConstruct => "weakdir-construct",
            Algorithm::TwoStage => "two-stage",
            Algorithm::Oblivious => "oblivious",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm '{s}'"))
    }
}

/// Largest kappa on a bisection grid for which the two-stage construction
/// finds a verified plan, together with its topology. The lower bound
/// always succeeds since nothing overflows there.
pub fn two_stage_search(m: &DemandMatrix, seed: u64) -> (Topology, Rational) {
    let n = m.n();
    let mut lo = kappa_lower_bound(n);
    let mut best = two_stage_aware(m, &lo, TWO_STAGE_RETRIES, seed)
        .expect("two-stage always succeeds at its lower kappa")
        .topology;
    let mut hi = Rational::one();
    if let Ok(out) = two_stage_aware(m, &hi, TWO_STAGE_RETRIES, seed) {
        return (out.topology, hi);
    }
    let resolution = ratio(KAPPA_RESOLUTION.0, KAPPA_RESOLUTION.1);
    while &hi - &lo > resolution {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        match two_stage_aware(m, &mid, TWO_STAGE_RETRIES, seed) {
            Ok(out) => {
                best = out.topology;
                lo = mid;
            }
            Err(_) => hi = mid,
        }
    }
    (best, lo)
}

/// Topology produced by one algorithm.
pub fn synthesize(m: &DemandMatrix, algorithm: Algorithm, seed: u64) -> Topology {
    match algorithm {
        Algorithm::Greedy => greedy_direct(m),
        Algorithm::Maxcost => maxcost_weak_direct(m).0,
        Algorithm::WeakdirConstruct => construct_weak_direct(m),
        Algorithm::TwoStage => two_stage_search(m, seed).0,
        Algorithm::Oblivious => oblivious_baseline(m.n()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub algorithm: Algorithm,
    #[serde(with = "serde_str")]
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BestKnown {
    pub algorithm: Algorithm,
    pub topology: Topology,
    pub report: ThroughputReport,
    pub candidates: Vec<Candidate>,
}

/// Evaluates every algorithm's topology under `mode` and keeps the best;
/// ties go to the earlier algorithm in [`Algorithm::ALL`].
pub fn best_known(m: &DemandMatrix, mode: Mode, seed: u64) -> Result<BestKnown, OracleError> {
    let mut best: Option<(Algorithm, Topology, ThroughputReport)> = None;
    let mut candidates = Vec::new();
    for algorithm in Algorithm::ALL {
        let g = synthesize(m, algorithm, seed);
        let report = evaluate(&g, m, mode)?;
        candidates.push(Candidate { algorithm, value: report.value.clone() });
        if best.as_ref().map_or(true, |(_, _, b)| report.value > b.value) {
            best = Some((algorithm, g, report));
        }
    }
    let (algorithm, topology, report) = best.expect("at least one algorithm runs");
    Ok(BestKnown { algorithm, topology, report, candidates })
}
