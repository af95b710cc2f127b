//! Rounding fractional matrices with integral margins to 0/1 matrices with
//! the same margins.
//!
//! Both routines repeatedly pick a cycle in the bipartite graph whose edges
//! are the fractional entries (rows on one side, columns on the other) and
//! shift value alternately along it until at least one entry becomes integral.
//! [`cycle_round`] picks the shift direction deterministically so that the
//! weighted sum `sum a * b` never decreases; [`dependent_round`] picks it at
//! random so that every entry keeps its expectation.

use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::margins;
use crate::rational::{bernoulli_u64, frac, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundingError {
    #[error("invalid fractional matrix: {0}")]
    InvalidInput(String),
}

/// Square matrix with entries in `[0, 1]` and integral row and column sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FractionalMatrix {
    n: usize,
    entries: Vec<Vec<Rational>>,
}

impl FractionalMatrix {
    pub fn new(entries: Vec<Vec<Rational>>) -> Result<Self, RoundingError> {
        let n = entries.len();
        let invalid = |msg: String| Err(RoundingError::InvalidInput(msg));
        if n == 0 {
            return invalid("empty matrix".into());
        }
        for (i, row) in entries.iter().enumerate() {
            if row.len() != n {
                return invalid(format!("row {i} has {} entries, expected {n}", row.len()));
            }
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() || v > &Rational::one() {
                    return invalid(format!("entry ({i}, {j}) = {v} is outside [0, 1]"));
                }
            }
        }
        let (rows, cols) = margins(&entries);
        if let Some((i, s)) = rows.iter().enumerate().find(|(_, s)| !s.is_integer()) {
            return invalid(format!("row {i} sums to {s}, not an integer"));
        }
        if let Some((j, s)) = cols.iter().enumerate().find(|(_, s)| !s.is_integer()) {
            return invalid(format!("column {j} sums to {s}, not an integer"));
        }
        Ok(Self { n, entries })
    }

    /// Fractional parts of a grid whose row and column sums are integers.
    pub fn fractional_parts(grid: &[Vec<Rational>]) -> Result<Self, RoundingError> {
        Self::new(grid.iter().map(|r| r.iter().map(frac).collect()).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// Sum of all entries (`X` in the average bound).
    pub fn total(&self) -> Rational {
        self.entries.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Cycle,
    Dependent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundingSample {
    pub bits: Vec<Vec<u8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub provenance: Provenance,
}

impl RoundingSample {
    pub fn row_sums(&self) -> Vec<u64> {
        self.bits.iter().map(|r| r.iter().map(|&b| b as u64).sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let n = self.bits.len();
        (0..n).map(|j| self.bits.iter().map(|r| r[j] as u64).sum()).collect()
    }

    /// `sum a(i,j) * b(i,j)` against a weight grid.
    pub fn weighted_sum(&self, weights: &[Vec<Rational>]) -> Rational {
        let mut total = Rational::zero();
        for (brow, wrow) in self.bits.iter().zip(weights) {
            for (&b, w) in brow.iter().zip(wrow) {
                if b == 1 {
                    total += w;
                }
            }
        }
        total
    }
}

/// Finds a cycle of fractional entries: start at the row of the smallest
/// fractional entry (row-major), keep leaving each vertex by its
/// lowest-indexed fractional edge other than the one just used, and cut the
/// walk at the first repeated vertex. Returns `None` once all entries are
/// integral.
fn find_cycle(c: &[Vec<Rational>]) -> Option<Vec<(usize, usize)>> {
    let n = c.len();
    let fractional = |i: usize, j: usize| !c[i][j].is_integer();
    let (i0, j0) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| fractional(i, j))?;
    // vertices: rows are 0..n, columns n..2n
    let mut first_seen = vec![None; 2 * n];
    let mut edges = vec![(i0, j0)];
    first_seen[i0] = Some(0);
    let mut at = n + j0;
    let mut prev = (i0, j0);
    loop {
        if let Some(pos) = first_seen[at] {
            return Some(edges.split_off(pos));
        }
        first_seen[at] = Some(edges.len());
        let next = if at < n {
            let i = at;
            (0..n).map(|j| (i, j)).find(|&(i, j)| (i, j) != prev && fractional(i, j))
        } else {
            let j = at - n;
            (0..n).map(|i| (i, j)).find(|&(i, j)| (i, j) != prev && fractional(i, j))
        }
        .expect("integral margins leave no vertex with exactly one fractional edge");
        edges.push(next);
        at = if at < n { n + next.1 } else { next.0 };
        prev = next;
    }
}

/// Adds `eps` to even-position edges and subtracts it from odd-position ones
/// (positions counted from 1), or the reverse when `raise_odd` is set.
fn shift(c: &mut [Vec<Rational>], cycle: &[(usize, usize)], eps: &Rational, raise_odd: bool) {
    for (k, &(i, j)) in cycle.iter().enumerate() {
        let odd = k % 2 == 0;
        if odd == raise_odd {
            c[i][j] += eps;
        } else {
            c[i][j] -= eps;
        }
    }
}

/// Largest step that keeps every entry in `[0, 1]` when odd edges move by
/// `+eps` (`raise_odd`) or `-eps`.
fn max_step(c: &[Vec<Rational>], cycle: &[(usize, usize)], raise_odd: bool) -> Rational {
    cycle
        .iter()
        .enumerate()
        .map(|(k, &(i, j))| {
            let odd = k % 2 == 0;
            if odd == raise_odd {
                Rational::one() - &c[i][j]
            } else {
                c[i][j].clone()
            }
        })
        .min()
        .expect("cycles are non-empty")
}

fn to_bits(c: &[Vec<Rational>]) -> Vec<Vec<u8>> {
    c.iter().map(|r| r.iter().map(|v| u8::from(v.is_one())).collect()).collect()
}

/// Deterministic rounding with `sum a * b >= X^2 / n^2`, where `a` are the
/// input entries and `X` their total.
///
/// On each cycle the side (odd or even edges) with the smaller input weight
/// loses value and the other gains; ties go to the even side.
pub fn cycle_round(f: &FractionalMatrix) -> RoundingSample {
    let a = &f.entries;
    let mut c = a.clone();
    while let Some(cycle) = find_cycle(&c) {
        let (mut odd_w, mut even_w) = (Rational::zero(), Rational::zero());
        for (k, &(i, j)) in cycle.iter().enumerate() {
            if k % 2 == 0 {
                odd_w += &a[i][j];
            } else {
                even_w += &a[i][j];
            }
        }
        let raise_odd = odd_w > even_w;
        let eps = max_step(&c, &cycle, raise_odd);
        shift(&mut c, &cycle, &eps, raise_odd);
    }
    let sample = RoundingSample { bits: to_bits(&c), seed: None, provenance: Provenance::Cycle };
    let x = f.total();
    let n2 = Rational::from_integer((f.n * f.n).into());
    assert!(sample.weighted_sum(a) >= &x * &x / n2, "average bound violated");
    sample
}

/// Randomised rounding: each bit is 1 with probability equal to its input
/// entry, margins are preserved on every sample, and the output is a pure
/// function of `(f, seed)`.
///
/// On each cycle, with `alpha` the step that raises odd edges and `beta` the
/// step that lowers them, raise by `alpha` with probability
/// `beta / (alpha + beta)` and otherwise lower by `beta`.
pub fn dependent_round(f: &FractionalMatrix, seed: u64) -> RoundingSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = f.entries.clone();
    while let Some(cycle) = find_cycle(&c) {
        let alpha = max_step(&c, &cycle, true);
        let beta = max_step(&c, &cycle, false);
        let p_raise = &beta / (&alpha + &beta);
        if bernoulli_u64(rng.next_u64(), &p_raise) {
            shift(&mut c, &cycle, &alpha, true);
        } else {
            shift(&mut c, &cycle, &beta, false);
        }
    }
    RoundingSample { bits: to_bits(&c), seed: Some(seed), provenance: Provenance::Dependent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::from_ints;
    use crate::rational::ratio;

    fn second_stage() -> FractionalMatrix {
        FractionalMatrix::new(from_ints(&[&[3, 2, 3], &[3, 3, 2], &[2, 3, 3]], 4)).unwrap()
    }

    #[test]
    fn validation() {
        assert!(FractionalMatrix::new(vec![vec![ratio(3, 2)]]).is_err());
        assert!(FractionalMatrix::new(from_ints(&[&[1, 1], &[1, 0]], 2)).is_err());
        assert!(FractionalMatrix::new(from_ints(&[&[1, 0], &[1, 1]], 2)).is_err());
        assert!(FractionalMatrix::new(vec![]).is_err());
        let f = FractionalMatrix::fractional_parts(&from_ints(&[&[6, 4, 6], &[6, 6, 4], &[4, 6, 6]], 8)).unwrap();
        assert_eq!(f, second_stage());
    }

    #[test]
    fn integral_input_is_unchanged() {
        let f = FractionalMatrix::new(from_ints(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 0]], 1)).unwrap();
        let want = vec![vec![1, 0, 1], vec![0, 1, 1], vec![1, 1, 0]];
        assert_eq!(cycle_round(&f).bits, want);
        for seed in 0..5 {
            assert_eq!(dependent_round(&f, seed).bits, want);
        }
    }

    #[test]
    fn halves_round_to_a_permutation() {
        let f = FractionalMatrix::new(from_ints(&[&[1, 1], &[1, 1]], 2)).unwrap();
        let s = cycle_round(&f);
        assert!(s.bits == vec![vec![1, 0], vec![0, 1]] || s.bits == vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(s.weighted_sum(f.entries()), Rational::one());
    }

    #[test]
    fn second_stage_margins() {
        let f = second_stage();
        let s = cycle_round(&f);
        assert_eq!(s.row_sums(), vec![2, 2, 2]);
        assert_eq!(s.col_sums(), vec![2, 2, 2]);
        for seed in 0..50 {
            let s = dependent_round(&f, seed);
            assert_eq!(s.row_sums(), vec![2, 2, 2]);
            assert_eq!(s.col_sums(), vec![2, 2, 2]);
        }
    }

    #[test]
    fn first_cycle_follows_lowest_indices() {
        let c = second_stage().entries;
        // (0,0) -> col 0 -> (1,0) -> row 1 -> (1,1) -> col 1 -> (0,1) -> row 0
        assert_eq!(find_cycle(&c).unwrap(), vec![(0, 0), (1, 0), (1, 1), (0, 1)]);
    }

    #[test]
    fn dependent_is_deterministic_per_seed() {
        let f = second_stage();
        assert_eq!(dependent_round(&f, 7), dependent_round(&f, 7));
    }
}
