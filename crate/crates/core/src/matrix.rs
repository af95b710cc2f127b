//! Doubly stochastic demand matrices.

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{serde_grid, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix has no rows")]
    Empty,
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: Rational },
    #[error("row {row} sums to {actual}, expected 1")]
    RowSumMismatch { row: usize, actual: Rational },
    #[error("column {col} sums to {actual}, expected 1")]
    ColSumMismatch { col: usize, actual: Rational },
}

/// An `n x n` doubly stochastic matrix; entry `(i, j)` is the demand from
/// node `i` to node `j` in units of per-node capacity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandMatrix {
    n: usize,
    entries: Vec<Vec<Rational>>,
}

impl DemandMatrix {
    /// Validates a raw grid. Errors carry the exact offending value.
    pub fn new(raw: Vec<Vec<Rational>>) -> Result<Self, MatrixError> {
        let n = raw.len();
        if n == 0 {
            return Err(MatrixError::Empty);
        }
        for (row, r) in raw.iter().enumerate() {
            if r.len() != n {
                return Err(MatrixError::NotSquare { row, len: r.len(), n });
            }
        }
        for (row, r) in raw.iter().enumerate() {
            for (col, v) in r.iter().enumerate() {
                if v.is_negative() {
                    return Err(MatrixError::NegativeEntry { row, col, value: v.clone() });
                }
            }
        }
        let one = Rational::one();
        for (row, r) in raw.iter().enumerate() {
            let actual: Rational = r.iter().sum();
            if actual != one {
                return Err(MatrixError::RowSumMismatch { row, actual });
            }
        }
        for col in 0..n {
            let actual: Rational = raw.iter().map(|r| &r[col]).sum();
            if actual != one {
                return Err(MatrixError::ColSumMismatch { col, actual });
            }
        }
        Ok(Self { n, entries: raw })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Self { n, entries }
    }

    pub fn uniform(n: usize) -> Self {
        let v = Rational::new(1.into(), (n as i64).into());
        Self { n, entries: vec![vec![v; n]; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    /// Entry-wise product with a scalar; the result is a plain grid since it
    /// is no longer stochastic in general.
    pub fn scaled(&self, factor: &Rational) -> Vec<Vec<Rational>> {
        self.entries.iter().map(|r| r.iter().map(|v| v * factor).collect()).collect()
    }

    /// Support pairs `(i, j)` with positive demand, row-major.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| (i, j))).filter(move |&(i, j)| self.entries[i][j].is_positive())
    }
}

/// Random doubly stochastic matrix: a convex combination of `k` uniformly
/// drawn permutation matrices with integer weights in `1..=1000` normalised by
/// their sum. Deterministic for a fixed seed.
pub fn random_doubly_stochastic(n: usize, k: usize, seed: u64) -> DemandMatrix {
    assert!(n >= 1 && k >= 1, "random_doubly_stochastic needs n >= 1 and k >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::with_capacity(k);
    let mut perms = Vec::with_capacity(k);
    for _ in 0..k {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        perms.push(p);
        weights.push(rng.gen_range(1..=1000i64));
    }
    let total: i64 = weights.iter().sum();
    let mut entries = vec![vec![Rational::zero(); n]; n];
    for (p, w) in perms.iter().zip(&weights) {
        let w = Rational::new((*w).into(), total.into());
        for (i, &j) in p.iter().enumerate() {
            entries[i][j] += &w;
        }
    }
    DemandMatrix::new(entries).expect("convex combination of permutations is doubly stochastic")
}

/// Row and column sums of a grid.
pub fn margins(grid: &[Vec<Rational>]) -> (Vec<Rational>, Vec<Rational>) {
    let n = grid.len();
    let rows = grid.iter().map(|r| r.iter().sum()).collect();
    let cols = (0..n).map(|j| grid.iter().map(|r| &r[j]).sum()).collect();
    (rows, cols)
}

pub fn zero_grid(n: usize) -> Vec<Vec<Rational>> {
    vec![vec![Rational::zero(); n]; n]
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    n: usize,
    #[serde(with = "serde_grid")]
    entries: Vec<Vec<Rational>>,
}

impl Serialize for DemandMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixFile { n: self.n, entries: self.entries.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DemandMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = MatrixFile::deserialize(d)?;
        if file.entries.len() != file.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but found {} rows",
                file.n,
                file.entries.len()
            )));
        }
        DemandMatrix::new(file.entries).map_err(serde::de::Error::custom)
    }
}

/// Integer grid helper used by tests and generators.
pub fn from_ints(rows: &[&[i64]], den: i64) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&v| Rational::new(v.into(), den.into())).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn unit() -> Rational {
        int(1)
    }

    #[test]
    fn half_matrix_is_valid() {
        let m = DemandMatrix::new(from_ints(&[&[1, 1], &[1, 1]], 2)).unwrap();
        assert_eq!(m.n(), 2);
        assert_eq!(m.get(1, 0), &ratio(1, 2));
    }

    #[test]
    fn identity_is_valid() {
        for n in 1..5 {
            let id = DemandMatrix::identity(n);
            assert_eq!(DemandMatrix::new(id.rows().to_vec()).unwrap(), id);
        }
    }

    #[test]
    fn row_sum_mismatch_reports_exact_value() {
        let raw = vec![vec![ratio(3, 4), ratio(1, 2)], vec![ratio(1, 2), ratio(1, 2)]];
        assert_eq!(
            DemandMatrix::new(raw),
            Err(MatrixError::RowSumMismatch { row: 0, actual: ratio(5, 4) })
        );
    }

    #[test]
    fn column_and_sign_errors() {
        let raw = vec![vec![ratio(1, 2), ratio(1, 2)], vec![ratio(1, 4), ratio(3, 4)]];
        assert_eq!(DemandMatrix::new(raw), Err(MatrixError::ColSumMismatch { col: 0, actual: ratio(3, 4) }));
        let raw = vec![vec![ratio(3, 2), ratio(-1, 2)], vec![ratio(-1, 2), ratio(3, 2)]];
        assert!(matches!(DemandMatrix::new(raw), Err(MatrixError::NegativeEntry { row: 0, col: 1, .. })));
        assert_eq!(DemandMatrix::new(vec![]), Err(MatrixError::Empty));
        assert!(matches!(
            DemandMatrix::new(vec![vec![unit(), Rational::zero()]]),
            Err(MatrixError::NotSquare { .. })
        ));
    }

    #[test]
    fn random_single_cell_and_single_permutation() {
        assert_eq!(random_doubly_stochastic(1, 5, 0), DemandMatrix::identity(1));
        for seed in 0..20 {
            let m = random_doubly_stochastic(2, 1, seed);
            let swap = DemandMatrix::new(from_ints(&[&[0, 1], &[1, 0]], 1)).unwrap();
            assert!(m == DemandMatrix::identity(2) || m == swap);
        }
    }

    #[test]
    fn random_is_reproducible() {
        assert_eq!(random_doubly_stochastic(3, 4, 42), random_doubly_stochastic(3, 4, 42));
        let m = random_doubly_stochastic(3, 4, 42);
        assert!(DemandMatrix::new(m.rows().to_vec()).is_ok());
    }

    #[test]
    fn json_round_trip_with_decimal_input() {
        let text = r#"{"n": 2, "entries": [["0.9", "1/10"], ["0.1", "9/10"]]}"#;
        let m: DemandMatrix = serde_json::from_str(text).unwrap();
        assert_eq!(m.get(0, 0), &ratio(9, 10));
        let back = serde_json::to_string(&m).unwrap();
        assert_eq!(back, r#"{"n":2,"entries":[["9/10","1/10"],["1/10","9/10"]]}"#);
    }

    #[test]
    fn json_rejects_invalid_matrix() {
        let text = r#"{"n": 2, "entries": [["3/4", "1/2"], ["1/2", "1/2"]]}"#;
        let err = serde_json::from_str::<DemandMatrix>(text).unwrap_err();
        assert!(err.to_string().contains("5/4"));
    }
}
