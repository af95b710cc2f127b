//! Directed regular multigraphs stored as arc-count matrices, and exhaustive
//! enumeration of all of them for small `n`.

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("topology has no nodes")]
    Empty,
    #[error("count matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("row {row} sums to {actual}, expected degree {degree}")]
    RowDegree { row: usize, actual: u64, degree: u32 },
    #[error("column {col} sums to {actual}, expected degree {degree}")]
    ColDegree { col: usize, actual: u64, degree: u32 },
}

/// A directed `degree`-regular multigraph on nodes `0..n`. `counts[i][j]` is
/// the number of parallel arcs `i -> j` (diagonal entries are self-loops).
/// Each arc carries capacity `1 / degree`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Topology {
    n: usize,
    degree: u32,
    counts: Vec<Vec<u32>>,
}

impl Topology {
    pub fn new(counts: Vec<Vec<u32>>, degree: u32) -> Result<Self, TopologyError> {
        let n = counts.len();
        if n == 0 {
            return Err(TopologyError::Empty);
        }
        if degree == 0 {
            return Err(TopologyError::ZeroDegree);
        }
        for (row, r) in counts.iter().enumerate() {
            if r.len() != n {
                return Err(TopologyError::NotSquare { row, len: r.len(), n });
            }
        }
        for (row, r) in counts.iter().enumerate() {
            let actual: u64 = r.iter().map(|&c| c as u64).sum();
            if actual != degree as u64 {
                return Err(TopologyError::RowDegree { row, actual, degree });
            }
        }
        for col in 0..n {
            let actual: u64 = counts.iter().map(|r| r[col] as u64).sum();
            if actual != degree as u64 {
                return Err(TopologyError::ColDegree { col, actual, degree });
            }
        }
        Ok(Self { n, degree, counts })
    }

    /// Topology with the default degree `2n - 1`.
    pub fn with_default_degree(counts: Vec<Vec<u32>>) -> Result<Self, TopologyError> {
        let degree = default_degree(counts.len());
        Self::new(counts, degree)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[i][j]
    }

    pub fn counts(&self) -> &[Vec<u32>] {
        &self.counts
    }

    /// Capacity of all parallel arcs `i -> j` together, `counts(i,j) / degree`.
    pub fn capacity(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.counts[i][j].into(), self.degree.into())
    }

    /// Arc classes with at least one arc, row-major.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| (i, j))).filter(move |&(i, j)| self.counts[i][j] > 0)
    }
}

pub fn default_degree(n: usize) -> u32 {
    (2 * n).saturating_sub(1) as u32
}

#[derive(Deserialize)]
struct TopologyFile {
    n: usize,
    degree: u32,
    counts: Vec<Vec<u32>>,
}

impl<'de> Deserialize<'de> for Topology {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let file = TopologyFile::deserialize(d)?;
        if file.counts.len() != file.n {
            return Err(serde::de::Error::custom(format!(
                "declared n = {} but found {} rows",
                file.n,
                file.counts.len()
            )));
        }
        Topology::new(file.counts, file.degree).map_err(serde::de::Error::custom)
    }
}

/// Lazily yields every `n x n` non-negative integer matrix whose rows and
/// columns all sum to `r`, each exactly once, in lexicographic row-major
/// order.
pub fn enumerate_regular_topologies(n: usize, r: u32) -> RegularTopologies {
    RegularTopologies::new(n, r)
}

pub struct RegularTopologies {
    n: usize,
    r: u32,
    cells: Vec<u32>,
    row_rem: Vec<u32>,
    col_rem: Vec<u32>,
    state: EnumState,
}

enum EnumState {
    Fresh,
    Yielded,
    Done,
}

impl RegularTopologies {
    fn new(n: usize, r: u32) -> Self {
        Self {
            n,
            r,
            cells: vec![0; n * n],
            row_rem: vec![r; n],
            col_rem: vec![r; n],
            state: if n == 0 { EnumState::Done } else { EnumState::Fresh },
        }
    }

    /// Feasible value range for cell `pos` given everything before it.
    fn bounds(&self, pos: usize) -> Option<(u32, u32)> {
        let (i, j) = (pos / self.n, pos % self.n);
        let later_cols: u32 = self.col_rem[j + 1..].iter().sum();
        let later_rows = (self.n - 1 - i) as u32 * self.r;
        let lo = self.row_rem[i].saturating_sub(later_cols).max(self.col_rem[j].saturating_sub(later_rows));
        let hi = self.row_rem[i].min(self.col_rem[j]);
        (lo <= hi).then_some((lo, hi))
    }

    fn set(&mut self, pos: usize, v: u32) {
        let (i, j) = (pos / self.n, pos % self.n);
        self.cells[pos] = v;
        self.row_rem[i] -= v;
        self.col_rem[j] -= v;
    }

    fn unset(&mut self, pos: usize) {
        let (i, j) = (pos / self.n, pos % self.n);
        let v = self.cells[pos];
        self.row_rem[i] += v;
        self.col_rem[j] += v;
        self.cells[pos] = 0;
    }

    /// Fills `from..` with the smallest feasible values.
    fn fill_min(&mut self, from: usize) {
        for pos in from..self.cells.len() {
            let (lo, _) = self.bounds(pos).expect("row-major prefix is always extendable");
            self.set(pos, lo);
        }
    }

    fn current(&self) -> Topology {
        let counts = self.cells.chunks(self.n).map(|c| c.to_vec()).collect();
        Topology { n: self.n, degree: self.r, counts }
    }

    fn advance(&mut self) -> bool {
        let mut pos = self.cells.len();
        while pos > 0 {
            pos -= 1;
            let v = self.cells[pos];
            self.unset(pos);
            if let Some((_, hi)) = self.bounds(pos) {
                if v < hi {
                    self.set(pos, v + 1);
                    self.fill_min(pos + 1);
                    return true;
                }
            }
        }
        false
    }
}

impl Iterator for RegularTopologies {
    type Item = Topology;

    fn next(&mut self) -> Option<Topology> {
        match self.state {
            EnumState::Done => None,
            EnumState::Fresh => {
                self.fill_min(0);
                self.state = EnumState::Yielded;
                Some(self.current())
            }
            EnumState::Yielded => {
                if self.advance() {
                    Some(self.current())
                } else {
                    self.state = EnumState::Done;
                    None
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn four_three_regular_graphs_on_two_nodes() {
        let all: Vec<_> = enumerate_regular_topologies(2, 3).collect();
        let counts: Vec<_> = all.iter().map(|t| t.counts().to_vec()).collect();
        assert_eq!(
            counts,
            vec![
                vec![vec![0, 3], vec![3, 0]],
                vec![vec![1, 2], vec![2, 1]],
                vec![vec![2, 1], vec![1, 2]],
                vec![vec![3, 0], vec![0, 3]],
            ]
        );
    }

    #[test]
    fn single_node_is_forced() {
        let all: Vec<_> = enumerate_regular_topologies(1, 5).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].counts(), &[vec![5]]);
    }

    #[test]
    fn degree_zero_yields_zero_matrix() {
        let all: Vec<_> = enumerate_regular_topologies(3, 0).collect();
        assert_eq!(all.len(), 1);
    }

    /// Count by choosing the first n-1 rows as compositions of r and forcing
    /// the last row from the column sums.
    fn margin_count_oracle(n: usize, r: u32) -> usize {
        fn compositions(r: u32, parts: usize) -> Vec<Vec<u32>> {
            if parts == 1 {
                return vec![vec![r]];
            }
            (0..=r)
                .flat_map(|v| {
                    compositions(r - v, parts - 1).into_iter().map(move |mut c| {
                        c.insert(0, v);
                        c
                    })
                })
                .collect()
        }
        let rows = compositions(r, n);
        fn go(rows: &[Vec<u32>], col_rem: Vec<i64>, left: usize) -> usize {
            if left == 1 {
                return usize::from(col_rem.iter().all(|&c| c >= 0));
            }
            rows.iter()
                .map(|row| {
                    let next: Vec<i64> = col_rem.iter().zip(row).map(|(c, &v)| c - v as i64).collect();
                    if next.iter().any(|&c| c < 0) {
                        0
                    } else {
                        go(rows, next, left - 1)
                    }
                })
                .sum()
        }
        go(&rows, vec![r as i64; n], n)
    }

    #[test]
    fn counts_match_margin_oracle() {
        for (n, r) in [(2, 3), (3, 5), (3, 2), (4, 3), (2, 0)] {
            let all: Vec<_> = enumerate_regular_topologies(n, r).collect();
            assert_eq!(all.len(), margin_count_oracle(n, r), "n={n} r={r}");
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), all.len());
            for t in &all {
                assert!(Topology::new(t.counts().to_vec(), r.max(1)).is_ok() || r == 0);
            }
            let mut sorted: Vec<Vec<u32>> = all.iter().map(|t| t.counts().concat()).collect();
            let original = sorted.clone();
            sorted.sort();
            assert_eq!(sorted, original, "enumeration must be lexicographic");
        }
        assert_eq!(margin_count_oracle(3, 5), 231);
    }

    #[test]
    fn validation_errors() {
        assert_eq!(
            Topology::new(vec![vec![2, 1], vec![2, 1]], 3),
            Err(TopologyError::ColDegree { col: 0, actual: 4, degree: 3 })
        );
        assert_eq!(
            Topology::new(vec![vec![2, 2], vec![1, 1]], 3),
            Err(TopologyError::RowDegree { row: 0, actual: 4, degree: 3 })
        );
        assert!(Topology::with_default_degree(vec![vec![1, 2], vec![2, 1]]).is_ok());
    }

    #[test]
    fn json_format() {
        let t: Topology = serde_json::from_str(r#"{"n":2,"degree":3,"counts":[[1,2],[2,1]]}"#).unwrap();
        assert_eq!(t.count(0, 1), 2);
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"n":2,"degree":3,"counts":[[1,2],[2,1]]}"#);
        assert!(serde_json::from_str::<Topology>(r#"{"n":2,"degree":3,"counts":[[1,1],[2,1]]}"#).is_err());
    }
}
