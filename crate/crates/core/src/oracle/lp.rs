//! Exact two-phase simplex over rationals.
//!
//! Dense tableau, Bland's rule for both entering and leaving variables, so the
//! method cannot cycle. Intended for the small multicommodity programs built by
//! the throughput oracles (a few thousand variables at most).

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` terms; repeated variables add up.
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("variable index {index} out of range for {num_vars} variables")]
    BadIndex { index: usize, num_vars: usize },
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub optimum: Rational,
    pub values: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, objective: vec![Rational::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn set_objective(&mut self, var: usize, coeff: Rational) {
        self.objective[var] = coeff;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint { terms, relation, rhs });
    }

    fn check(&self) -> Result<(), LpError> {
        for c in &self.constraints {
            if let Some(&(index, _)) = c.terms.iter().find(|(i, _)| *i >= self.num_vars) {
                return Err(LpError::BadIndex { index, num_vars: self.num_vars });
            }
        }
        Ok(())
    }
}

const PIVOT_LIMIT: usize = 1_000_000;

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// Reduced costs of the current objective; a positive entry can enter.
    reduced: Vec<Rational>,
    value: Rational,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let nonzero: Vec<usize> = (0..self.rows[r].len()).filter(|&j| !self.rows[r][j].is_zero()).collect();
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &j in &nonzero {
                row[j] -= &f * &prow[j];
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !self.reduced[e].is_zero() {
            let f = self.reduced[e].clone();
            for &j in &nonzero {
                self.reduced[j] -= &f * &prow[j];
            }
            self.value += &f * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = e;
        self.pivots += 1;
    }

    /// Runs Bland's rule over columns accepted by `allowed` until optimal.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> Result<(), LpError> {
        loop {
            if self.pivots > PIVOT_LIMIT {
                return Err(LpError::IterationLimit(PIVOT_LIMIT));
            }
            let Some(e) = (0..self.reduced.len()).find(|&j| allowed(j) && self.reduced[j].is_positive()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, e);
        }
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        self.reduced = cost.to_vec();
        self.value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (d, a) in self.reduced.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *d -= cb * a;
                }
            }
            self.value += cb * &self.rhs[i];
        }
    }
}

/// Solves `p` exactly, returning an optimal basic solution.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution, LpError> {
    p.check()?;
    let m = p.constraints.len();
    let n = p.num_vars;
    // Column layout: structural, then one slack/surplus per inequality, then
    // one artificial per row that lacks a slack basis column.
    let mut slack_of = vec![None; m];
    let mut next = n;
    let mut flipped = Vec::with_capacity(m);
    for (i, c) in p.constraints.iter().enumerate() {
        let negate = c.rhs.is_negative();
        let rel = match (c.relation, negate) {
            (Relation::Le, true) => Relation::Ge,
            (Relation::Ge, true) => Relation::Le,
            (r, _) => r,
        };
        flipped.push((negate, rel));
        if rel != Relation::Eq {
            slack_of[i] = Some(next);
            next += 1;
        }
    }
    let mut art_of = vec![None; m];
    for (i, &(_, rel)) in flipped.iter().enumerate() {
        if rel != Relation::Le {
            art_of[i] = Some(next);
            next += 1;
        }
    }
    let width = next;
    let first_art = art_of.iter().flatten().min().copied().unwrap_or(width);

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, c) in p.constraints.iter().enumerate() {
        let (negate, rel) = flipped[i];
        let mut row = vec![Rational::zero(); width];
        for (j, v) in &c.terms {
            if negate {
                row[*j] -= v;
            } else {
                row[*j] += v;
            }
        }
        if let Some(s) = slack_of[i] {
            row[s] = if rel == Relation::Le { Rational::one() } else { -Rational::one() };
        }
        if let Some(a) = art_of[i] {
            row[a] = Rational::one();
            basis.push(a);
        } else {
            basis.push(slack_of[i].expect("a <= row always has a slack"));
        }
        rows.push(row);
        rhs.push(if negate { -c.rhs.clone() } else { c.rhs.clone() });
    }

    let mut t = Tableau { rows, rhs, reduced: Vec::new(), value: Rational::zero(), basis, pivots: 0 };

    if first_art < width {
        let mut phase1 = vec![Rational::zero(); width];
        for c in phase1.iter_mut().skip(first_art) {
            *c = -Rational::one();
        }
        t.set_objective(&phase1);
        t.optimize(|_| true)?;
        if t.value.is_negative() {
            return Err(LpError::Infeasible);
        }
        // Drive zero-valued artificials out of the basis; rows where that is
        // impossible are linearly dependent and get dropped.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= first_art {
                if let Some(j) = (0..first_art).find(|&j| !t.rows[i][j].is_zero()) {
                    t.pivot(i, j);
                } else {
                    t.rows.remove(i);
                    t.rhs.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); width];
    cost[..n].clone_from_slice(&p.objective);
    t.set_objective(&cost);
    t.optimize(|j| j < first_art)?;

    let mut values = vec![Rational::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            values[b] = t.rhs[i].clone();
        }
    }
    Ok(LpSolution { optimum: t.value, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn one() -> Rational {
        Rational::one()
    }

    #[test]
    fn single_bound() {
        let mut p = LinearProgram::new(1);
        p.set_objective(0, one());
        p.add_constraint(vec![(0, one())], Relation::Le, ratio(3, 7));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.optimum, ratio(3, 7));
        assert_eq!(s.values, vec![ratio(3, 7)]);
    }

    #[test]
    fn box_with_coupling() {
        let mut p = LinearProgram::new(2);
        p.set_objective(0, one());
        p.set_objective(1, one());
        p.add_constraint(vec![(0, one())], Relation::Le, one());
        p.add_constraint(vec![(1, one())], Relation::Le, one());
        p.add_constraint(vec![(0, one()), (1, one())], Relation::Le, ratio(3, 2));
        assert_eq!(solve_lp(&p).unwrap().optimum, ratio(3, 2));
    }

    #[test]
    fn equalities_and_ge() {
        // max x - y  s.t.  x + y = 4, x - y >= -2, x <= 3
        let mut p = LinearProgram::new(2);
        p.set_objective(0, one());
        p.set_objective(1, -one());
        p.add_constraint(vec![(0, one()), (1, one())], Relation::Eq, int(4));
        p.add_constraint(vec![(0, one()), (1, -one())], Relation::Ge, int(-2));
        p.add_constraint(vec![(0, one())], Relation::Le, int(3));
        let s = solve_lp(&p).unwrap();
        assert_eq!(s.optimum, int(2));
        assert_eq!(s.values, vec![int(3), int(1)]);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut p = LinearProgram::new(2);
        p.set_objective(0, int(2));
        p.set_objective(1, one());
        p.add_constraint(vec![(0, one()), (1, one())], Relation::Eq, int(1));
        p.add_constraint(vec![(0, int(2)), (1, int(2))], Relation::Eq, int(2));
        assert_eq!(solve_lp(&p).unwrap().optimum, int(2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut p = LinearProgram::new(1);
        p.add_constraint(vec![(0, one())], Relation::Ge, int(2));
        p.add_constraint(vec![(0, one())], Relation::Le, int(1));
        assert_eq!(solve_lp(&p), Err(LpError::Infeasible));

        let mut p = LinearProgram::new(2);
        p.set_objective(0, one());
        p.add_constraint(vec![(0, one()), (1, -one())], Relation::Le, int(1));
        assert_eq!(solve_lp(&p), Err(LpError::Unbounded));
    }

    #[test]
    fn bad_index() {
        let mut p = LinearProgram::new(1);
        p.add_constraint(vec![(3, one())], Relation::Le, int(1));
        assert_eq!(solve_lp(&p), Err(LpError::BadIndex { index: 3, num_vars: 1 }));
    }

    #[test]
    fn degenerate_program_terminates() {
        // Beale's cycling example; Bland's rule must terminate at 1/20.
        let mut p = LinearProgram::new(4);
        for (j, c) in [ratio(3, 4), int(-150), ratio(1, 50), int(-6)].into_iter().enumerate() {
            p.set_objective(j, c);
        }
        p.add_constraint(
            vec![(0, ratio(1, 4)), (1, int(-60)), (2, ratio(-1, 25)), (3, int(9))],
            Relation::Le,
            int(0),
        );
        p.add_constraint(
            vec![(0, ratio(1, 2)), (1, int(-90)), (2, ratio(-1, 50)), (3, int(3))],
            Relation::Le,
            int(0),
        );
        p.add_constraint(vec![(2, one())], Relation::Le, one());
        assert_eq!(solve_lp(&p).unwrap().optimum, ratio(1, 20));
    }
}
