//! Named demand matrices: separation examples, upper-bound counterexample
//! families and the worked examples used to illustrate the constructions.

use std::fmt;
use std::str::FromStr;

use num_traits::One;
use thiserror::Error;

use crate::matrix::{from_ints, DemandMatrix};
use crate::rational::{int, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameter out of range for family {family}: {reason}")]
    ParamOutOfRange { family: &'static str, reason: String },
    #[error("unknown matrix family {0:?}")]
    UnknownFamily(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatrixFamily {
    /// `[[1/2, 1/2], [1/2, 1/2]]`.
    M1,
    /// `[[9/10, 1/10], [1/10, 9/10]]`.
    M2,
    /// `[[1-e, e], [e, 1-e]]` with `e = kappa - 5/6`; requires `5/6 < kappa <= 1`.
    StrongUpper { kappa: Rational },
    /// Diagonal `1 - d`, off-diagonal `d / (n-1)` with
    /// `d = min((kappa - n/(2n-1)) / 2, 1/(2n-1))`; requires `n >= 2` and
    /// `n/(2n-1) < kappa <= 1`.
    DirectUpper { n: usize, kappa: Rational },
    /// `(1/9) [[5, 4], [4, 5]]`.
    WeakUpper2x2,
    /// Checkerboard of `2.5` and `1.5` over `2n-1` with the diagonal reduced
    /// by `a`/`b` (`a = b = 1` for even `n`, `a = 1.5`, `b = 0.5` for odd `n`).
    WeakDirectUpper { n: usize },
    /// The 3x3 worked example of the two-hop second stage.
    FigSecondStage,
    /// The 3x3 worked example of the max-cost-flow reduction.
    FigFlowExample,
    Uniform { n: usize },
}

impl MatrixFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            MatrixFamily::M1 => "m1",
            MatrixFamily::M2 => "m2",
            MatrixFamily::StrongUpper { .. } => "strong-upper",
            MatrixFamily::DirectUpper { .. } => "direct-upper",
            MatrixFamily::WeakUpper2x2 => "weak-upper-2x2",
            MatrixFamily::WeakDirectUpper { .. } => "weak-direct-upper",
            MatrixFamily::FigSecondStage => "fig-second-stage",
            MatrixFamily::FigFlowExample => "fig-flow-example",
            MatrixFamily::Uniform { .. } => "uniform",
        }
    }

    /// Builds a family from its tag plus optional `n` and `kappa`.
    pub fn from_tag(tag: &str, n: Option<usize>, kappa: Option<Rational>) -> Result<Self, FamilyError> {
        let need_n = |family: &'static str| {
            n.ok_or_else(|| FamilyError::ParamOutOfRange { family, reason: "missing n".into() })
        };
        let need_kappa = |family: &'static str| {
            kappa.clone().ok_or_else(|| FamilyError::ParamOutOfRange { family, reason: "missing kappa".into() })
        };
        Ok(match tag {
            "m1" => MatrixFamily::M1,
            "m2" => MatrixFamily::M2,
            "strong-upper" => MatrixFamily::StrongUpper { kappa: need_kappa("strong-upper")? },
            "direct-upper" => MatrixFamily::DirectUpper { n: need_n("direct-upper")?, kappa: need_kappa("direct-upper")? },
            "weak-upper-2x2" => MatrixFamily::WeakUpper2x2,
            "weak-direct-upper" => MatrixFamily::WeakDirectUpper { n: need_n("weak-direct-upper")? },
            "fig-second-stage" => MatrixFamily::FigSecondStage,
            "fig-flow-example" => MatrixFamily::FigFlowExample,
            "uniform" => MatrixFamily::Uniform { n: need_n("uniform")? },
            other => return Err(FamilyError::UnknownFamily(other.into())),
        })
    }
}

impl fmt::Display for MatrixFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixFamily::StrongUpper { kappa } => write!(f, "strong-upper(kappa={kappa})"),
            MatrixFamily::DirectUpper { n, kappa } => write!(f, "direct-upper(n={n},kappa={kappa})"),
            MatrixFamily::WeakDirectUpper { n } => write!(f, "weak-direct-upper(n={n})"),
            MatrixFamily::Uniform { n } => write!(f, "uniform(n={n})"),
            other => f.write_str(other.tag()),
        }
    }
}

impl FromStr for MatrixFamily {
    type Err = FamilyError;

    /// Accepts parameterless tags only; use [`MatrixFamily::from_tag`] for the rest.
    fn from_str(s: &str) -> Result<Self, FamilyError> {
        MatrixFamily::from_tag(s, None, None)
    }
}

fn out_of_range(family: &'static str, reason: impl Into<String>) -> FamilyError {
    FamilyError::ParamOutOfRange { family, reason: reason.into() }
}

/// Instantiates the matrix of a named family. The result is validated.
pub fn paper_matrix(family: &MatrixFamily) -> Result<DemandMatrix, FamilyError> {
    let raw = match family {
        MatrixFamily::M1 => from_ints(&[&[1, 1], &[1, 1]], 2),
        MatrixFamily::M2 => from_ints(&[&[9, 1], &[1, 9]], 10),
        MatrixFamily::StrongUpper { kappa } => {
            let lower = ratio(5, 6);
            if kappa <= &lower || kappa > &Rational::one() {
                return Err(out_of_range("strong-upper", format!("kappa = {kappa} must satisfy 5/6 < kappa <= 1")));
            }
            let eps = kappa - lower;
            let keep = Rational::one() - &eps;
            vec![vec![keep.clone(), eps.clone()], vec![eps, keep]]
        }
        MatrixFamily::DirectUpper { n, kappa } => {
            let n = *n;
            if n < 2 {
                return Err(out_of_range("direct-upper", "n must be at least 2"));
            }
            let r = (2 * n - 1) as i64;
            let bound = ratio(n as i64, r);
            if kappa <= &bound || kappa > &Rational::one() {
                return Err(out_of_range("direct-upper", format!("kappa = {kappa} must satisfy {bound} < kappa <= 1")));
            }
            let eps = kappa - &bound;
            let half = &eps / int(2);
            let cap = ratio(1, r);
            let delta = if half < cap { half } else { cap };
            let diag = Rational::one() - &delta;
            let off = &delta / int(n as i64 - 1);
            (0..n).map(|i| (0..n).map(|j| if i == j { diag.clone() } else { off.clone() }).collect()).collect()
        }
        MatrixFamily::WeakUpper2x2 => from_ints(&[&[5, 4], &[4, 5]], 9),
        MatrixFamily::WeakDirectUpper { n } => {
            let n = *n;
            if n == 0 {
                return Err(out_of_range("weak-direct-upper", "n must be positive"));
            }
            // work in halves: 2.5 -> 5, 1.5 -> 3
            let (a, b) = if n % 2 == 0 { (2, 2) } else { (3, 1) };
            let den = 2 * (2 * n as i64 - 1);
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let v = if i == j {
                                5 - if i % 2 == 0 { a } else { b }
                            } else if (i + j) % 2 == 0 {
                                5
                            } else {
                                3
                            };
                            ratio(v, den)
                        })
                        .collect()
                })
                .collect()
        }
        MatrixFamily::FigSecondStage => from_ints(&[&[3, 2, 3], &[3, 3, 2], &[2, 3, 3]], 8),
        MatrixFamily::FigFlowExample => from_ints(&[&[16, 12, 72], &[12, 84, 4], &[72, 4, 24]], 100),
        MatrixFamily::Uniform { n } => {
            if *n == 0 {
                return Err(out_of_range("uniform", "n must be positive"));
            }
            return Ok(DemandMatrix::uniform(*n));
        }
    };
    Ok(DemandMatrix::new(raw).expect("family matrices are doubly stochastic"))
}

/// Every parameterless family plus representative members of the
/// parameterised ones at the given `n` (used by test corpora and `bench`).
pub fn families_at(n: usize) -> Vec<MatrixFamily> {
    let mut out = Vec::new();
    if n == 2 {
        out.extend([
            MatrixFamily::M1,
            MatrixFamily::M2,
            MatrixFamily::WeakUpper2x2,
            MatrixFamily::StrongUpper { kappa: ratio(9, 10) },
        ]);
    }
    if n == 3 {
        out.extend([MatrixFamily::FigSecondStage, MatrixFamily::FigFlowExample]);
    }
    if n >= 2 {
        let r = 2 * n as i64 - 1;
        out.push(MatrixFamily::DirectUpper { n, kappa: ratio(n as i64, r) + ratio(1, 10 * r) });
    }
    out.push(MatrixFamily::WeakDirectUpper { n });
    out.push(MatrixFamily::Uniform { n });
    out
}
