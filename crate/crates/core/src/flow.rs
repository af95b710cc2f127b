//! Flow plans (explicit path/amount collections) and throughput reports.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{serde_grid, serde_str, Rational};

/// A directed walk of at least one arc, as consecutive `(from, to)` pairs.
pub type Path = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub path: Path,
    /// Amount in units of per-node capacity (an arc class `i -> j` carries at
    /// most `counts(i,j) / degree`).
    #[serde(with = "serde_str")]
    pub amount: Rational,
}

impl Route {
    pub fn new(path: Path, amount: Rational) -> Self {
        Self { path, amount }
    }

    pub fn source(&self) -> Option<usize> {
        self.path.first().map(|a| a.0)
    }

    pub fn target(&self) -> Option<usize> {
        self.path.last().map(|a| a.1)
    }

    /// Non-empty and every arc starts where the previous one ended.
    pub fn is_walk(&self) -> bool {
        !self.path.is_empty() && self.path.windows(2).all(|w| w[0].1 == w[1].0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowPlan {
    pub routes: Vec<Route>,
}

impl FlowPlan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, path: Path, amount: Rational) {
        self.routes.push(Route::new(path, amount));
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    /// Every amount multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> FlowPlan {
        FlowPlan {
            routes: self.routes.iter().map(|r| Route::new(r.path.clone(), &r.amount * factor)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    DirectStrict,
    DirectWeak,
    GeneralStrict,
    GeneralWeak,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::DirectStrict, Mode::DirectWeak, Mode::GeneralStrict, Mode::GeneralWeak];

    pub fn is_direct(self) -> bool {
        matches!(self, Mode::DirectStrict | Mode::DirectWeak)
    }

    pub fn is_weak(self) -> bool {
        matches!(self, Mode::DirectWeak | Mode::GeneralWeak)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::DirectStrict => "direct-strict",
            Mode::DirectWeak => "direct-weak",
            Mode::GeneralStrict => "general-strict",
            Mode::GeneralWeak => "general-weak",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown mode {0:?} (expected direct-strict, direct-weak, general-strict or general-weak)")]
pub struct ParseModeError(pub String);

impl FromStr for Mode {
    type Err = ParseModeError;

    fn from_str(s: &str) -> Result<Self, ParseModeError> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| ParseModeError(s.to_string()))
    }
}

/// Result of one throughput evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThroughputReport {
    pub mode: Mode,
    #[serde(with = "serde_str")]
    pub value: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<FlowPlan>,
    /// Served demand per ordered pair, in the same units as the matrix.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "serialize_opt_grid")]
    pub hosted: Option<Vec<Vec<Rational>>>,
}

fn serialize_opt_grid<S: serde::Serializer>(grid: &Option<Vec<Vec<Rational>>>, s: S) -> Result<S::Ok, S::Error> {
    match grid {
        Some(g) => serde_grid::serialize(g, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn walk_check() {
        assert!(Route::new(vec![(0, 1), (1, 0)], ratio(1, 9)).is_walk());
        assert!(!Route::new(vec![(0, 1), (0, 1)], ratio(1, 9)).is_walk());
        assert!(!Route::new(vec![], ratio(1, 9)).is_walk());
    }

    #[test]
    fn plan_json_format() {
        let mut plan = FlowPlan::new();
        plan.push(vec![(0, 1), (1, 0)], ratio(1, 9));
        let text = serde_json::to_string(&plan).unwrap();
        assert_eq!(text, r#"{"routes":[{"path":[[0,1],[1,0]],"amount":"1/9"}]}"#);
        let back: FlowPlan = serde_json::from_str(&text).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn modes_parse() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("strict".parse::<Mode>().is_err());
    }
}
