//! Gadget mapping Exact Cover by 3-Sets to weak-throughput instances, the
//! witness topology and plan for a known cover, and a tiny brute-force X3C
//! solver.
//!
//! Universe elements are 1-based as in the usual X3C notation; set indices
//! (covers) are 0-based positions in [`X3CInstance::sets`].

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flow::FlowPlan;
use crate::matrix::{zero_grid, DemandMatrix};
use crate::rational::{floor, frac, int, ratio, serde_str, to_i64, Rational};
use crate::topology::{default_degree, Topology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("invalid X3C instance: {0}")]
    InvalidX3C(String),
    #[error("gadget sizes |A| = {a}, |B| = {b} must be non-negative")]
    NegativeGadgetSize { a: i64, b: i64 },
    #[error("not an exact cover: {0}")]
    NotACover(String),
}

/// Universe `{1..=N}` with `N = 3K`, and a family of 3-element subsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawX3C", into = "RawX3C")]
pub struct X3CInstance {
    universe: usize,
    sets: Vec<[usize; 3]>,
}

#[derive(Serialize, Deserialize)]
struct RawX3C {
    #[serde(rename = "N")]
    universe: usize,
    sets: Vec<Vec<usize>>,
}

impl TryFrom<RawX3C> for X3CInstance {
    type Error = ReductionError;

    fn try_from(raw: RawX3C) -> Result<Self, Self::Error> {
        let sets = raw
            .sets
            .into_iter()
            .enumerate()
            .map(|(k, s)| {
                <[usize; 3]>::try_from(s.as_slice())
                    .map_err(|_| ReductionError::InvalidX3C(format!("set {k} has {} elements, expected 3", s.len())))
            })
            .collect::<Result<_, _>>()?;
        X3CInstance::new(raw.universe, sets)
    }
}

impl From<X3CInstance> for RawX3C {
    fn from(inst: X3CInstance) -> Self {
        RawX3C { universe: inst.universe, sets: inst.sets.iter().map(|s| s.to_vec()).collect() }
    }
}

impl X3CInstance {
    pub fn new(universe: usize, sets: Vec<[usize; 3]>) -> Result<Self, ReductionError> {
        let bad = |msg: String| Err(ReductionError::InvalidX3C(msg));
        if universe == 0 || universe % 3 != 0 {
            return bad(format!("universe size {universe} is not a positive multiple of 3"));
        }
        for (k, s) in sets.iter().enumerate() {
            if let Some(x) = s.iter().find(|&&x| x == 0 || x > universe) {
                return bad(format!("set {k} contains {x}, outside 1..={universe}"));
            }
            if s[0] == s[1] || s[0] == s[2] || s[1] == s[2] {
                return bad(format!("set {k} = {s:?} repeats an element"));
            }
        }
        if sets.len() < universe / 3 {
            return bad(format!("{} sets cannot cover {universe} elements", sets.len()));
        }
        Ok(Self { universe, sets })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn sets(&self) -> &[[usize; 3]] {
        &self.sets
    }

    /// Number of sets in a cover, `N / 3`.
    pub fn k(&self) -> usize {
        self.universe / 3
    }

    /// Number of sets containing each element, indexed from 0.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut alpha = vec![0; self.universe];
        for s in &self.sets {
            for &x in s {
                alpha[x - 1] += 1;
            }
        }
        alpha
    }

    /// Checks that `cover` picks pairwise disjoint sets covering the universe.
    pub fn check_cover(&self, cover: &[usize]) -> Result<(), ReductionError> {
        let mut seen = vec![false; self.universe];
        for &k in cover {
            let s = self.sets.get(k).ok_or_else(|| ReductionError::NotACover(format!("no set with index {k}")))?;
            for &x in s {
                if std::mem::replace(&mut seen[x - 1], true) {
                    return Err(ReductionError::NotACover(format!("element {x} is covered twice")));
                }
            }
        }
        match seen.iter().position(|&c| !c) {
            Some(x) => Err(ReductionError::NotACover(format!("element {} is not covered", x + 1))),
            None => Ok(()),
        }
    }
}

/// Vertex layout of the gadget. Labels follow the order `s, t, u1, v1, ...,
/// uM, vM, y1..yN, a*, b*, z*, w1_1..wM_5`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layout {
    pub m: usize,
    pub universe: usize,
    pub a: usize,
    pub b: usize,
    pub z: usize,
}

impl Layout {
    pub fn n(&self) -> usize {
        2 + 2 * self.m + self.universe + self.a + self.b + self.z + 5 * self.m
    }
    pub fn s(&self) -> usize {
        0
    }
    pub fn t(&self) -> usize {
        1
    }
    pub fn u(&self, i: usize) -> usize {
        2 + 2 * i
    }
    pub fn v(&self, i: usize) -> usize {
        3 + 2 * i
    }
    /// Vertex of the 1-based element `x`.
    pub fn y(&self, x: usize) -> usize {
        2 + 2 * self.m + x - 1
    }
    pub fn a(&self, i: usize) -> usize {
        2 + 2 * self.m + self.universe + i
    }
    pub fn b(&self, i: usize) -> usize {
        self.a(self.a) + i
    }
    pub fn z(&self, i: usize) -> usize {
        self.b(self.b) + i
    }
    pub fn w(&self, i: usize, j: usize) -> usize {
        self.z(self.z) + 5 * i + j
    }

    pub fn labels(&self) -> Vec<String> {
        let mut out = vec!["s".to_string(), "t".to_string()];
        for i in 1..=self.m {
            out.push(format!("u{i}"));
            out.push(format!("v{i}"));
        }
        out.extend((1..=self.universe).map(|j| format!("y{j}")));
        out.extend((1..=self.a).map(|j| format!("a{j}")));
        out.extend((1..=self.b).map(|j| format!("b{j}")));
        out.extend((1..=self.z).map(|j| format!("z{j}")));
        for i in 1..=self.m {
            out.extend((1..=5).map(|j| format!("w{i}_{j}")));
        }
        out
    }
}

/// Output of [`x3c_to_instance`]. `scaled` holds the demands multiplied by
/// `n* = 2n-1`; `demand` is `scaled / n*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionArtifacts {
    pub demand: DemandMatrix,
    #[serde(skip)]
    pub scaled: Vec<Vec<Rational>>,
    #[serde(with = "serde_str")]
    pub kappa: Rational,
    pub n: usize,
    pub n_star: usize,
    #[serde(rename = "H", with = "serde_str")]
    pub h: Rational,
    #[serde(rename = "L", with = "serde_str")]
    pub l: Rational,
    pub layout: Layout,
    pub labels: Vec<String>,
}

impl ReductionArtifacts {
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

fn heavy_threshold() -> Rational {
    ratio(3, 4)
}

/// Direct hosting of a scaled demand: all of it when the fractional part is
/// at least 3/4, its integer part otherwise.
pub fn f_part(x: &Rational) -> Rational {
    if frac(x) >= heavy_threshold() {
        x.clone()
    } else {
        floor(x)
    }
}

/// Number of arcs spent on a scaled demand: `ceil` when the fractional part
/// is at least 3/4, `floor` otherwise.
pub fn g_part(x: &Rational) -> Rational {
    if frac(x) >= heavy_threshold() {
        x.ceil()
    } else {
        floor(x)
    }
}

/// Builds the gadget for `inst`.
///
/// Every element must lie in at least one set, since an element with no set
/// would need a negative demand towards `Z`.
pub fn x3c_to_instance(inst: &X3CInstance) -> Result<ReductionArtifacts, ReductionError> {
    let (m, nu, k) = (inst.sets.len() as i64, inst.universe as i64, inst.k() as i64);
    let (a, b) = (10 * (m - k), 5 * m + 5 * nu / 3 - 10 * k);
    if a < 0 || b < 0 {
        return Err(ReductionError::NegativeGadgetSize { a, b });
    }
    let alpha = inst.occurrences();
    if let Some(x) = alpha.iter().position(|&c| c == 0) {
        return Err(ReductionError::InvalidX3C(format!("element {} lies in no set", x + 1)));
    }
    let lay = Layout { m: m as usize, universe: inst.universe, a: a as usize, b: b as usize, z: (15 * m - 10 * k) as usize };
    let n = lay.n();
    let ns = default_degree(n) as i64;
    let n_star = int(ns);
    let zn = lay.z as i64;
    let mut d = zero_grid(n);

    let (s, t) = (lay.s(), lay.t());
    d[s][s] = int(ns - a - k);
    for i in 0..lay.m {
        d[s][lay.u(i)] = ratio(1, 2);
        d[s][lay.v(i)] = ratio(1, 2);
    }
    for i in 0..lay.a {
        d[s][lay.a(i)] = ratio(9, 10);
    }

    d[t][t] = int(ns - b - k);
    d[t][s] = int(k);
    for i in 0..lay.b {
        d[t][lay.b(i)] = int(1);
    }

    for (i, set) in inst.sets.iter().enumerate() {
        let (u, v) = (lay.u(i), lay.v(i));
        d[u][u] = &n_star - ratio(11, 2);
        d[u][v] = ratio(1, 2);
        for j in 0..5 {
            d[u][lay.w(i, j)] = int(1);
        }
        d[v][t] = ratio(1, 2);
        d[v][u] = ratio(1, 2);
        d[v][v] = int(ns - 4);
        for &x in set {
            d[v][lay.y(x)] = int(1);
            d[lay.y(x)][v] = ratio(5, 6);
        }
    }

    for x in 1..=lay.universe {
        let y = lay.y(x);
        let al = alpha[x - 1] as i64;
        d[y][t] = ratio(1, 6);
        d[y][y] = int(ns - al);
        for i in 0..lay.z {
            d[y][lay.z(i)] = ratio(al - 1, 6 * zn);
        }
    }

    for i in 0..lay.m {
        for j in 0..5 {
            let w = lay.w(i, j);
            d[w][w] = int(ns - 1);
            d[w][lay.u(i)] = ratio(9, 10);
            for l in 0..lay.z {
                d[w][lay.z(l)] = ratio(1, 10 * zn);
            }
        }
    }
    for i in 0..lay.a {
        let ai = lay.a(i);
        d[ai][ai] = int(ns - 1);
        d[ai][s] = int(1);
    }
    for i in 0..lay.b {
        let bi = lay.b(i);
        d[bi][bi] = int(ns - 1);
        d[bi][t] = ratio(9, 10);
        for l in 0..lay.z {
            d[bi][lay.z(l)] = ratio(1, 10 * zn);
        }
    }
    for i in 0..lay.z {
        let zi = lay.z(i);
        d[zi][zi] = &n_star - ratio(1, 10);
        for j in 0..lay.a {
            d[zi][lay.a(j)] = ratio(1, 10 * zn);
        }
        for j in 0..lay.m {
            d[zi][lay.v(j)] = ratio(1, 2 * zn);
        }
    }

    let h: Rational = d.iter().flatten().map(f_part).sum();
    let g_total: Rational = d.iter().flatten().map(g_part).sum();
    let total = int(n as i64 * ns);
    let l = &total - g_total;
    let kappa = (&h + &l * ratio(3, 4) + ratio(nu, 12)) / &total;
    let demand = DemandMatrix::new(d.iter().map(|row| row.iter().map(|x| x / &n_star).collect()).collect())
        .map_err(|e| ReductionError::InvalidX3C(format!("gadget demand is not doubly stochastic: {e}")))?;
    let labels = lay.labels();
    Ok(ReductionArtifacts { demand, scaled: d, kappa, n, n_star: ns as usize, h, l, layout: lay, labels })
}

/// Topology and plan hosting a `kappa` fraction of the gadget demand, built
/// from an exact cover (0-based set indices). Plan amounts are in per-node
/// capacity units, i.e. scaled demand divided by `n*`.
pub fn witness_from_cover(inst: &X3CInstance, cover: &[usize]) -> Result<(Topology, FlowPlan), ReductionError> {
    inst.check_cover(cover)?;
    let art = x3c_to_instance(inst)?;
    let lay = &art.layout;
    let n = art.n;
    let n_star = int(art.n_star as i64);
    let mut counts = vec![vec![0u32; n]; n];
    let mut plan = FlowPlan::new();
    let route = |plan: &mut FlowPlan, path: Vec<(usize, usize)>, scaled: Rational| plan.push(path, scaled / &n_star);

    for u in 0..n {
        for v in 0..n {
            let x = &art.scaled[u][v];
            let g = to_i64(&g_part(x)).expect("arc counts are small integers");
            if g >= 1 {
                counts[u][v] += g as u32;
                route(&mut plan, vec![(u, v)], f_part(x));
            }
        }
    }

    let half = ratio(1, 2);
    let mut covered_by = vec![usize::MAX; inst.universe];
    let (s, t) = (lay.s(), lay.t());
    for i in 0..lay.m {
        let (u, v) = (lay.u(i), lay.v(i));
        if cover.contains(&i) {
            for &x in &inst.sets[i] {
                covered_by[x - 1] = i;
            }
            counts[s][u] += 1;
            counts[u][v] += 1;
            counts[v][t] += 1;
            route(&mut plan, vec![(s, u)], half.clone());
            route(&mut plan, vec![(s, u), (u, v)], half.clone());
            route(&mut plan, vec![(u, v)], half.clone());
            route(&mut plan, vec![(v, t)], half.clone());
        } else {
            counts[u][v] += 1;
            counts[v][u] += 1;
            route(&mut plan, vec![(u, v)], half.clone());
            route(&mut plan, vec![(v, u)], half.clone());
            route(&mut plan, vec![(u, v), (v, u)], half.clone());
        }
    }
    for x in 1..=inst.universe {
        let v = lay.v(covered_by[x - 1]);
        route(&mut plan, vec![(lay.y(x), v), (v, t)], ratio(1, 6));
    }

    let g = Topology::new(counts, art.n_star as u32)
        .map_err(|e| ReductionError::NotACover(format!("witness is not {}-regular: {e}", art.n_star)))?;
    Ok((g, plan))
}

/// Exact cover by backtracking on the smallest uncovered element; returns
/// sorted 0-based set indices. Intended for small families.
pub fn brute_force_x3c(inst: &X3CInstance) -> Option<Vec<usize>> {
    fn go(inst: &X3CInstance, used: &mut Vec<bool>, chosen: &mut Vec<usize>) -> bool {
        let Some(x) = used.iter().position(|&c| !c) else { return true };
        for (k, set) in inst.sets.iter().enumerate() {
            if !set.contains(&(x + 1)) || set.iter().any(|&e| used[e - 1]) {
                continue;
            }
            for &e in set {
                used[e - 1] = true;
            }
            chosen.push(k);
            if go(inst, used, chosen) {
                return true;
            }
            chosen.pop();
            for &e in set {
                used[e - 1] = false;
            }
        }
        false
    }
    let mut used = vec![false; inst.universe];
    let mut chosen = Vec::new();
    go(inst, &mut used, &mut chosen).then(|| {
        chosen.sort_unstable();
        chosen
    })
}

/// Random instance with `universe` elements and `m` sets in which every
/// element appears at least once. With `planted`, the first `N/3` sets drawn
/// form an exact cover before the family is shuffled.
pub fn random_x3c(universe: usize, m: usize, planted: bool, seed: u64) -> Result<X3CInstance, ReductionError> {
    if universe == 0 || universe % 3 != 0 || m < universe / 3 {
        return Err(ReductionError::InvalidX3C(format!("cannot draw {m} sets over {universe} elements")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements: Vec<usize> = (1..=universe).collect();
    let draw = |rng: &mut ChaCha8Rng| {
        let mut s: Vec<usize> = elements.choose_multiple(rng, 3).copied().collect();
        s.sort_unstable();
        [s[0], s[1], s[2]]
    };
    let mut sets = Vec::with_capacity(m);
    if planted {
        let mut perm = elements.clone();
        perm.shuffle(&mut rng);
        for c in perm.chunks(3) {
            let mut s = c.to_vec();
            s.sort_unstable();
            sets.push([s[0], s[1], s[2]]);
        }
    }
    while sets.len() < m {
        sets.push(draw(&mut rng));
    }
    // Patch uncovered elements into random positions of random sets.
    let mut inst = X3CInstance { universe, sets };
    while let Some(x) = inst.occurrences().iter().position(|&c| c == 0) {
        let k = rng.gen_range(0..m);
        let mut s = inst.sets[k];
        let slot = rng.gen_range(0..3);
        s[slot] = x + 1;
        s.sort_unstable();
        if s[0] != s[1] && s[1] != s[2] {
            inst.sets[k] = s;
        }
    }
    inst.sets.shuffle(&mut rng);
    X3CInstance::new(universe, inst.sets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::margins;

    fn single() -> X3CInstance {
        X3CInstance::new(3, vec![[1, 2, 3]]).unwrap()
    }

    #[test]
    fn smallest_gadget() {
        let art = x3c_to_instance(&single()).unwrap();
        assert_eq!((art.layout.a, art.layout.b, art.layout.z), (0, 0, 5));
        assert_eq!(art.n, 17);
        assert_eq!(art.n_star, 33);
        assert_eq!(art.labels.len(), 17);
        assert_eq!(art.index_of("w1_5"), Some(16));
        let (rows, cols) = margins(&art.scaled);
        assert!(rows.iter().chain(&cols).all(|x| *x == int(33)));
        let total = int(17 * 33);
        assert_eq!(art.kappa, (&art.h + &art.l * ratio(3, 4) + ratio(3, 12)) / total);
        assert_eq!(art.l, int(3));
    }

    #[test]
    fn fixed_entries() {
        let art = x3c_to_instance(&single()).unwrap();
        let (s, u, v) = (art.index_of("s").unwrap(), art.index_of("u1").unwrap(), art.index_of("v1").unwrap());
        assert_eq!(art.demand.get(s, u), &ratio(1, 66));
        assert_eq!(art.demand.get(s, v), &ratio(1, 66));
        for j in 1..=5 {
            let w = art.index_of(&format!("w1_{j}")).unwrap();
            assert_eq!(art.demand.get(u, w), &ratio(1, 33));
        }
    }

    #[test]
    fn f_and_g() {
        assert_eq!(f_part(&ratio(9, 10)), ratio(9, 10));
        assert_eq!(g_part(&ratio(9, 10)), int(1));
        assert_eq!(f_part(&ratio(1, 2)), int(0));
        assert_eq!(g_part(&ratio(7, 2)), int(3));
        assert_eq!(g_part(&ratio(15, 4)), int(4));
    }

    #[test]
    fn covers() {
        let inst = X3CInstance::new(6, vec![[1, 2, 3], [3, 4, 5], [4, 5, 6]]).unwrap();
        assert_eq!(brute_force_x3c(&inst), Some(vec![0, 2]));
        assert!(matches!(inst.check_cover(&[0]), Err(ReductionError::NotACover(_))));
        assert!(matches!(inst.check_cover(&[0, 1]), Err(ReductionError::NotACover(_))));
        assert_eq!(brute_force_x3c(&single()), Some(vec![0]));
        let none = X3CInstance::new(6, vec![[1, 2, 3], [2, 4, 5], [3, 5, 6]]).unwrap();
        assert_eq!(brute_force_x3c(&none), None);
    }

    #[test]
    fn invalid_instances() {
        assert!(matches!(X3CInstance::new(3, vec![[1, 1, 2]]), Err(ReductionError::InvalidX3C(_))));
        assert!(matches!(X3CInstance::new(4, vec![[1, 2, 3]]), Err(ReductionError::InvalidX3C(_))));
        assert!(matches!(X3CInstance::new(3, vec![[1, 2, 4]]), Err(ReductionError::InvalidX3C(_))));
        let uncovered = X3CInstance::new(6, vec![[1, 2, 3], [1, 2, 4]]).unwrap();
        assert!(matches!(x3c_to_instance(&uncovered), Err(ReductionError::InvalidX3C(_))));
    }

    #[test]
    fn witness_for_single_set_hits_kappa() {
        use crate::oracle::{verify_flow_plan, HostingCheck};
        let inst = single();
        let (g, plan) = witness_from_cover(&inst, &[0]).unwrap();
        let art = x3c_to_instance(&inst).unwrap();
        let rep = verify_flow_plan(&g, &art.demand, &plan, &HostingCheck::GeneralWeak).unwrap();
        assert!(rep.feasible, "{:?}", rep.violations);
        assert_eq!(rep.served_fraction, art.kappa);
        assert!(matches!(witness_from_cover(&inst, &[]), Err(ReductionError::NotACover(_))));
    }

    #[test]
    fn json_format() {
        let inst: X3CInstance = serde_json::from_str(r#"{"N": 6, "sets": [[1,2,3],[4,5,6]]}"#).unwrap();
        assert_eq!(inst.sets(), &[[1, 2, 3], [4, 5, 6]]);
        assert_eq!(serde_json::to_string(&inst).unwrap(), r#"{"N":6,"sets":[[1,2,3],[4,5,6]]}"#);
        assert!(serde_json::from_str::<X3CInstance>(r#"{"N": 3, "sets": [[1,2]]}"#).is_err());
    }

    #[test]
    fn random_instances_are_valid() {
        for seed in 0..20 {
            let inst = random_x3c(9, 5, seed % 2 == 0, seed).unwrap();
            assert!(inst.occurrences().iter().all(|&c| c > 0));
            if seed % 2 == 0 {
                assert!(brute_force_x3c(&inst).is_some());
            }
        }
    }
}
