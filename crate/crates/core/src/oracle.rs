//! Brute-force reference computations for tests. Everything here is recomputed from the raw
//! definitions on small finite data and shares no code with the detectors beyond Minkowski
//! predicates.

use std::collections::BTreeSet;

use crate::family::{Family, Scenario};
use crate::geometry::{leq_m, lt_m, slr_m, Point4};
use crate::model::{MbsModel, Splitting};
use crate::structure::TransitionSet;

/// Finite sample of an MBS: grid points crossed with named scenarios, glued where scenarios agree.
#[derive(Clone, Debug)]
pub struct FiniteWorld {
    pub points: Vec<Point4>,
    pub scenarios: Vec<String>,
    /// Class index of (point i, scenario j) at `class[i][j]`.
    pub class: Vec<Vec<usize>>,
    /// Representative (point, scenario) of each class.
    pub reps: Vec<(usize, usize)>,
    leq: Vec<Vec<bool>>,
}

fn sites_of<'a>(m: &'a MbsModel, a: &str, b: &str) -> Vec<&'a Point4> {
    match &m.splitting {
        Splitting::Explicit(pairs) => pairs
            .iter()
            .filter(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
            .flat_map(|p| p.sites.samples.iter())
            .collect(),
        Splitting::Indexed(_) => Vec::new(),
    }
}

/// x lies in the overlap region of scenarios a and b.
fn in_overlap(m: &MbsModel, x: &Point4, a: &str, b: &str) -> bool {
    a == b || !sites_of(m, a, b).iter().any(|c| lt_m(c, x))
}

impl FiniteWorld {
    /// Only explicit models whose site families are finite samples.
    pub fn new(m: &MbsModel, scenarios: &[String], points: &[Point4]) -> FiniteWorld {
        let mut class = vec![vec![usize::MAX; scenarios.len()]; points.len()];
        let mut reps = Vec::new();
        for (i, x) in points.iter().enumerate() {
            for j in 0..scenarios.len() {
                if class[i][j] != usize::MAX {
                    continue;
                }
                // points may repeat in the grid: glue equal locations too
                let id = reps.len();
                reps.push((i, j));
                for (i2, y) in points.iter().enumerate() {
                    if y != x {
                        continue;
                    }
                    for j2 in 0..scenarios.len() {
                        if in_overlap(m, x, &scenarios[j], &scenarios[j2]) {
                            class[i2][j2] = id;
                        }
                    }
                }
            }
        }
        let n = reps.len();
        let mut leq = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                let (xa, sa) = reps[a];
                let (xb, sb) = reps[b];
                leq[a][b] = leq_m(&points[xa], &points[xb]) && in_overlap(m, &points[xa], &scenarios[sa], &scenarios[sb]);
            }
        }
        FiniteWorld { points: points.to_vec(), scenarios: scenarios.to_vec(), class, reps, leq }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    fn directed(&self, set: &[usize]) -> bool {
        set.iter().all(|&a| set.iter().all(|&b| set.iter().any(|&c| self.leq(a, c) && self.leq(b, c))))
    }

    /// Maximal upward-directed subsets. Exhaustive over all subsets when the world has at most
    /// `exhaustive_limit` elements, otherwise the down-sets of maximal elements (a finite directed
    /// set has a greatest element).
    pub fn histories(&self, exhaustive_limit: usize) -> Vec<BTreeSet<usize>> {
        let n = self.len();
        if n <= exhaustive_limit {
            let mut directed: Vec<u64> = Vec::new();
            for mask in 1u64..(1u64 << n) {
                let set: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                if self.directed(&set) {
                    directed.push(mask);
                }
            }
            let maximal: Vec<u64> =
                directed.iter().copied().filter(|&d| !directed.iter().any(|&e| e != d && e & d == d)).collect();
            let mut out: Vec<BTreeSet<usize>> =
                maximal.into_iter().map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect();
            out.sort();
            return out;
        }
        let mut out: Vec<BTreeSet<usize>> = (0..n)
            .filter(|&m| !(0..n).any(|o| o != m && self.leq(m, o) && !self.leq(o, m)))
            .map(|m| (0..n).filter(|&a| self.leq(a, m)).collect())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The classes met by scenario j.
    pub fn scenario_history(&self, j: usize) -> BTreeSet<usize> {
        (0..self.points.len()).map(|i| self.class[i][j]).collect()
    }
}

/// FINFB by enumerating every ordered pair of disjoint nonempty subsets.
pub fn brute_finfb(ts: &TransitionSet) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = ts.len();
    let fam = ts.family();
    let empty = |idx: &[usize]| fam.is_empty(&ts.meet_of(idx));
    for a in 1u32..(1u32 << n) {
        for b in 1u32..(1u32 << n) {
            if a & b != 0 || a > b {
                continue;
            }
            let va: Vec<usize> = (0..n).filter(|i| a >> i & 1 == 1).collect();
            let vb: Vec<usize> = (0..n).filter(|i| b >> i & 1 == 1).collect();
            if !va.iter().all(|&i| vb.iter().all(|&j| ts.slr(i, j))) {
                continue;
            }
            let all: Vec<usize> = va.iter().chain(vb.iter()).copied().collect();
            if !empty(&va) && !empty(&vb) && empty(&all) {
                return Some((va, vb));
            }
        }
    }
    None
}

/// Combinatorial FB over an explicit family, history by history: equal initials carry equal
/// outcomes, an outcome at e contains every history through a later initial, incomparable initials
/// share a history, and no history lies in every outcome.
pub fn brute_cfb(ts: &TransitionSet) -> bool {
    let fam = ts.family();
    let Family::Explicit(names) = fam else { return false };
    let hs: Vec<Scenario> = names.iter().map(|n| Scenario::Named(n.clone())).collect();
    let st = &ts.structure;
    let n = ts.len();
    for i in 0..n {
        for j in 0..n {
            let (ti, tj) = (&ts.transitions[i], &ts.transitions[j]);
            if ti.event == tj.event && hs.iter().any(|h| fam.member(&ti.outcome, h) != fam.member(&tj.outcome, h)) {
                return false;
            }
            if st.lt(ti.event, tj.event)
                && hs.iter().any(|h| fam.member(&st.events[tj.event].histories, h) && !fam.member(&ti.outcome, h))
            {
                return false;
            }
            let (ei, ej) = (ti.event, tj.event);
            let incomparable = ei != ej && !st.lt(ei, ej) && !st.lt(ej, ei);
            let (hi, hj) = (&st.events[ei].histories, &st.events[ej].histories);
            if incomparable && !hs.iter().any(|h| fam.member(hi, h) && fam.member(hj, h)) {
                return false;
            }
        }
    }
    !hs.iter().any(|h| ts.transitions.iter().all(|t| fam.member(&t.outcome, h)))
}

/// Every two of the points are SLR.
pub fn pairwise_slr(points: &[Point4]) -> bool {
    points.iter().enumerate().all(|(i, a)| points[i + 1..].iter().all(|b| slr_m(a, b)))
}
