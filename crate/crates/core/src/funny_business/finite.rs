//! Detectors over finite transition sets: FINFB by minimal inconsistent sets,
//! Belnap witnesses, combinatorial funny business, and the finite INFFB clauses.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{BinaryKind, Constraints, Family, HistSet, Label, Scenario};
use crate::structure::{Structure, Transition, TransitionSet};

use super::FbKind;

/// Largest transition count handled by the dense subset table.
pub const DENSE_LIMIT: usize = 20;
/// Largest transition count for the unpruned reference search.
pub const REFERENCE_LIMIT: usize = 10;
const SPARSE_BUDGET: usize = 4_000_000;

/// Outcome sets in a form cheap to intersect.
#[derive(Clone)]
enum Algebra {
    Mask(Vec<u128>),
    Packed { kind: BinaryKind, items: Vec<(u128, u128)> },
    General { family: Family, items: Vec<HistSet> },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Acc {
    Mask(u128),
    Packed { care: u128, val: u128, bad: bool },
}

fn packed(c: &Constraints) -> Option<(u128, u128)> {
    let fits = |s: &crate::indexset::IndexSet| s.is_finite() && s.max().is_none_or(|m| m < 128);
    if !fits(&c.zeros) || !fits(&c.ones) {
        return None;
    }
    let mut care = 0u128;
    let mut val = 0u128;
    for z in c.zeros.iter_below(128) {
        care |= 1 << z;
    }
    for o in c.ones.iter_below(128) {
        care |= 1 << o;
        val |= 1 << o;
    }
    Some((care, val))
}

impl Algebra {
    fn new(family: &Family, outcomes: &[&HistSet]) -> Algebra {
        match family {
            Family::Explicit(names) if names.len() <= 128 => Algebra::Mask(
                outcomes
                    .iter()
                    .map(|h| match h {
                        HistSet::Explicit(b) => b.iter().fold(0u128, |m, i| m | (1u128 << i)),
                        HistSet::Binary(_) => 0,
                    })
                    .collect(),
            ),
            Family::Binary(kind) => {
                let items: Option<Vec<(u128, u128)>> = outcomes
                    .iter()
                    .map(|h| match h {
                        HistSet::Binary(c) if c.conflicts().is_empty() => packed(c),
                        _ => None,
                    })
                    .collect();
                match items {
                    Some(items) => Algebra::Packed { kind: *kind, items },
                    None => Algebra::General { family: family.clone(), items: outcomes.iter().map(|h| (*h).clone()).collect() },
                }
            }
            _ => Algebra::General { family: family.clone(), items: outcomes.iter().map(|h| (*h).clone()).collect() },
        }
    }

    fn len(&self) -> usize {
        match self {
            Algebra::Mask(v) => v.len(),
            Algebra::Packed { items, .. } => items.len(),
            Algebra::General { items, .. } => items.len(),
        }
    }

    fn unit(&self) -> Acc {
        match self {
            Algebra::Mask(_) => Acc::Mask(u128::MAX),
            _ => Acc::Packed { care: 0, val: 0, bad: false },
        }
    }

    fn step(&self, a: Acc, i: usize) -> Acc {
        match (self, a) {
            (Algebra::Mask(v), Acc::Mask(m)) => Acc::Mask(m & v[i]),
            (Algebra::Packed { items, .. }, Acc::Packed { care, val, bad }) => {
                let (c, v) = items[i];
                let clash = (care & c) & (val ^ v) != 0;
                Acc::Packed { care: care | c, val: val | v, bad: bad || clash }
            }
            _ => unreachable!("general algebra has no packed accumulator"),
        }
    }

    fn nonempty(&self, a: Acc) -> bool {
        match (self, a) {
            (Algebra::Mask(_), Acc::Mask(m)) => m != 0,
            (Algebra::Packed { kind, .. }, Acc::Packed { care, val, bad }) => {
                if bad {
                    return false;
                }
                let zeros = care & !val;
                match kind {
                    BinaryKind::AtMostKZeros(k) => u64::from(zeros.count_ones()) <= *k,
                    BinaryKind::AllStrings(n) => *n >= 128 || zeros >> *n == 0,
                    BinaryKind::FinitelyManyZeros | BinaryKind::AllSequences => true,
                }
            }
            _ => unreachable!(),
        }
    }

    fn consistent_general(&self, idx: &[usize]) -> bool {
        match self {
            Algebra::General { family, items } => {
                let m = idx.iter().fold(family.universe(), |acc, &i| family.meet(&acc, &items[i]));
                !family.is_empty(&m)
            }
            _ => {
                let a = idx.iter().fold(self.unit(), |a, &i| self.step(a, i));
                self.nonempty(a)
            }
        }
    }

    fn consistent_mask(&self, mask: u64) -> bool {
        self.consistent_general(&bits(mask))
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// A FINFB witness: A1 and A2 are SLR, each jointly possible, the union impossible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinfbWitness {
    pub a1: Vec<usize>,
    pub a2: Vec<usize>,
    pub a1_points: Vec<String>,
    pub a2_points: Vec<String>,
    pub h_a1: String,
    pub h_a2: String,
    pub union_empty: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FinfbReport {
    pub verdict: FbKind,
    pub witness: Option<FinfbWitness>,
    pub engine: String,
    pub transitions: usize,
    pub minimal_inconsistent_sets: usize,
}

/// Non-SLR components of `m` (sorted indices); the one holding the minimum comes first.
fn split(ts: &TransitionSet, m: &[usize]) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut comp = vec![m[0]];
    let mut frontier = vec![m[0]];
    while let Some(a) = frontier.pop() {
        for &b in m {
            if !comp.contains(&b) && !ts.slr(a, b) {
                comp.push(b);
                frontier.push(b);
            }
        }
    }
    if comp.len() == m.len() {
        return None;
    }
    comp.sort_unstable();
    let rest: Vec<usize> = m.iter().copied().filter(|i| !comp.contains(i)).collect();
    Some((comp, rest))
}

fn witness_of(ts: &TransitionSet, a1: Vec<usize>, a2: Vec<usize>) -> FinfbWitness {
    let f = ts.family();
    let h = |a: &[usize]| f.witness(&ts.meet_of(a)).map(|s| s.to_string()).unwrap_or_default();
    let all: Vec<usize> = a1.iter().chain(&a2).copied().collect();
    FinfbWitness {
        a1_points: ts.names(&a1),
        a2_points: ts.names(&a2),
        h_a1: h(&a1),
        h_a2: h(&a2),
        union_empty: f.unsat_reason(&ts.meet_of(&all)).unwrap_or_else(|| "empty".into()),
        a1,
        a2,
    }
}

fn lex_key(mask: u64) -> (u32, Vec<usize>) {
    (mask.count_ones(), bits(mask))
}

/// Minimal inconsistent sets in size-then-lexicographic order, via the full subset table.
fn mis_dense(alg: &Algebra) -> Vec<u64> {
    let n = alg.len();
    let total = 1usize << n;
    let ok: Vec<bool> = if matches!(alg, Algebra::General { .. }) {
        (0..total as u64).map(|m| alg.consistent_mask(m)).collect()
    } else {
        let mut acc = vec![alg.unit(); total];
        let mut ok = vec![true; total];
        for m in 1..total {
            let low = m.trailing_zeros() as usize;
            acc[m] = alg.step(acc[m & (m - 1)], low);
            ok[m] = alg.nonempty(acc[m]);
        }
        ok
    };
    let mut out: Vec<u64> = (1..total)
        .filter(|&m| !ok[m] && (0..n).all(|i| m >> i & 1 == 0 || ok[m & !(1 << i)]))
        .map(|m| m as u64)
        .collect();
    out.sort_by_key(|&m| lex_key(m));
    out
}

/// Levelwise search extending consistent sets only; stops at the first splittable set.
fn first_split_sparse(ts: &TransitionSet, alg: &Algebra) -> Result<(Option<Vec<usize>>, usize)> {
    let n = alg.len();
    let mut level: Vec<Vec<usize>> = (0..n).filter(|&i| alg.consistent_general(&[i])).map(|i| vec![i]).collect();
    let mut found = 0;
    let mut work = 0usize;
    while !level.is_empty() {
        let known: HashSet<Vec<usize>> = level.iter().cloned().collect();
        let mut next = Vec::new();
        for s in &level {
            for j in s.last().unwrap() + 1..n {
                work += 1;
                if work > SPARSE_BUDGET {
                    return Err(Error::Unsupported(format!("subset search over {n} transitions exceeded its budget")));
                }
                let mut c = s.clone();
                c.push(j);
                if alg.consistent_general(&c) {
                    next.push(c);
                    continue;
                }
                let minimal = (0..c.len()).all(|k| {
                    let mut d = c.clone();
                    d.remove(k);
                    d.len() < s.len() || known.contains(&d)
                });
                if minimal {
                    found += 1;
                    if split(ts, &c).is_some() {
                        return Ok((Some(c), found));
                    }
                }
            }
        }
        level = next;
    }
    Ok((None, found))
}

fn algebra(ts: &TransitionSet) -> Algebra {
    let outs: Vec<&HistSet> = ts.transitions.iter().map(|t| &t.outcome).collect();
    Algebra::new(ts.family(), &outs)
}

/// FINFB check: the smallest (then lexicographically first) jointly impossible set whose
/// parts are SLR, found among minimal inconsistent sets.
pub fn check_finfb(ts: &TransitionSet) -> Result<FinfbReport> {
    let alg = algebra(ts);
    let n = ts.len();
    let (hit, count, engine) = if n <= DENSE_LIMIT && (n <= 14 || !matches!(alg, Algebra::General { .. })) {
        let mis = mis_dense(&alg);
        let hit = mis.iter().map(|&m| bits(m)).find(|m| split(ts, m).is_some());
        (hit, mis.len(), "dense")
    } else {
        let (hit, c) = first_split_sparse(ts, &alg)?;
        (hit, c, "levelwise")
    };
    let witness = hit.map(|m| {
        let (a1, a2) = split(ts, &m).expect("split checked");
        witness_of(ts, a1, a2)
    });
    Ok(FinfbReport {
        verdict: if witness.is_some() { FbKind::FINFB } else { FbKind::NONE },
        witness,
        engine: engine.into(),
        transitions: n,
        minimal_inconsistent_sets: count,
    })
}

/// Reference search over every pair of disjoint subsets, straight from the definition.
pub fn check_finfb_unpruned(ts: &TransitionSet) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = ts.len();
    if n > REFERENCE_LIMIT {
        return Err(Error::Unsupported(format!("reference search limited to {REFERENCE_LIMIT} transitions")));
    }
    let f = ts.family();
    let nonempty = |idx: &[usize]| !f.is_empty(&ts.meet_of(idx));
    let mut best: Option<((usize, Vec<usize>), (Vec<usize>, Vec<usize>))> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let (mut a1, mut a2) = (Vec::new(), Vec::new());
        let mut c = code;
        for i in 0..n {
            match c % 3 {
                1 => a1.push(i),
                2 => a2.push(i),
                _ => {}
            }
            c /= 3;
        }
        if a1.is_empty() || a2.is_empty() || a1[0] > a2[0] {
            continue;
        }
        if !a1.iter().all(|&a| a2.iter().all(|&b| ts.slr(a, b))) {
            continue;
        }
        let mut u: Vec<usize> = a1.iter().chain(&a2).copied().collect();
        u.sort_unstable();
        if !nonempty(&a1) || !nonempty(&a2) || nonempty(&u) {
            continue;
        }
        let key = (u.len(), u);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, (a1, a2)));
        }
    }
    Ok(best.map(|(_, w)| w))
}

/// Re-checks a FINFB witness against the transitions.
pub fn verify_finfb(ts: &TransitionSet, w: &FinfbWitness) -> std::result::Result<(), String> {
    let f = ts.family();
    if w.a1.is_empty() || w.a2.is_empty() {
        return Err("empty part".into());
    }
    for &a in &w.a1 {
        for &b in &w.a2 {
            if !ts.slr(a, b) {
                return Err(format!("{} and {} are not SLR", ts.name(a), ts.name(b)));
            }
        }
    }
    if f.is_empty(&ts.meet_of(&w.a1)) || f.is_empty(&ts.meet_of(&w.a2)) {
        return Err("a part is jointly impossible".into());
    }
    let u: Vec<usize> = w.a1.iter().chain(&w.a2).copied().collect();
    if !f.is_empty(&ts.meet_of(&u)) {
        return Err("the union is jointly possible".into());
    }
    Ok(())
}

/// Belnap's generalized primary SLR modal-correlation funny business, found from histories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BelnapWitness {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub h_a: String,
    pub h_b: String,
}

/// Histories to try as h_A: all of them when enumerable, otherwise none (the caller falls back).
fn enumerable_histories(f: &Family) -> Option<Vec<Scenario>> {
    match f {
        Family::Explicit(v) => Some(v.iter().cloned().map(Scenario::Named).collect()),
        Family::Binary(BinaryKind::AllStrings(n)) if *n <= 16 => Some(
            (0u64..1 << n)
                .map(|m| Scenario::Seq(Label::zeros_at((0..*n).filter(|i| m >> i & 1 == 1))))
                .collect(),
        ),
        _ => None,
    }
}

fn initial_history(ts: &TransitionSet, part: &[usize], pool: &Option<Vec<Scenario>>) -> Option<Scenario> {
    let f = ts.family();
    let fits = |h: &Scenario| part.iter().all(|&i| f.member(&ts.transitions[i].outcome, h));
    match pool {
        Some(v) => v.iter().find(|h| fits(h)).cloned(),
        None => f.witness(&ts.meet_of(part)).filter(|h| fits(h)),
    }
}

/// Π_A⟨h⟩: the meet of the possibilities containing h at the events of A.
fn possibility_meet(ts: &TransitionSet, part: &[usize], h: &Scenario) -> Option<HistSet> {
    let st = &ts.structure;
    let mut acc = st.family.universe();
    for &i in part {
        let ev = ts.transitions[i].event;
        let c = st.cell_of(ev, h)?;
        acc = st.family.meet(&acc, &st.events[ev].cells[c]);
    }
    Some(acc)
}

pub fn belnap_witness(ts: &TransitionSet) -> Result<Option<BelnapWitness>> {
    let n = ts.len();
    if n > REFERENCE_LIMIT {
        return Err(Error::Unsupported(format!("Belnap search limited to {REFERENCE_LIMIT} transitions")));
    }
    let pool = enumerable_histories(ts.family());
    let f = ts.family();
    let mut pairs: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        let mut c = code;
        for i in 0..n {
            match c % 3 {
                1 => a.push(i),
                2 => b.push(i),
                _ => {}
            }
            c /= 3;
        }
        if !a.is_empty() && !b.is_empty() && a[0] < b[0] {
            pairs.push((a, b));
        }
    }
    pairs.sort_by_key(|(a, b)| {
        let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
        u.sort_unstable();
        (u.len(), u, a.clone())
    });
    for (a, b) in pairs {
        if !a.iter().all(|&x| b.iter().all(|&y| ts.slr(x, y))) {
            continue;
        }
        let (Some(ha), Some(hb)) = (initial_history(ts, &a, &pool), initial_history(ts, &b, &pool)) else {
            continue;
        };
        let (Some(pa), Some(pb)) = (possibility_meet(ts, &a, &ha), possibility_meet(ts, &b, &hb)) else {
            continue;
        };
        if f.is_empty(&f.meet(&pa, &pb)) {
            return Ok(Some(BelnapWitness { a, b, h_a: ha.to_string(), h_b: hb.to_string() }));
        }
    }
    Ok(None)
}

/// Which combinatorial-consistency condition failed, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CfbReport {
    pub verdict: FbKind,
    pub combinatorially_consistent: bool,
    pub failed_condition: Option<String>,
    pub h_t_empty: bool,
    pub h_t: String,
}

pub fn check_cfb(ts: &TransitionSet) -> CfbReport {
    let st = &ts.structure;
    let f = ts.family();
    let mut failed = None;
    'outer: for (i, ti) in ts.transitions.iter().enumerate() {
        for (j, tj) in ts.transitions.iter().enumerate() {
            if i == j {
                continue;
            }
            let (ei, ej) = (ti.event, tj.event);
            if ei == ej {
                if !f.same(&ti.outcome, &tj.outcome) {
                    failed = Some(format!("(1) {} carries two different outcomes", ts.name(i)));
                    break 'outer;
                }
            } else if st.lt(ei, ej) {
                if !f.subset(&st.events[ej].histories, &ti.outcome) {
                    failed = Some(format!("(2) H({}) is not inside the outcome at {}", ts.name(j), ts.name(i)));
                    break 'outer;
                }
            } else if st.lt(ej, ei) {
                continue;
            } else if !st.slr(ei, ej) {
                failed = Some(format!("(4) {} and {} are incomparable but not SLR", ts.name(i), ts.name(j)));
                break 'outer;
            }
        }
    }
    let all: Vec<usize> = (0..ts.len()).collect();
    let ht = ts.meet_of(&all);
    let empty = f.is_empty(&ht);
    let cc = failed.is_none();
    CfbReport {
        verdict: if cc && empty { FbKind::CFB } else { FbKind::NONE },
        combinatorially_consistent: cc,
        failed_condition: failed,
        h_t_empty: empty,
        h_t: f.render(&ht),
    }
}

/// One clause of the INFFB definition with its evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub holds: bool,
    pub detail: String,
}

impl Clause {
    pub fn new(holds: bool, detail: impl Into<String>) -> Self {
        Clause { holds, detail: detail.into() }
    }
}

/// The four INFFB clauses. Clause 2 is read as joint possibility of the chosen outcomes on
/// every finite part; `clause_2_points` records the weaker reading (the points share a history).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InffbCertificate {
    pub verdict: FbKind,
    pub clause_1: Clause,
    pub clause_2: Clause,
    pub clause_2_points: Clause,
    pub clause_3: Clause,
    pub clause_4: Clause,
}

impl InffbCertificate {
    pub fn from_clauses(c1: Clause, c2: Clause, c2p: Clause, c3: Clause, c4: Clause) -> Self {
        let all = c1.holds && c2.holds && c3.holds && c4.holds;
        InffbCertificate {
            verdict: if all { FbKind::INFFB } else { FbKind::NONE },
            clause_1: c1,
            clause_2: c2,
            clause_2_points: c2p,
            clause_3: c3,
            clause_4: c4,
        }
    }
}

/// Clause (3): e < e' implies f(e') ⊆ f(e).
pub fn monotone_clause(ts: &TransitionSet) -> Clause {
    let st = &ts.structure;
    let f = ts.family();
    for (i, ti) in ts.transitions.iter().enumerate() {
        for (j, tj) in ts.transitions.iter().enumerate() {
            if st.lt(ti.event, tj.event) && !f.subset(&tj.outcome, &ti.outcome) {
                return Clause::new(false, format!("{} < {} but f({}) is not inside f({})", ts.name(i), ts.name(j), ts.name(j), ts.name(i)));
            }
        }
    }
    Clause::new(true, "outcomes shrink along the order")
}

/// INFFB on a finite transition set: clause (1) fails, the rest are evaluated for the record.
pub fn check_inffb_finite(ts: &TransitionSet) -> Result<InffbCertificate> {
    let f = ts.family();
    let events: HashSet<usize> = ts.transitions.iter().map(|t| t.event).collect();
    let c1 = Clause::new(false, format!("S has {} points", events.len()));
    let mis = if ts.len() <= DENSE_LIMIT {
        mis_dense(&algebra(ts)).first().map(|&m| bits(m))
    } else {
        None
    };
    let c2 = match &mis {
        Some(m) => Clause::new(false, format!("{{{}}} is jointly impossible", ts.names(m).join(", "))),
        None if ts.len() <= DENSE_LIMIT => Clause::new(true, "every subset is jointly possible"),
        None => Clause::new(true, "not searched"),
    };
    let pts: Vec<usize> = {
        let mut v: Vec<usize> = events.into_iter().collect();
        v.sort_unstable();
        v
    };
    let through = pts.iter().fold(f.universe(), |a, &e| f.meet(&a, &ts.structure.events[e].histories));
    let c2p = Clause::new(!f.is_empty(&through), format!("histories through all points: {}", f.render(&through)));
    let c3 = monotone_clause(ts);
    let all: Vec<usize> = (0..ts.len()).collect();
    let meet = ts.meet_of(&all);
    let c4 = Clause::new(f.is_empty(&meet), format!("joint outcome: {}", f.render(&meet)));
    Ok(InffbCertificate::from_clauses(c1, c2, c2p, c3, c4))
}

/// Result of checking every product function over a point set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub points: Vec<String>,
    pub product_functions: u64,
    pub with_finfb: u64,
    pub first: Option<(Vec<usize>, FinfbWitness)>,
}

/// Number of product functions over the points.
pub fn product_count(st: &Structure, points: &[usize]) -> Option<u64> {
    points.iter().try_fold(1u64, |acc, &p| acc.checked_mul(st.events[p].cells.len() as u64))
}

fn decode(st: &Structure, points: &[usize], mut code: u64) -> Vec<usize> {
    points
        .iter()
        .map(|&p| {
            let k = st.events[p].cells.len() as u64;
            let c = (code % k) as usize;
            code /= k;
            c
        })
        .collect()
}

/// FINFB over every product function on `points`; parallel over function codes, merged in code order.
pub fn scan_product_functions(st: &Structure, points: &[usize], jobs: usize) -> Result<ScanReport> {
    let total = product_count(st, points).filter(|&t| t <= 1 << 24).ok_or_else(|| {
        Error::Unsupported("too many product functions to scan".into())
    })?;
    let run = || -> Result<Vec<(u64, Option<FinfbWitness>)>> {
        (0..total)
            .into_par_iter()
            .map(|code| {
                let choice = decode(st, points, code);
                let ts = TransitionSet {
                    structure: st.clone(),
                    transitions: points
                        .iter()
                        .zip(&choice)
                        .map(|(&p, &c)| Transition { event: p, outcome: st.events[p].cells[c].clone() })
                        .collect(),
                };
                check_finfb(&ts).map(|r| (code, r.witness))
            })
            .collect()
    };
    let results = if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(run)?
    } else {
        run()?
    };
    let mut with = 0;
    let mut first = None;
    for (code, w) in results {
        if let Some(w) = w {
            with += 1;
            if first.is_none() {
                first = Some((decode(st, points, code), w));
            }
        }
    }
    Ok(ScanReport {
        points: points.iter().map(|&p| st.events[p].id.clone()).collect(),
        product_functions: total,
        with_finfb: with,
        first,
    })
}

/// Cause-like loci of x: events through all of x's histories with a possibility missing them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LociReport {
    pub point: String,
    pub loci: Vec<String>,
    pub finfb: Option<(Vec<String>, FinfbWitness)>,
    pub all_below: Option<bool>,
}

pub fn cause_like_loci(st: &Structure, x: usize, jobs: usize) -> Result<LociReport> {
    let f = &st.family;
    let hx = &st.events[x].histories;
    let loci: Vec<usize> = (0..st.len())
        .filter(|&e| {
            e != x
                && f.subset(hx, &st.events[e].histories)
                && st.events[e].cells.iter().any(|c| f.is_empty(&f.meet(c, hx)))
        })
        .collect();
    let mut pts = loci.clone();
    pts.push(x);
    let scan = scan_product_functions(st, &pts, jobs)?;
    let names = |v: &[usize]| v.iter().map(|&i| st.events[i].id.clone()).collect::<Vec<_>>();
    let (finfb, all_below) = match scan.first {
        Some((choice, w)) => {
            let desc = pts.iter().zip(&choice).map(|(&p, c)| format!("{}:{c}", st.events[p].id)).collect();
            (Some((desc, w)), None)
        }
        None => (None, Some(loci.iter().all(|&e| st.lt(e, x)))),
    };
    Ok(LociReport { point: st.events[x].id.clone(), loci: names(&loci), finfb, all_below })
}
