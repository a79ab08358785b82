//! ε-funny business, Postulate A, cone localization along a vertical line, and
//! Condition posC with the slab-by-slab chain construction.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{oracle, BinaryKind, Constraints, Family, HistSet, Label, Scenario};
use crate::geometry::{euclid_dist_sq, fmt_q, q, qi, vertical_threshold, Point4, Surd, Q};
use crate::indexset::IndexSet;
use crate::model::MbsModel;
use crate::sites::{SiteFamily, SiteSequence};
use crate::structure::TransitionSet;

use super::symbolic::{improper_choice, SymbolicPoints};
use super::{Clause, FbKind};

/// Radii always sampled in traces.
pub const DEFAULT_DELTAS: [(i64, i64); 3] = [(1, 1), (1, 2), (1, 4)];
const HALVINGS: usize = 160;

/// One neighborhood (or past-cone region) and the oracle's answer on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionCheck {
    pub radius: String,
    pub members: String,
    pub empty: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsReport {
    pub verdict: FbKind,
    pub e_star: Option<u64>,
    pub e_star_point: Option<Point4>,
    pub argument: String,
    pub trace: Vec<RegionCheck>,
    pub isolation: Vec<RegionCheck>,
}

struct Indexed<'a> {
    sp: SymbolicPoints,
    sites: &'a SiteFamily,
    rule: Label,
}

impl<'a> Indexed<'a> {
    fn new(model: &'a MbsModel, indices: &IndexSet, rule: &Label) -> Result<Indexed<'a>> {
        let sp = SymbolicPoints::from_model(model, indices)?;
        if let Some(n) = improper_choice(&sp, rule) {
            return Err(Error::Domain(format!("rule picks an empty outcome at site {n}")));
        }
        let sites = model.indexed_sites().expect("checked by from_model");
        Ok(Indexed { sp, sites, rule: rule.clone() })
    }

    fn m(&self) -> u64 {
        self.sites.samples.len() as u64
    }

    fn seq(&self) -> Option<&SiteSequence> {
        self.sites.sequences.first()
    }

    /// Sequence indices among the points.
    fn seq_part(&self) -> IndexSet {
        self.sp.indices.intersect(&IndexSet::range(self.m(), None))
    }

    fn samples(&self) -> Vec<u64> {
        self.sp.indices.iter_below(self.m()).collect()
    }

    fn bits(&self, set: &IndexSet) -> Constraints {
        self.sp.through.meet(&Constraints::agree(&self.rule, set))
    }

    fn check(&self, radius: String, set: &IndexSet) -> RegionCheck {
        match oracle(self.sp.kind, &self.bits(set)) {
            Ok(g) => RegionCheck { radius, members: set.to_string(), empty: false, detail: format!("contains {g}") },
            Err(u) => RegionCheck { radius, members: set.to_string(), empty: true, detail: u.to_string() },
        }
    }

    fn neighborhood(&self, p: &Point4, r2: &Q) -> Result<IndexSet> {
        Ok(self.sites.within(p, r2)?.intersect(&self.sp.indices))
    }

    /// Sample index that is the limit of an infinite sequence part, if any.
    fn accumulation(&self) -> Option<u64> {
        let lim = self.seq()?.limit()?;
        if self.seq_part().is_finite() {
            return None;
        }
        self.samples().into_iter().find(|&i| &self.sites.samples[i as usize] == lim)
    }

    /// Whether the rule's demands on every tail of the sequence part are jointly impossible.
    fn tail_forbidden(&self) -> bool {
        let z = self.rule.indices_with(0).intersect(&self.seq_part());
        !z.is_finite() && self.sp.kind != BinaryKind::AllSequences
    }

    /// Shrinks a radius until the region around p is jointly possible.
    fn isolate(&self, label: &str, p: &Point4) -> Result<RegionCheck> {
        let mut r2 = Q::one();
        for _ in 0..HALVINGS {
            let n = self.neighborhood(p, &r2)?;
            let c = self.check(format!("{label}: d^2 < {}", fmt_q(&r2)), &n);
            if !c.empty {
                return Ok(c);
            }
            r2 /= qi(4);
        }
        Err(Error::Unsupported(format!("no jointly possible neighborhood found around {label}")))
    }
}

fn deltas(extra: &[Q]) -> Vec<Q> {
    let mut v: Vec<Q> = DEFAULT_DELTAS.iter().map(|&(n, d)| q(n, d)).collect();
    for d in extra {
        if d.is_positive() && !v.contains(d) {
            v.push(d.clone());
        }
    }
    v
}

/// ε-FB for the sites at `indices` of an indexed binary model, with f(e_n) = {g : g(n) = rule(n)}.
pub fn check_eps_fb(model: &MbsModel, indices: &IndexSet, rule: &Label, extra: &[Q]) -> Result<EpsReport> {
    let ix = Indexed::new(model, indices, rule)?;
    let acc = ix.accumulation();
    if let Some(i) = acc.filter(|_| ix.tail_forbidden()) {
        let p = ix.sites.samples[i as usize].clone();
        let mut trace = Vec::new();
        for d in deltas(extra) {
            let n = ix.neighborhood(&p, &(&d * &d))?;
            trace.push(ix.check(format!("d < {}", fmt_q(&d)), &n));
        }
        if trace.iter().any(|c| !c.empty) {
            return Err(Error::Domain("sampled neighborhood contradicts the tail argument".into()));
        }
        return Ok(EpsReport {
            verdict: FbKind::EPSFB,
            e_star: Some(i),
            e_star_point: Some(p),
            argument: format!(
                "site {i} is the limit of {}; every neighborhood holds a tail of it, where the rule demands \
                 infinitely many zeros, which {} forbids",
                ix.seq().map(|s| s.describe()).unwrap_or_default(),
                ix.sp.kind.id()
            ),
            trace,
            isolation: Vec::new(),
        });
    }
    let mut isolation = Vec::new();
    for i in ix.samples() {
        isolation.push(ix.isolate(&format!("site {i}"), &ix.sites.samples[i as usize])?);
    }
    for i in ix.seq_part().first_n(8) {
        isolation.push(ix.isolate(&format!("site {i}"), &ix.sites.point(i)?)?);
    }
    let argument = match acc {
        Some(i) => format!(
            "site {i} accumulates a tail on which the rule demands only finitely many zeros; every other point is isolated"
        ),
        None => "no point of S accumulates other points of S, so a small enough neighborhood isolates each".into(),
    };
    Ok(EpsReport { verdict: FbKind::NONE, e_star: None, e_star_point: None, argument, trace: Vec::new(), isolation })
}

/// ε-FB on a finite reduced set: a ball smaller than the nearest other location isolates each
/// point, and its single outcome is possible.
pub fn check_eps_fb_finite(ts: &TransitionSet) -> Result<EpsReport> {
    let st = &ts.structure;
    let f = ts.family();
    let locs: Vec<Point4> = ts
        .transitions
        .iter()
        .map(|t| {
            st.events[t.event]
                .location
                .clone()
                .ok_or_else(|| Error::Unsupported(format!("{} has no location", st.events[t.event].id)))
        })
        .collect::<Result<_>>()?;
    let mut isolation = Vec::new();
    for (i, p) in locs.iter().enumerate() {
        let near = locs.iter().filter(|o| *o != p).map(|o| euclid_dist_sq(o, p)).min();
        let r2 = near.map_or(Q::one(), |d| d / qi(4));
        let inside: Vec<usize> = (0..locs.len()).filter(|&j| euclid_dist_sq(&locs[j], p) < r2).collect();
        let meet = ts.meet_of(&inside);
        isolation.push(RegionCheck {
            radius: format!("d^2 < {}", fmt_q(&r2)),
            members: ts.names(&inside).join(", "),
            empty: f.is_empty(&meet),
            detail: format!("around {}: {}", ts.name(i), f.render(&meet)),
        });
    }
    let verdict = if isolation.iter().any(|c| c.empty) { FbKind::EPSFB } else { FbKind::NONE };
    Ok(EpsReport {
        verdict,
        e_star: None,
        e_star_point: None,
        argument: "finite reduced set without limits: a small enough ball isolates each point".into(),
        trace: Vec::new(),
        isolation,
    })
}

/// The formula of Postulate A evaluated at one point, or the pair (h, x) refuting it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectCheck {
    pub candidate: String,
    pub formula_holds: bool,
    pub refuting_history: Option<String>,
    pub refuting_x: Option<String>,
    pub detail: String,
    pub regions: Vec<RegionCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PostulateAReport {
    pub holds: bool,
    pub route: String,
    pub scope: String,
    pub eps: Option<EpsReport>,
    pub direct: Vec<DirectCheck>,
    pub direct_holds: bool,
    pub direct_agrees: bool,
}

/// Postulate A for (S, f) in an MBS: the verdict is the ε-FB verdict; the formula is also
/// evaluated directly, with x ranging over the timelike future of each candidate.
pub fn check_postulate_a(model: &MbsModel, indices: &IndexSet, rule: &Label, extra: &[Q]) -> Result<PostulateAReport> {
    let eps = check_eps_fb(model, indices, rule, extra)?;
    let ix = Indexed::new(model, indices, rule)?;
    let up = |p: &Point4, mu: &Q| p.shifted(mu);
    let mut direct = Vec::new();
    let mut cands: Vec<u64> = ix.samples();
    cands.extend(ix.seq_part().first_n(8));
    let acc = ix.accumulation().filter(|_| ix.tail_forbidden());
    for i in cands {
        let p = ix.sites.point(i)?;
        let name = format!("site {i}");
        if Some(i) == acc {
            let mut regions = Vec::new();
            for mu in deltas(extra) {
                let b = ix.sites.below(&up(&p, &mu), true)?.intersect(&ix.sp.indices);
                regions.push(ix.check(format!("x = e + {} e_t", fmt_q(&mu)), &b));
            }
            let holds = regions.iter().all(|c| c.empty);
            direct.push(DirectCheck {
                candidate: name,
                formula_holds: holds,
                refuting_history: None,
                refuting_x: None,
                detail: "every x timelike above the limit has a tail of the sequence in its past, so the outcomes \
                         chosen below x share no history"
                    .into(),
                regions,
            });
            continue;
        }
        let mut mu = Q::one();
        let mut found = None;
        for _ in 0..HALVINGS {
            let x = up(&p, &mu);
            let b = ix.sites.below(&x, true)?.intersect(&ix.sp.indices);
            let c = ix.check(format!("x = e + {} e_t", fmt_q(&mu)), &b);
            if !c.empty {
                let h = oracle(ix.sp.kind, &ix.bits(&b)).expect("checked");
                found = Some((x, h, c));
                break;
            }
            mu /= qi(2);
        }
        let (x, h, c) = found.ok_or_else(|| Error::Unsupported(format!("no refuting x found above {name}")))?;
        direct.push(DirectCheck {
            candidate: name,
            formula_holds: false,
            refuting_history: Some(h.to_string()),
            refuting_x: Some(x.to_string()),
            detail: "h takes every chosen outcome below x; the points not below x are SLR to it".into(),
            regions: vec![c],
        });
    }
    let direct_holds = indices.len().is_none() && direct.iter().any(|d| d.formula_holds);
    let holds = eps.verdict == FbKind::EPSFB;
    Ok(PostulateAReport {
        holds,
        route: "equivalence with ε-FB".into(),
        scope: "direct evaluation over the samples and the first 8 sequence members; x ranges over the timelike \
                future of each candidate"
            .into(),
        eps: Some(eps),
        direct_agrees: direct_holds == holds,
        direct,
        direct_holds,
    })
}

fn enumerate_histories(family: &Family) -> Result<Vec<Scenario>> {
    match family {
        Family::Explicit(names) => Ok(names.iter().cloned().map(Scenario::Named).collect()),
        Family::Binary(BinaryKind::AllStrings(n)) if *n <= 16 => Ok((0u64..1 << n)
            .map(|m| Scenario::Seq(Label::zeros_at((0..*n).filter(|i| m >> i & 1 == 0))))
            .collect()),
        _ => Err(Error::Unsupported(format!("cannot enumerate the histories of {}", family.id()))),
    }
}

/// Postulate A on a finite transition structure, by enumerating the presented histories and
/// taking x over the presented events.
pub fn check_postulate_a_finite(ts: &TransitionSet) -> Result<PostulateAReport> {
    let st = &ts.structure;
    let f = ts.family();
    let hist = enumerate_histories(f)?;
    let mut direct = Vec::new();
    for (i, t) in ts.transitions.iter().enumerate() {
        let mut refute = None;
        'search: for x in 0..st.len() {
            if !st.lt(t.event, x) {
                continue;
            }
            for h in &hist {
                if !f.member(&st.events[x].histories, h) || !f.member(&t.outcome, h) {
                    continue;
                }
                let ok = ts.transitions.iter().all(|u| f.member(&u.outcome, h) || st.slr(u.event, x));
                if ok {
                    refute = Some((h.clone(), x));
                    break 'search;
                }
            }
        }
        direct.push(match refute {
            Some((h, x)) => DirectCheck {
                candidate: ts.name(i),
                formula_holds: false,
                refuting_history: Some(h.to_string()),
                refuting_x: Some(st.events[x].id.clone()),
                detail: format!("F({}) = <{h}, {}>", ts.name(i), st.events[x].id),
                regions: Vec::new(),
            },
            None => DirectCheck {
                candidate: ts.name(i),
                formula_holds: true,
                refuting_history: None,
                refuting_x: None,
                detail: "no presented pair (h, x) refutes the formula".into(),
                regions: Vec::new(),
            },
        });
    }
    Ok(PostulateAReport {
        holds: false,
        route: "direct evaluation; S is finite and the postulate needs an infinite S".into(),
        scope: format!("x over the {} presented events, h over the {} presented histories", st.len(), hist.len()),
        eps: None,
        direct_holds: false,
        direct_agrees: true,
        direct,
    })
}

#[allow(clippy::upper_case_acronyms, non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryCase {
    NO_FB,
    CONE,
    OUTER_LINING,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocateReport {
    pub case: BoundaryCase,
    pub a_star: Point4,
    pub x_star_t: Option<String>,
    pub x_star: Option<Point4>,
    /// Points below x* (CONE) whose chosen outcomes share no history.
    pub funny_set: String,
    pub on_cone: String,
    pub witness_history: Option<String>,
    pub lining_checks: Vec<RegionCheck>,
    pub argument: String,
}

fn on_line(a: &Point4, t: Q) -> Point4 {
    Point4::new(t, a.x1.clone(), a.x2.clone(), a.x3.clone())
}

fn render_names(v: &[String]) -> String {
    format!("{{{}}}", v.join(", "))
}

/// First threshold at which the running meet over the listed points becomes empty.
/// Items are (name, threshold, outcome); thresholds below `floor` count as `floor`.
fn first_bad(family: &Family, items: &[(String, Surd, HistSet)], floor: &Surd) -> Option<(Surd, Vec<String>, Vec<String>)> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    let key = |i: usize| std::cmp::max(items[i].1.clone(), floor.clone());
    order.sort_by_key(|&i| key(i));
    let mut acc = family.universe();
    let mut pos = 0;
    while pos < order.len() {
        let th = key(order[pos]);
        let mut end = pos;
        while end < order.len() && key(order[end]) == th {
            acc = family.meet(&acc, &items[order[end]].2);
            end += 1;
        }
        if family.is_empty(&acc) {
            let below = order[..end].iter().map(|&i| items[i].0.clone()).collect();
            let cone = order[pos..end].iter().map(|&i| items[i].0.clone()).collect();
            return Some((th, below, cone));
        }
        pos = end;
    }
    None
}

fn cone_report(a: &Point4, th: Surd, below: Vec<String>, cone: Vec<String>) -> LocateReport {
    let xr = th.as_rational();
    LocateReport {
        case: BoundaryCase::CONE,
        a_star: a.clone(),
        x_star_t: Some(th.render()),
        x_star: xr.map(|t| on_line(a, t)),
        funny_set: render_names(&below),
        on_cone: render_names(&cone),
        witness_history: None,
        lining_checks: Vec::new(),
        argument: "every point of L below x* is good and x* is bad; the chosen outcomes at the points below x* \
                   share no history (the points on its cone alone need not conflict)"
            .into(),
    }
}

/// Walks the vertical line above `a_star` through the exact thresholds of a finite transition
/// set whose events carry locations.
pub fn locate_cone_boundary(ts: &TransitionSet, a_star: &Point4) -> Result<LocateReport> {
    let f = ts.family();
    let mut items = Vec::new();
    for (i, t) in ts.transitions.iter().enumerate() {
        let loc = ts.structure.events[t.event]
            .location
            .clone()
            .ok_or_else(|| Error::Domain(format!("point {} has no location", ts.name(i))))?;
        items.push((ts.name(i), vertical_threshold(&loc, a_star), t.outcome.clone()));
    }
    if !ts.transitions.iter().any(|t| ts.structure.events[t.event].location.as_ref() == Some(a_star)) {
        return Err(Error::Domain(format!("{a_star} is not the location of a point of S")));
    }
    let floor = Surd::rational(a_star.t.clone());
    match first_bad(f, &items, &floor) {
        Some((th, below, cone)) => Ok(cone_report(a_star, th, below, cone)),
        None => {
            let all: Vec<usize> = (0..ts.len()).collect();
            Ok(LocateReport {
                case: BoundaryCase::NO_FB,
                a_star: a_star.clone(),
                x_star_t: None,
                x_star: None,
                funny_set: "{}".into(),
                on_cone: "{}".into(),
                witness_history: f.witness(&ts.meet_of(&all)).map(|h| h.to_string()),
                lining_checks: Vec::new(),
                argument: "every point of L is good; one history takes all chosen outcomes".into(),
            })
        }
    }
}

/// Infimum of the times on the line at which infinitely many sequence members lie below;
/// `None` when every point of the line has only finitely many below.
fn accumulation_time(ix: &Indexed, a: &Point4) -> Result<Option<Q>> {
    if ix.seq_part().is_finite() {
        return Ok(None);
    }
    match ix.seq().expect("infinite part has a sequence") {
        SiteSequence::Arithmetic { .. } => Ok(None),
        SiteSequence::Harmonic { limit, .. } => vertical_threshold(limit, a)
            .as_rational()
            .map(Some)
            .ok_or_else(|| Error::Unsupported("limit reaches the line at an irrational time".into())),
        SiteSequence::ConeWrap => Ok(Some(a.x1.clone())),
    }
}

/// Cone localization for the sites at `indices` of an indexed binary model.
pub fn locate_cone_boundary_indexed(
    model: &MbsModel,
    indices: &IndexSet,
    rule: &Label,
    a_star: &Point4,
    extra: &[Q],
) -> Result<LocateReport> {
    let ix = Indexed::new(model, indices, rule)?;
    if ix.sites.equal(a_star)?.intersect(indices).is_empty() {
        return Err(Error::Domain(format!("{a_star} is not a point of S")));
    }
    let kind = ix.sp.kind;
    if let Ok(g) = oracle(kind, &ix.sp.full(rule)) {
        return Ok(LocateReport {
            case: BoundaryCase::NO_FB,
            a_star: a_star.clone(),
            x_star_t: None,
            x_star: None,
            funny_set: "{}".into(),
            on_cone: "{}".into(),
            witness_history: Some(g.to_string()),
            lining_checks: Vec::new(),
            argument: "every point of L is good; one history takes all chosen outcomes".into(),
        });
    }
    let below_at = |t: &Q| -> Result<IndexSet> { Ok(ix.sites.below(&on_line(a_star, t.clone()), false)?.intersect(indices)) };
    let family = ix.sp.family();
    let walk = |set: &IndexSet| -> Result<Option<(Surd, Vec<String>, Vec<String>)>> {
        let mut items = Vec::new();
        for i in set.iter_below(u64::MAX) {
            let p = ix.sites.point(i)?;
            items.push((format!("e{i}"), vertical_threshold(&p, a_star), HistSet::Binary(ix.bits(&IndexSet::single(i)))));
        }
        Ok(first_bad(&family, &items, &Surd::rational(a_star.t.clone())))
    };
    let tinf = accumulation_time(&ix, a_star)?;
    let Some(tinf) = tinf else {
        let mut step = Q::one();
        for _ in 0..64 {
            let t = &a_star.t + &step;
            let set = below_at(&t)?;
            if !set.is_finite() {
                return Err(Error::Unsupported("infinitely many points below a point of L".into()));
            }
            if oracle(kind, &ix.bits(&set)).is_err() {
                let (th, below, cone) = walk(&set)?.expect("the set itself conflicts");
                return Ok(cone_report(a_star, th, below, cone));
            }
            step *= qi(2);
        }
        return Err(Error::Unsupported(
            "every sampled point of L is good while S as a whole conflicts; the conflict escapes along L".into(),
        ));
    };
    if tinf < a_star.t {
        return Err(Error::Unsupported("infinitely many points below a* itself".into()));
    }
    let at = below_at(&tinf)?;
    if at.is_finite() {
        if let Some((th, below, cone)) = walk(&at)? {
            return Ok(cone_report(a_star, th, below, cone));
        }
    } else {
        if !kind.finite_sets_always_sat() {
            return Err(Error::Unsupported("infinitely many points approach x* from inside its cone".into()));
        }
        if oracle(kind, &ix.bits(&at)).is_err() {
            let mut r = cone_report(a_star, Surd::rational(tinf.clone()), Vec::new(), Vec::new());
            r.funny_set = at.to_string();
            r.argument = "below x* lie infinitely many points whose finite parts are jointly possible while the \
                          whole is not"
                .into();
            return Ok(r);
        }
    }
    // x* = the accumulation time is good; check the outer linings
    let mut checks = Vec::new();
    for d in deltas(extra) {
        let lining = ix.sites.below(&on_line(a_star, &tinf + &d), true)?.intersect(indices).difference(&at);
        let mut c = ix.check(format!("lining delta = {}", fmt_q(&d)), &lining);
        let whole = below_at(&(&tinf + &d))?;
        if oracle(kind, &ix.bits(&whole)).is_ok() {
            c.empty = false;
            c.detail = format!("{}; the points below x*(delta) are jointly possible", c.detail);
        }
        checks.push(c);
    }
    if !checks.iter().all(|c| c.empty) || !ix.tail_forbidden() {
        return Err(Error::Unsupported("points of L beyond the accumulation time are good; not handled".into()));
    }
    Ok(LocateReport {
        case: BoundaryCase::OUTER_LINING,
        a_star: a_star.clone(),
        x_star_t: Some(fmt_q(&tinf)),
        x_star: Some(on_line(a_star, tinf.clone())),
        funny_set: at.to_string(),
        on_cone: String::new(),
        witness_history: oracle(kind, &ix.bits(&at)).ok().map(|g| g.to_string()),
        lining_checks: checks,
        argument: "x* is good (finitely many points below, jointly possible); above it every point of L has a \
                   tail of the sequence below, where the rule demands infinitely many zeros, so every lining is funny"
            .into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub k: usize,
    pub x: Point4,
    pub slab: String,
    pub history: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinGapReport {
    pub posc: Clause,
    pub posc_witness: Option<Point4>,
    pub verdict: Option<FbKind>,
    pub chain: Vec<ChainStep>,
    pub final_history: Option<String>,
    pub argument: String,
}

fn posc_fails(ix: &Indexed, x: Point4, delta: &Q, why: &str) -> Result<MinGapReport> {
    let lo = ix.sites.below(&x, false)?.intersect(&ix.sp.indices);
    let hi = ix.sites.below(&x.shifted(delta), false)?.intersect(&ix.sp.indices);
    if !lo.is_finite() || hi.is_finite() {
        return Err(Error::Domain(format!("posC counterexample {x} did not check out")));
    }
    Ok(MinGapReport {
        posc: Clause::new(false, format!("{x} lies above {} points; shifted by {} it lies above infinitely many ({why})", lo.len().unwrap_or(0), fmt_q(delta))),
        posc_witness: Some(x),
        verdict: None,
        chain: Vec::new(),
        final_history: None,
        argument: "posC fails on the descriptor; no verdict".into(),
    })
}

/// Condition posC on the descriptor of S, then the chain of time shifts by `delta`.
pub fn check_min_gap_no_inffb(model: &MbsModel, indices: &IndexSet, rule: &Label, delta: &Q) -> Result<MinGapReport> {
    if !delta.is_positive() {
        return Err(Error::Domain("delta must be positive".into()));
    }
    let ix = Indexed::new(model, indices, rule)?;
    let posc = if ix.seq_part().is_finite() {
        Clause::new(true, "S is finite, so every point lies above finitely many of its members")
    } else {
        match ix.seq().expect("infinite part has a sequence") {
            SiteSequence::Arithmetic { .. } => Clause::new(
                true,
                "the members drift apart along a spacelike step, so every point lies above finitely many of them",
            ),
            SiteSequence::Harmonic { limit, .. } => {
                let x = limit.shifted(&-(delta / qi(2)));
                return posc_fails(&ix, x, delta, "the members converge to a point just above it");
            }
            SiteSequence::ConeWrap => {
                let x = Point4::new(Q::zero(), Q::zero(), Q::one(), Q::zero());
                return posc_fails(&ix, x, delta, "new members keep entering the past cone as it moves up");
            }
        }
    };
    let kind = ix.sp.kind;
    let first = indices.min().ok_or_else(|| Error::Domain("S is empty".into()))?;
    let mut x = ix.sites.point(first)?;
    let mut acc = IndexSet::single(first);
    let target = IndexSet::from_iter(indices.first_n(16));
    let mut chain = vec![ChainStep {
        k: 0,
        x: x.clone(),
        slab: acc.to_string(),
        history: oracle(kind, &ix.bits(&acc)).map(|g| g.to_string()).unwrap_or_default(),
    }];
    for k in 1..=64 {
        x = x.shifted(delta);
        let slab = ix.sites.below(&x, true)?.intersect(indices).difference(&acc);
        if !slab.is_finite() {
            return Err(Error::Domain("slab is infinite although posC holds".into()));
        }
        acc = acc.union(&slab);
        let h = oracle(kind, &ix.bits(&acc)).map_err(|u| {
            Error::Domain(format!("the first {k} slabs admit no common history ({u}); FINFB is present"))
        })?;
        chain.push(ChainStep { k, x: x.clone(), slab: slab.to_string(), history: h.to_string() });
        if k >= 4 && target.is_subset(&acc) {
            break;
        }
    }
    let full = oracle(kind, &ix.sp.full(rule));
    let (verdict, final_history, argument) = match full {
        Ok(g) => {
            let c = ix.bits(&acc);
            if !c.is_satisfied_by(&g) {
                return Err(Error::Domain("final history misses a chosen outcome on the chain".into()));
            }
            (
                Some(FbKind::NONE),
                Some(g.to_string()),
                "every slab is finite; the history containing the chain takes every chosen outcome".to_string(),
            )
        }
        Err(u) => (
            Some(FbKind::INFFB),
            None,
            format!("every slab is finite and jointly possible, but no history contains the chain: {u}"),
        ),
    };
    Ok(MinGapReport { posc, posc_witness: None, verdict, chain, final_history, argument })
}
