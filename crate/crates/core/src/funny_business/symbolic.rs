//! ω-indexed pairwise SLR point sets with per-index binary possibilities, decided
//! from the family kind: INFFB, symbolic FINFB and CFB, and Postulate B.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{oracle, BinaryKind, Constraints, Family, HistSet, Label, Unsat};
use crate::geometry::{lt_m, slr_m};
use crate::indexset::IndexSet;
use crate::model::MbsModel;
use crate::sites::SiteFamily;

use super::finite::{Clause, InffbCertificate};
use super::FbKind;

/// How many leading indices the sampled finite-subset check covers.
pub const SPOT_WIDTH: usize = 12;

/// Points e_n, n in `indices`, pairwise SLR, each lying in exactly the histories `through`, whose
/// possibilities are {g : g(n) = 0} and {g : g(n) = 1} (restricted to `through`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicPoints {
    pub name: String,
    pub kind: BinaryKind,
    pub indices: IndexSet,
    pub through: Constraints,
    pub notes: Vec<String>,
}

fn seq_params(sites: &SiteFamily, idx: &IndexSet) -> IndexSet {
    let m = sites.samples.len() as u64;
    let first = sites.sequences.first().map_or(0, |s| s.first_param());
    let mut out = IndexSet::empty();
    for &(a, b) in idx.intersect(&IndexSet::range(m, None)).runs() {
        out = out.union(&IndexSet::range(a - m + first, b.map(|b| b - m + first)));
    }
    out
}

impl SymbolicPoints {
    /// The choice points of an M2-style skeleton: every index, nothing below them.
    pub fn skeleton(name: &str, kind: BinaryKind) -> SymbolicPoints {
        let indices = match kind.width() {
            Some(w) => IndexSet::range(0, Some(w)),
            None => IndexSet::all(),
        };
        SymbolicPoints {
            name: name.into(),
            kind,
            indices,
            through: Constraints::none(),
            notes: vec!["choice points pairwise incomparable by construction".into()],
        }
    }

    /// Sites of an indexed binary model at the given indices. Requires the sites to be pairwise
    /// SLR and to have no splitting site strictly below them, so every history passes through them.
    pub fn from_model(model: &MbsModel, indices: &IndexSet) -> Result<SymbolicPoints> {
        let kind = model
            .binary_kind()
            .ok_or_else(|| Error::Domain("symbolic point sets need a binary family".into()))?;
        let sites = model
            .indexed_sites()
            .ok_or_else(|| Error::Domain("symbolic point sets need indexed splitting sites".into()))?;
        let m = sites.samples.len() as u64;
        if let Some(c) = sites.count() {
            if !indices.is_subset(&IndexSet::range(0, Some(c))) {
                return Err(Error::Domain(format!("indices {indices} exceed the {c} sites")));
            }
        }
        let mut notes = Vec::new();
        let sample_idx: Vec<u64> = indices.iter_below(m).collect();
        for (i, &a) in sample_idx.iter().enumerate() {
            for &b in &sample_idx[i + 1..] {
                let (pa, pb) = (&sites.samples[a as usize], &sites.samples[b as usize]);
                if !slr_m(pa, pb) {
                    return Err(Error::Domain(format!("sites {a} and {b} ({pa}, {pb}) are not SLR")));
                }
            }
        }
        let params = seq_params(sites, indices);
        if let Some(seq) = sites.sequences.first() {
            if !params.is_empty() {
                let (ok, why) = seq.internally_slr();
                if !ok {
                    return Err(Error::Domain(format!("sequence members are not pairwise SLR: {why}")));
                }
                notes.push(why);
                for (i, p) in sites.samples.iter().enumerate() {
                    let hit = seq.above_params(p)?.intersect(&params);
                    if let Some(k) = hit.min() {
                        return Err(Error::Domain(format!(
                            "site {i} lies below sequence member {k}; the points do not share all histories"
                        )));
                    }
                    if indices.contains(i as u64) {
                        if let Some(k) = seq.below_params(p, false)?.intersect(&params).min() {
                            return Err(Error::Domain(format!("site {i} and sequence member {k} are not SLR")));
                        }
                    }
                }
            }
        }
        for &a in &sample_idx {
            let p = &sites.samples[a as usize];
            if let Some(j) = sites.samples.iter().position(|q| lt_m(q, p)) {
                return Err(Error::Domain(format!("site {j} lies strictly below site {a}")));
            }
            if let Some(seq) = sites.sequences.first() {
                if let Some(k) = seq.below_params(p, true)?.min() {
                    return Err(Error::Domain(format!("sequence member {k} lies strictly below site {a}")));
                }
            }
        }
        notes.push("no splitting site lies below any point, so every history passes through each".into());
        Ok(SymbolicPoints { name: model.name.clone(), kind, indices: indices.clone(), through: Constraints::none(), notes })
    }

    pub fn is_infinite(&self) -> bool {
        !self.indices.is_finite()
    }

    /// Constraint of f(e_n) under the rule.
    pub fn outcome(&self, rule: &Label, n: u64) -> Constraints {
        self.through.meet(&Constraints::bit(n, rule.bit(n)))
    }

    /// Joint outcome over all points.
    pub fn full(&self, rule: &Label) -> Constraints {
        self.through.meet(&Constraints::agree(rule, &self.indices))
    }

    /// Joint outcome over the listed points.
    pub fn part(&self, rule: &Label, idx: &[u64]) -> Constraints {
        self.through.meet(&Constraints::agree(rule, &IndexSet::from_iter(idx.iter().copied())))
    }

    /// Zeros demanded by the rule on the points, beyond those the histories already force.
    fn rule_zeros(&self, rule: &Label) -> IndexSet {
        rule.indices_with(0).intersect(&self.indices).difference(&self.through.zeros)
    }

    pub fn family(&self) -> Family {
        Family::Binary(self.kind)
    }
}

/// First index whose chosen outcome is empty on its own.
pub fn improper_choice(sp: &SymbolicPoints, rule: &Label) -> Option<u64> {
    let (r0, r1) = (rule.indices_with(0).intersect(&sp.indices), rule.indices_with(1).intersect(&sp.indices));
    let mut single = sp.through.zeros.intersect(&r1).union(&sp.through.ones.intersect(&r0));
    if let Some(w) = sp.kind.width() {
        single = single.union(&r0.intersect(&IndexSet::range(w, None)));
    }
    single.min()
}

/// Smallest (then lexicographically first) finite part whose joint outcome is empty.
fn smallest_failing_part(sp: &SymbolicPoints, rule: &Label) -> Option<Vec<u64>> {
    if oracle(sp.kind, &sp.through).is_err() {
        return sp.indices.min().map(|n| vec![n]);
    }
    if let Some(n) = improper_choice(sp, rule) {
        return Some(vec![n]);
    }
    if let BinaryKind::AtMostKZeros(k) = sp.kind {
        let z0 = sp.through.zeros.len()?;
        let room = k.checked_sub(z0)?;
        let z = sp.rule_zeros(rule);
        let need = room as usize + 1;
        let first = z.first_n(need);
        if first.len() == need {
            return Some(first);
        }
    }
    None
}

/// Oracle checks of every part of the first `SPOT_WIDTH` points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpotCheck {
    pub points: Vec<u64>,
    pub parts_checked: u64,
    pub empty_parts: u64,
}

fn spot_check(sp: &SymbolicPoints, rule: &Label) -> SpotCheck {
    let pts = sp.indices.first_n(SPOT_WIDTH);
    let mut empty = 0;
    let total = 1u64 << pts.len();
    for mask in 1..total {
        let part: Vec<u64> = pts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &n)| n).collect();
        if oracle(sp.kind, &sp.part(rule, &part)).is_err() {
            empty += 1;
        }
    }
    SpotCheck { points: pts, parts_checked: total - 1, empty_parts: empty }
}

fn finite_parts_clause(sp: &SymbolicPoints, rule: &Label) -> Result<(Clause, Option<Vec<u64>>, SpotCheck)> {
    let fail = smallest_failing_part(sp, rule);
    let spot = spot_check(sp, rule);
    let within = |v: &Vec<u64>| v.iter().all(|n| spot.points.contains(n));
    match &fail {
        None if spot.empty_parts > 0 => {
            return Err(Error::Domain("sampled parts contradict the family argument".into()));
        }
        Some(v) if within(v) && spot.empty_parts == 0 => {
            return Err(Error::Domain("sampled parts contradict the family argument".into()));
        }
        _ => {}
    }
    let clause = match &fail {
        None => Clause::new(
            true,
            format!(
                "every finite part is jointly possible in {} ({}); {} sampled parts checked",
                sp.kind.id(),
                family_reason(sp.kind),
                spot.parts_checked
            ),
        ),
        Some(v) => Clause::new(
            false,
            format!(
                "part {{{}}} is jointly impossible: {}",
                v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "),
                oracle(sp.kind, &sp.part(rule, v)).err().map(|u| u.to_string()).unwrap_or_default()
            ),
        ),
    };
    Ok((clause, fail, spot))
}

fn family_reason(kind: BinaryKind) -> &'static str {
    match kind {
        BinaryKind::FinitelyManyZeros => "finitely many zeros are always allowed",
        BinaryKind::AllSequences => "distinct indices never conflict",
        BinaryKind::AtMostKZeros(_) => "the demanded zeros never exceed the bound",
        BinaryKind::AllStrings(_) => "all indices vary",
    }
}

/// INFFB for an ω-indexed pairwise SLR set under a per-index rule.
pub fn check_inffb(sp: &SymbolicPoints, rule: &Label) -> Result<InffbCertificate> {
    let c1 = Clause::new(
        sp.is_infinite(),
        if sp.is_infinite() { format!("S indexed by {}", sp.indices) } else { format!("S finite: {}", sp.indices) },
    );
    let (c2, _, _) = finite_parts_clause(sp, rule)?;
    let through = oracle(sp.kind, &sp.through);
    let c2p = Clause::new(
        through.is_ok(),
        match &through {
            Ok(g) => format!("history {g} contains every point"),
            Err(u) => format!("no history contains the points: {u}"),
        },
    );
    let c3 = Clause::new(true, "holds vacuously: the points are pairwise SLR");
    let full = oracle(sp.kind, &sp.full(rule));
    let c4 = Clause::new(
        full.is_err(),
        match &full {
            Ok(g) => format!("history {g} realizes every chosen outcome"),
            Err(u) => format!("joint outcome empty: {u}"),
        },
    );
    Ok(InffbCertificate::from_clauses(c1, c2, c2p, c3, c4))
}

/// Re-derives a certificate and compares clause by clause.
pub fn verify_inffb(sp: &SymbolicPoints, rule: &Label, cert: &InffbCertificate) -> Result<bool> {
    Ok(&check_inffb(sp, rule)? == cert)
}

/// FINFB over a symbolic pairwise SLR set, decided from the family kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicFinfb {
    pub verdict: FbKind,
    pub a1: Vec<u64>,
    pub a2: Vec<u64>,
    pub argument: String,
}

pub fn check_finfb_symbolic(sp: &SymbolicPoints, rule: &Label) -> Result<SymbolicFinfb> {
    let none = |why: &str| SymbolicFinfb { verdict: FbKind::NONE, a1: vec![], a2: vec![], argument: why.into() };
    if oracle(sp.kind, &sp.through).is_err() {
        return Ok(none("no history contains the points, so no two parts are SLR"));
    }
    match sp.kind {
        BinaryKind::FinitelyManyZeros | BinaryKind::AllSequences | BinaryKind::AllStrings(_) => Ok(none(
            "two jointly possible parts demand finitely many zeros each at distinct indices; their union is possible too",
        )),
        BinaryKind::AtMostKZeros(k) => {
            let z0 = sp.through.zeros.len().unwrap_or(u64::MAX);
            let room = k.saturating_sub(z0);
            let z = sp.rule_zeros(rule);
            let need = room as usize + 1;
            let first = z.first_n(need);
            if room >= 1 && first.len() == need {
                let a1 = vec![first[0]];
                let a2 = first[1..].to_vec();
                // each part has at most `room` demanded zeros; together they exceed it
                debug_assert!(oracle(sp.kind, &sp.part(rule, &a2)).is_ok());
                Ok(SymbolicFinfb {
                    verdict: FbKind::FINFB,
                    a1,
                    a2,
                    argument: format!("{need} zero outcomes exceed the bound of {k} while each part stays within it"),
                })
            } else {
                Ok(none("the rule never demands more zeros than the bound allows"))
            }
        }
    }
}

/// Combinatorial funny business on a symbolic pairwise SLR set.
pub fn check_cfb_symbolic(sp: &SymbolicPoints, rule: &Label) -> super::CfbReport {
    let through = oracle(sp.kind, &sp.through).is_ok();
    let full = oracle(sp.kind, &sp.full(rule));
    let empty = full.is_err();
    super::CfbReport {
        verdict: if through && empty { FbKind::CFB } else { FbKind::NONE },
        combinatorially_consistent: through,
        failed_condition: (!through).then(|| "(4) incomparable points share no history".to_string()),
        h_t_empty: empty,
        h_t: match full {
            Ok(g) => format!("contains {g}"),
            Err(u) => u.to_string(),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PostulateBReport {
    pub holds: bool,
    pub clause_a: Clause,
    pub clause_b: Clause,
    pub spot: Option<SpotCheck>,
}

/// Postulate B for X = {x_n : n in indices} where x_n lies in exactly the histories with
/// g(n) = rule(n) (and `through`).
pub fn check_postulate_b(sp: &SymbolicPoints, rule: &Label) -> Result<PostulateBReport> {
    let (a, _, spot) = finite_parts_clause(sp, rule)?;
    let full = oracle(sp.kind, &sp.full(rule));
    let b = Clause::new(
        full.is_err(),
        match &full {
            Ok(g) => format!("history {g} contains all of X"),
            Err(u) => format!("no history contains X: {u}"),
        },
    );
    Ok(PostulateBReport { holds: a.holds && b.holds, clause_a: a, clause_b: b, spot: Some(spot) })
}

/// Postulate B for a finite X given by the history sets of its points.
pub fn check_postulate_b_finite(family: &Family, sets: &[HistSet]) -> PostulateBReport {
    let all = sets.iter().fold(family.universe(), |acc, s| family.meet(&acc, s));
    let empty = family.is_empty(&all);
    let b = Clause::new(
        empty,
        match family.witness(&all) {
            Some(h) => format!("history {h} contains all of X"),
            None => "no history contains X".into(),
        },
    );
    let a = if empty {
        Clause::new(false, format!("X itself is a finite part outside every history ({} points)", sets.len()))
    } else {
        Clause::new(true, "every part lies in the history containing X")
    };
    PostulateBReport { holds: a.holds && b.holds, clause_a: a, clause_b: b, spot: None }
}

/// Why the full meet is empty, when it is.
pub fn full_reason(sp: &SymbolicPoints, rule: &Label) -> Option<Unsat> {
    oracle(sp.kind, &sp.full(rule)).err()
}
