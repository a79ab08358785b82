//! From a FINFB witness inside one history to an infinite INFFB set: a sampled region
//! of that history, the four-case product function on it, and the clause checks.

use num_traits::{One, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{HistSet, Label, Scenario};
use crate::geometry::{fmt_q, lt_m, q, qi, Point4, Q};
use crate::model::MbsModel;
use crate::structure::{Structure, Transition, TransitionSet};

use super::finite::{monotone_clause, verify_finfb, Clause, FinfbWitness};
use super::symbolic::{check_inffb, SymbolicPoints};
use super::FbKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampledPoint {
    pub id: String,
    pub location: Point4,
    pub case: String,
    pub outcome: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fin2InfCertificate {
    pub verdict: FbKind,
    pub passthrough: bool,
    pub h_s: String,
    pub h_a: String,
    pub h_b: String,
    pub region: String,
    pub sample: Vec<SampledPoint>,
    pub clause_1: Clause,
    /// Every finite part of S' lies in a history (here all of S' lies in h_S).
    pub clause_2: Clause,
    /// Joint possibility of the chosen outcomes on finite parts; fails on A ∪ B by design.
    pub clause_2_outcomes: Clause,
    pub clause_3: Clause,
    pub clause_4: Clause,
    /// Monotonicity at a point above A when only the common future of A and B is removed.
    pub common_future_only: Clause,
}

const SEGMENT: [i64; 4] = [2, 4, 8, 16];

/// Region, product function and clause checks for a FINFB witness (A, B) all of whose points
/// lie in `h_s`. Points of A ∪ B must carry locations in `model`.
pub fn construct_inffb_from_finfb(
    model: &MbsModel,
    ts: &TransitionSet,
    w: &FinfbWitness,
    h_s: &Scenario,
) -> Result<Fin2InfCertificate> {
    verify_finfb(ts, w).map_err(|e| Error::Domain(format!("witness does not re-verify: {e}")))?;
    let f = ts.family();
    let st = &ts.structure;
    let loc = |i: usize| -> Result<Point4> {
        st.events[ts.transitions[i].event]
            .location
            .clone()
            .ok_or_else(|| Error::Domain(format!("point {} has no location", ts.name(i))))
    };
    let ab: Vec<usize> = w.a1.iter().chain(&w.a2).copied().collect();
    for &i in &ab {
        if !f.member(&st.events[ts.transitions[i].event].histories, h_s) {
            return Err(Error::Domain(format!("{} is not in history {h_s}", ts.name(i))));
        }
    }
    let h_a = f.witness(&ts.meet_of(&w.a1)).expect("verified");
    let h_b = f.witness(&ts.meet_of(&w.a2)).expect("verified");
    let locs: Vec<Point4> = ab.iter().map(|&i| loc(i)).collect::<Result<_>>()?;
    let above_ab = |y: &Point4| locs.iter().any(|p| lt_m(p, y));

    // sample: A ∪ B, segments below a minimal point of each side, two far spacelike points
    let mut pts: Vec<(String, Point4, &'static str)> = Vec::new();
    for &i in &ab {
        pts.push((ts.name(i), loc(i)?, "chosen"));
    }
    let minimal = |side: &[usize]| -> Result<usize> {
        for &i in side {
            let p = loc(i)?;
            if !side.iter().any(|&j| j != i && loc(j).is_ok_and(|r| lt_m(&r, &p))) {
                return Ok(i);
            }
        }
        Err(Error::Domain("side without a minimal point".into()))
    };
    let (ma, mb) = (minimal(&w.a1)?, minimal(&w.a2)?);
    for (side, m) in [("A", ma), ("B", mb)] {
        let p = loc(m)?;
        for d in SEGMENT {
            pts.push((format!("{}-1/{d}", ts.name(m)), p.shifted(&-q(1, d)), if side == "A" { "below A" } else { "below B" }));
        }
    }
    let base = loc(ma)?;
    let mut reach = Q::one();
    for p in &locs {
        let d = p.sub(&base);
        reach += d.t.abs() + d.x1.abs() + d.x2.abs() + d.x3.abs();
    }
    let far = &reach * qi(2);
    for (tag, s) in [("far+", far.clone()), ("far-", -far.clone())] {
        let p = Point4::new(base.t.clone(), &base.x1 + &s, base.x2.clone(), base.x3.clone());
        pts.push((tag.into(), p, "otherwise"));
    }
    for (id, p, case) in &pts {
        if *case != "chosen" && above_ab(p) {
            return Err(Error::Domain(format!("sample point {id} lies above A ∪ B")));
        }
    }

    let triples: Vec<(String, Point4, Scenario)> = pts.iter().map(|(id, p, _)| (id.clone(), p.clone(), h_s.clone())).collect();
    let (sst, _) = Structure::from_model(model, &triples)?;
    if sst.len() != pts.len() {
        return Err(Error::Domain("sample points coincide".into()));
    }
    let cell = |e: usize, h: &Scenario| -> Result<HistSet> {
        let c = sst.cell_of(e, h).ok_or_else(|| Error::Domain(format!("{h} does not pass through {}", sst.events[e].id)))?;
        Ok(sst.events[e].cells[c].clone())
    };
    let mut trans = Vec::new();
    let mut sample = Vec::new();
    for (k, (id, p, case)) in pts.iter().enumerate() {
        let outcome = match *case {
            "chosen" => ts.transitions[ab[k]].outcome.clone(),
            "below A" => cell(k, &h_a)?,
            "below B" => {
                if locs[..w.a1.len()].iter().any(|a| lt_m(p, a)) {
                    cell(k, &h_a)?
                } else {
                    cell(k, &h_b)?
                }
            }
            _ => cell(k, h_s)?,
        };
        sample.push(SampledPoint { id: id.clone(), location: p.clone(), case: case.to_string(), outcome: f.render(&outcome) });
        trans.push(Transition { event: k, outcome });
    }
    let nab = ab.len();
    let sts = TransitionSet { structure: sst, transitions: trans };

    let seg_ok = SEGMENT.len() == 4 && pts.iter().filter(|(_, _, c)| *c == "below A").count() == SEGMENT.len();
    let c1 = Clause::new(
        seg_ok,
        format!("{} - t e_t lies in S' for every t in (0, 1]; sampled at t = 1/2 .. 1/16", ts.name(ma)),
    );
    let all_in = (0..sts.len()).all(|k| f.member(&sts.structure.events[k].histories, h_s));
    let c2 = Clause::new(all_in, format!("every sampled point is an event of {h_s}"));
    let ab_idx: Vec<usize> = (0..nab).collect();
    let c2o = Clause::new(false, format!("the part A ∪ B has {}", f.unsat_reason(&sts.meet_of(&ab_idx)).unwrap_or_default()));
    let c3 = monotone_clause(&sts);
    let c4 = Clause::new(
        f.is_empty(&sts.meet_of(&ab_idx)),
        format!("A ∪ B lies in S' and its chosen outcomes share no history: {}", w.union_empty),
    );

    // the literal region keeps points above one side only, with the outcome of h_S
    let above = loc(ma)?.shifted(&q(1, 2));
    let common_future_only = {
        let (lst, _) = Structure::from_model(model, &[(format!("{}+1/2", ts.name(ma)), above.clone(), h_s.clone())])?;
        let out = lst.cell_of(0, h_s).map(|c| lst.events[0].cells[c].clone());
        let fa = &ts.transitions[ma].outcome;
        let bad_b = w.a2.iter().any(|&j| loc(j).is_ok_and(|b| lt_m(&b, &above)));
        match out {
            Some(o) if !bad_b => {
                let ok = f.subset(&o, fa);
                Clause::new(
                    ok,
                    format!(
                        "{} at {} with outcome {} {} f({})",
                        ts.name(ma),
                        fmt_q(&q(1, 2)),
                        f.render(&o),
                        if ok { "inside" } else { "not inside" },
                        ts.name(ma)
                    ),
                )
            }
            _ => Clause::new(true, "no point of that kind sampled"),
        }
    };
    let all = c1.holds && c2.holds && c3.holds && c4.holds;
    Ok(Fin2InfCertificate {
        verdict: if all { FbKind::INFFB } else { FbKind::NONE },
        passthrough: false,
        h_s: h_s.to_string(),
        h_a: h_a.to_string(),
        h_b: h_b.to_string(),
        region: format!("events of {h_s} not above any point of A ∪ B, together with A ∪ B"),
        sample,
        clause_1: c1,
        clause_2: c2,
        clause_2_outcomes: c2o,
        clause_3: c3,
        clause_4: c4,
        common_future_only,
    })
}

/// The infinite branch: S' = A ∪ B with f restricted, checked directly.
pub fn inffb_passthrough(sp: &SymbolicPoints, rule: &Label) -> Result<Fin2InfCertificate> {
    if !sp.is_infinite() {
        return Err(Error::Domain("passthrough needs an infinite A ∪ B".into()));
    }
    let c = check_inffb(sp, rule)?;
    let through = Clause::new(c.clause_2_points.holds, c.clause_2_points.detail.clone());
    Ok(Fin2InfCertificate {
        verdict: if c.clause_1.holds && through.holds && c.clause_3.holds && c.clause_4.holds {
            FbKind::INFFB
        } else {
            FbKind::NONE
        },
        passthrough: true,
        h_s: String::new(),
        h_a: String::new(),
        h_b: String::new(),
        region: format!("A ∪ B = points {}", sp.indices),
        sample: Vec::new(),
        clause_1: c.clause_1,
        clause_2: through,
        clause_2_outcomes: c.clause_2,
        clause_3: c.clause_3,
        clause_4: c.clause_4,
        common_future_only: Clause::new(true, "no region built"),
    })
}
