//! Histories as scenarios: Σ_h(x), elementary possibilities, and compactness
//! witnesses for the chain topology.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{oracle, BinaryKind, Constraints, Family, HistSet, Label, Scenario};
use crate::geometry::{lt_m, Point4, Q};
use crate::indexset::IndexSet;
use crate::model::{Decision, EventClass, MbsModel, Splitting};
use crate::sites::SiteSequence;

/// One elementary possibility at an event.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryPossibility {
    pub at: String,
    pub members: HistSet,
}

/// Σ_h(x) for h = h_s: the scenarios whose copy of x is glued to x_s.
pub fn sigma_h(x: &Point4, s: &Scenario, model: &MbsModel) -> Result<HistSet> {
    Ok(model.event_class(x, s)?.members)
}

/// Partition of the histories through the event by undividedness.
pub fn elementary_possibilities(at: &EventClass, model: &MbsModel) -> Result<Vec<ElementaryPossibility>> {
    let label = format!("{}@{}", at.rep, at.location);
    match (&model.family, &model.splitting) {
        (Family::Explicit(names), _) => {
            let members: Vec<usize> = match &at.members {
                HistSet::Explicit(b) => b.iter().collect(),
                _ => return Err(Error::Domain("explicit model with symbolic class".into())),
            };
            let mut cells: Vec<Vec<usize>> = Vec::new();
            for &i in &members {
                let si = Scenario::Named(names[i].clone());
                let mut placed = false;
                for c in cells.iter_mut() {
                    let sj = Scenario::Named(names[c[0]].clone());
                    if model.undivided(&si, &sj, at)? {
                        c.push(i);
                        placed = true;
                        break;
                    }
                }
                if !placed {
                    cells.push(vec![i]);
                }
            }
            Ok(cells
                .into_iter()
                .map(|c| ElementaryPossibility {
                    at: label.clone(),
                    members: HistSet::Explicit(crate::family::BitSet::from_indices(names.len(), c)),
                })
                .collect())
        }
        (Family::Binary(kind), Splitting::Indexed(sites)) => {
            let base = match &at.members {
                HistSet::Binary(c) => c.clone(),
                _ => return Err(Error::Domain("binary model with explicit class".into())),
            };
            let here = sites.equal(&at.location)?;
            // a declared limit met by a splitting tail has continuum-many possibilities
            for q in &sites.sequences {
                if let SiteSequence::Harmonic { limit, .. } = q {
                    if limit == &at.location && here.is_empty() {
                        return Err(Error::Unsupported(format!(
                            "possibilities at the limit point {} of a splitting sequence",
                            at.location
                        )));
                    }
                }
            }
            let mut cells = Vec::new();
            match here.min() {
                None => cells.push(base),
                Some(n) => {
                    for b in [0u8, 1] {
                        let c = base.meet(&Constraints::bit(n, b));
                        if oracle(*kind, &c).is_ok() {
                            cells.push(c);
                        }
                    }
                }
            }
            Ok(cells
                .into_iter()
                .map(|c| ElementaryPossibility { at: label.clone(), members: HistSet::Binary(c) })
                .collect())
        }
        _ => Err(Error::Domain("family and splitting kinds do not match".into())),
    }
}

/// How chain elements pick their scenario labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChainLabels {
    /// Every element uses the same scenario.
    Fixed { scenario: String },
    /// Element i uses the sequence with zeros on [0, i + offset) and ones elsewhere.
    PrefixZeros { offset: u64 },
}

/// A lower-bounded chain of events.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChainDescriptor {
    /// Explicit elements (point, scenario) in ascending order.
    Finite { elements: Vec<(Point4, String)> },
    /// z_i = base + (i - start) * step in time, for every i >= start, plus optional extra elements.
    Vertical {
        base: Point4,
        #[serde(with = "crate::geometry::qser")]
        step: Q,
        start: u64,
        labels: ChainLabels,
        #[serde(default)]
        extra: Vec<(Point4, String)>,
    },
}

/// Outcome of the compactness test along a chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ChainVerdict {
    /// Some scenario lies in every Σ_h(l).
    Witness { scenario: String, per_element: Vec<String> },
    /// The intersection is empty although (where checked) finite parts are not.
    Empty { reason: String, required: String, prefix_checks: Vec<String> },
}

fn label_for(labels: &ChainLabels, i: u64) -> ChainLabel {
    match labels {
        ChainLabels::Fixed { scenario } => ChainLabel::Named(scenario.clone()),
        ChainLabels::PrefixZeros { offset } => ChainLabel::Seq(Label::zeros_at(0..i + offset)),
    }
}

enum ChainLabel {
    Named(String),
    Seq(Label),
}

fn resolve(model: &MbsModel, l: ChainLabel) -> Result<Scenario> {
    match l {
        ChainLabel::Named(s) => model.scenario(&s),
        ChainLabel::Seq(g) => {
            let s = Scenario::Seq(g);
            if model.family.contains(&s) {
                Ok(s)
            } else {
                Err(Error::Domain(format!("chain label {s} not in {}", model.family.id())))
            }
        }
    }
}

/// Either a scenario in the intersection of Σ_h along the chain, or a certificate that it is empty.
pub fn chain_compactness_witness(model: &MbsModel, chain: &ChainDescriptor) -> Result<ChainVerdict> {
    let fam = &model.family;
    match chain {
        ChainDescriptor::Finite { elements } => {
            let mut classes = Vec::new();
            for (x, s) in elements {
                classes.push(model.event_class(x, &model.scenario(s)?)?);
            }
            for w in classes.windows(2) {
                if !model.leq_s(&w[0], &w[1])? {
                    return Err(Error::Domain(format!(
                        "chain elements {} and {} are not ascending",
                        w[0].location, w[1].location
                    )));
                }
            }
            let meet = classes.iter().fold(fam.universe(), |a, c| fam.meet(&a, &c.members));
            let per: Vec<String> = classes.iter().map(|c| format!("{}: {}", c.location, fam.render(&c.members))).collect();
            match fam.witness(&meet) {
                Some(w) => Ok(ChainVerdict::Witness { scenario: w.to_string(), per_element: per }),
                None => Ok(ChainVerdict::Empty {
                    reason: fam.unsat_reason(&meet).unwrap_or_default(),
                    required: fam.render(&meet),
                    prefix_checks: per,
                }),
            }
        }
        ChainDescriptor::Vertical { base, step, start, labels, extra } => {
            if step <= &Q::from_integer(0.into()) {
                return Err(Error::Unsupported("vertical chains must ascend (step > 0)".into()));
            }
            let z = |i: u64| base.shifted(&(step * Q::from_integer(((i - start) as i64).into())));
            let mut extras = Vec::new();
            for (x, s) in extra {
                extras.push(model.event_class(x, &model.scenario(s)?)?);
            }
            match (labels, fam) {
                (ChainLabels::Fixed { scenario }, _) => {
                    let s = model.scenario(scenario)?;
                    let mut meet = fam.universe();
                    for c in &extras {
                        meet = fam.meet(&meet, &c.members);
                    }
                    let ok = fam.member(&meet, &s);
                    let mut per: Vec<String> = (0..4)
                        .map(|k| {
                            let zi = z(start + k);
                            model.event_class(&zi, &s).map(|c| format!("{zi}: {}", fam.render(&c.members)))
                        })
                        .collect::<Result<_>>()?;
                    per.extend(extras.iter().map(|c| format!("{}: {}", c.location, fam.render(&c.members))));
                    if ok {
                        Ok(ChainVerdict::Witness { scenario: s.to_string(), per_element: per })
                    } else {
                        match fam.witness(&meet) {
                            Some(w) if chain_contains(model, &w, &s, &z, *start)? => {
                                Ok(ChainVerdict::Witness { scenario: w.to_string(), per_element: per })
                            }
                            _ => Ok(ChainVerdict::Empty {
                                reason: "extra elements exclude the chain scenario".into(),
                                required: fam.render(&meet),
                                prefix_checks: per,
                            }),
                        }
                    }
                }
                (ChainLabels::PrefixZeros { offset }, Family::Binary(kind)) => {
                    let sites = model
                        .indexed_sites()
                        .ok_or_else(|| Error::Unsupported("prefix-zero chains need indexed sites".into()))?;
                    // K = {n >= offset + start : site n <_M z_{n - offset}}: indices forced both ways
                    let mut conflict = IndexSet::empty();
                    let m = sites.samples.len() as u64;
                    for (n, p) in sites.samples.iter().enumerate() {
                        let n = n as u64;
                        if n >= offset + start && lt_m(p, &z(n - offset)) {
                            conflict = conflict.union(&IndexSet::single(n));
                        }
                    }
                    if let Some(seq) = sites.sequences.first() {
                        match seq {
                            SiteSequence::Arithmetic { base: b, step: s } => {
                                // member k has index n = m + k - k0; its chain partner is z_{n - offset}
                                let shift = base.shifted(&(step * Q::from_integer(
                                    (m as i64 - seq.first_param() as i64 - *offset as i64 - *start as i64).into(),
                                )));
                                let moving = Point4::new(step.clone(), Q::from_integer(0.into()), Q::from_integer(0.into()), Q::from_integer(0.into()));
                                let lin = SiteSequence::Arithmetic { base: b.sub(&shift), step: s.sub(&moving) };
                                // member(k) <_M shift + k*moving  <=>  (b - shift) + k (s - moving) <_M origin
                                let ks = lin.below_params(&Point4::origin(), true)?;
                                let lo = (offset + start).saturating_sub(m) + seq.first_param();
                                let ks = ks.intersect(&IndexSet::range(lo, None));
                                for &(a, e) in ks.runs() {
                                    conflict = conflict.union(&IndexSet::range(
                                        a + m - seq.first_param(),
                                        e.map(|e| e + m - seq.first_param()),
                                    ));
                                }
                            }
                            _ => return Err(Error::Unsupported("prefix-zero chains over non-arithmetic sites".into())),
                        }
                    }
                    let all_sites = match sites.count() {
                        Some(c) => IndexSet::range(0, Some(c)),
                        None => IndexSet::all(),
                    };
                    let mut need = Constraints::on(all_sites, 0);
                    if let Some(n) = conflict.min() {
                        need = need.meet(&Constraints::bit(n, 1));
                    }
                    for c in &extras {
                        if let HistSet::Binary(k) = &c.members {
                            need = need.meet(k);
                        }
                    }
                    let mut prefix = Vec::new();
                    for j in 0..12u64 {
                        let i = start + j;
                        let s = resolve(model, label_for(labels, i))?;
                        let mut acc = Constraints::none();
                        for (i2, _) in (*start..=i).enumerate() {
                            let i2 = start + i2 as u64;
                            let c = model.event_class(&z(i2), &resolve(model, label_for(labels, i2))?)?;
                            if let HistSet::Binary(k) = c.members {
                                acc = acc.meet(&k);
                            }
                        }
                        let sat = oracle(*kind, &acc).is_ok();
                        prefix.push(format!("elements {start}..{i} (label {s}): {}", if sat { "nonempty" } else { "empty" }));
                    }
                    match oracle(*kind, &need) {
                        Ok(g) => Ok(ChainVerdict::Witness { scenario: g.to_string(), per_element: prefix }),
                        Err(u) => {
                            let required = if conflict.is_empty() && matches!(kind, BinaryKind::FinitelyManyZeros | BinaryKind::AtMostKZeros(_)) && sites.count().is_none() {
                                "all-zeros sequence required".to_string()
                            } else {
                                need.to_string()
                            };
                            Ok(ChainVerdict::Empty { reason: u.to_string(), required, prefix_checks: prefix })
                        }
                    }
                }
                (ChainLabels::PrefixZeros { .. }, Family::Explicit(_)) => {
                    Err(Error::Unsupported("prefix-zero labels need a binary family".into()))
                }
            }
        }
    }
}

fn chain_contains(
    model: &MbsModel,
    w: &Scenario,
    s: &Scenario,
    z: &dyn Fn(u64) -> Point4,
    start: u64,
) -> Result<bool> {
    for k in 0..8 {
        if !model.event_class(&z(start + k), s)?.contains(model, w) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether every pair of scenarios through the event is decided (no limit-point ambiguity).
pub fn undivided_decided(model: &MbsModel, at: &EventClass, a: &Scenario, b: &Scenario) -> Result<bool> {
    if a == b {
        return Ok(true);
    }
    Ok(model.is_choice_point(at, a, b)? != Decision::Undecided)
}
