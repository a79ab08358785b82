//! Finite presentations of Minkowskian branching structures: scenarios,
//! splitting sites, the overlap regions, event classes and their order.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{BinaryKind, Constraints, Family, HistSet, Scenario};
use crate::geometry::{leq_m, lt_m, Point4, Q};
use crate::indexset::IndexSet;
use crate::sites::{SiteFamily, SiteSequence};

/// Splitting sites of one unordered scenario pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSites {
    pub a: String,
    pub b: String,
    pub sites: SiteFamily,
}

/// How the splitting sets C_{s,e} are presented.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Splitting {
    /// One site family per unordered pair of named scenarios.
    Explicit(Vec<PairSites>),
    /// Binary families: site n belongs to C_{g,g'} iff g(n) != g'(n).
    Indexed(SiteFamily),
}

/// Opaque per-scenario payload at a point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub scenario: String,
    pub point: Point4,
    pub payload: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MbsModel {
    pub name: String,
    pub family: Family,
    pub splitting: Splitting,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
}

/// A point of the quotient: a location together with the scenarios glued there.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EventClass {
    pub model: String,
    pub location: Point4,
    /// Scenario used to build the class.
    pub rep: Scenario,
    pub members: HistSet,
}

impl EventClass {
    pub fn contains(&self, m: &MbsModel, s: &Scenario) -> bool {
        m.family.member(&self.members, s)
    }
}

/// Three-valued answer for the limit-point fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    Yes,
    No,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum Violation {
    UnknownScenario { name: String },
    DuplicateScenario { name: String },
    Asymmetric { a: String, b: String },
    EmptySplitting { a: String, b: String },
    NotSlr { a: String, b: String, p: Point4, q: Point4 },
    Triangle { sigma: String, eta: String, gamma: String, x: Point4 },
    MissingSites { detail: String },
    WrongFamily { detail: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownScenario { name } => write!(f, "symmetry: pair mentions unknown scenario '{name}'"),
            Violation::DuplicateScenario { name } => write!(f, "scenario '{name}' listed twice"),
            Violation::Asymmetric { a, b } => write!(f, "symmetry: C({a},{b}) and C({b},{a}) differ"),
            Violation::EmptySplitting { a, b } => write!(f, "nonemptiness: C({a},{b}) is empty"),
            Violation::NotSlr { a, b, p, q } => write!(f, "pairwise SLR: {p} and {q} in C({a},{b}) are comparable"),
            Violation::Triangle { sigma, eta, gamma, x } => write!(
                f,
                "triangle: {x} in C({sigma},{gamma}) has no point of C({sigma},{eta}) or C({eta},{gamma}) below it"
            ),
            Violation::MissingSites { detail } => write!(f, "nonemptiness: {detail}"),
            Violation::WrongFamily { detail } => write!(f, "family: {detail}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn named(s: &Scenario) -> Result<&str> {
    match s {
        Scenario::Named(n) => Ok(n),
        Scenario::Seq(_) => Err(Error::Domain("sequence label used with a named-scenario model".into())),
    }
}

impl MbsModel {
    pub fn new(name: impl Into<String>, family: Family, splitting: Splitting) -> Self {
        MbsModel { name: name.into(), family, splitting, annotations: Vec::new() }
    }

    pub fn is_2d(&self) -> bool {
        let fam_2d = |f: &SiteFamily| {
            f.samples.iter().all(Point4::is_2d)
                && f.sequences.iter().all(|s| match s {
                    SiteSequence::Arithmetic { base, step } => base.is_2d() && step.is_2d(),
                    SiteSequence::Harmonic { limit, dir, .. } => limit.is_2d() && dir.is_2d(),
                    SiteSequence::ConeWrap => false,
                })
        };
        match &self.splitting {
            Splitting::Explicit(v) => v.iter().all(|p| fam_2d(&p.sites)),
            Splitting::Indexed(s) => fam_2d(s),
        }
    }

    pub fn scenario(&self, s: &str) -> Result<Scenario> {
        self.family.scenario(s)
    }

    fn check_scenario(&self, s: &Scenario) -> Result<()> {
        if self.family.contains(s) {
            Ok(())
        } else {
            Err(Error::lookup("scenario", s.to_string()))
        }
    }

    /// Site family of the pair, for named scenarios.
    pub fn pair_sites(&self, a: &str, b: &str) -> Option<&SiteFamily> {
        match &self.splitting {
            Splitting::Explicit(v) => v
                .iter()
                .find(|p| (p.a == a && p.b == b) || (p.a == b && p.b == a))
                .map(|p| &p.sites),
            Splitting::Indexed(_) => None,
        }
    }

    /// Indexed site family of a binary model.
    pub fn indexed_sites(&self) -> Option<&SiteFamily> {
        match &self.splitting {
            Splitting::Indexed(s) => Some(s),
            Splitting::Explicit(_) => None,
        }
    }

    pub fn binary_kind(&self) -> Option<BinaryKind> {
        match self.family {
            Family::Binary(k) => Some(k),
            Family::Explicit(_) => None,
        }
    }

    /// Whether x lies in R_{s,e}: no splitting point of the pair strictly below x.
    pub fn in_overlap(&self, x: &Point4, s: &Scenario, e: &Scenario) -> Result<bool> {
        self.check_scenario(s)?;
        self.check_scenario(e)?;
        if s == e {
            return Ok(true);
        }
        match (&self.splitting, s, e) {
            (Splitting::Explicit(_), _, _) => {
                let (a, b) = (named(s)?, named(e)?);
                match self.pair_sites(a, b) {
                    Some(f) => Ok(!f.any_below(x)?),
                    None => Ok(true),
                }
            }
            (Splitting::Indexed(sites), Scenario::Seq(g), Scenario::Seq(h)) => {
                let d = g.diff(h);
                Ok(sites.below(x, true)?.intersect(&d).is_empty())
            }
            _ => Err(Error::Domain("scenario kind does not match the model".into())),
        }
    }

    /// The class [x_s].
    pub fn event_class(&self, x: &Point4, s: &Scenario) -> Result<EventClass> {
        self.check_scenario(s)?;
        let members = match (&self.family, &self.splitting, s) {
            (Family::Explicit(names), _, _) => {
                let mut idx = Vec::new();
                for (i, n) in names.iter().enumerate() {
                    if self.in_overlap(x, s, &Scenario::Named(n.clone()))? {
                        idx.push(i);
                    }
                }
                HistSet::Explicit(crate::family::BitSet::from_indices(names.len(), idx))
            }
            (Family::Binary(_), Splitting::Indexed(sites), Scenario::Seq(g)) => {
                HistSet::Binary(Constraints::agree(g, &sites.below(x, true)?))
            }
            _ => return Err(Error::Domain("scenario kind does not match the model".into())),
        };
        Ok(EventClass { model: self.name.clone(), location: x.clone(), rep: s.clone(), members })
    }

    /// [a] <=_S [b].
    pub fn leq_s(&self, a: &EventClass, b: &EventClass) -> Result<bool> {
        if a.model != self.name || b.model != self.name {
            return Err(Error::Domain(format!(
                "event classes from models '{}' and '{}' compared in '{}'",
                a.model, b.model, self.name
            )));
        }
        Ok(leq_m(&a.location, &b.location) && a.contains(self, &b.rep))
    }

    /// Strict order on event classes.
    pub fn lt_s(&self, a: &EventClass, b: &EventClass) -> Result<bool> {
        Ok(self.leq_s(a, b)? && !self.same_event(a, b))
    }

    /// Whether two classes denote the same event.
    pub fn same_event(&self, a: &EventClass, b: &EventClass) -> bool {
        a.location == b.location && a.contains(self, &b.rep)
    }

    /// Splitting sites of the pair that equal x.
    fn splits_at(&self, x: &Point4, s: &Scenario, e: &Scenario) -> Result<bool> {
        match (&self.splitting, s, e) {
            (Splitting::Explicit(_), _, _) => match self.pair_sites(named(s)?, named(e)?) {
                Some(f) => f.contains(x),
                None => Ok(false),
            },
            (Splitting::Indexed(sites), Scenario::Seq(g), Scenario::Seq(h)) => {
                Ok(!sites.equal(x)?.intersect(&g.diff(h)).is_empty())
            }
            _ => Err(Error::Domain("scenario kind does not match the model".into())),
        }
    }

    /// Generated choice points {[c_s] : c in C_{s,e}} for the finitely presented part of C.
    pub fn generated_choice_points(&self, s: &Scenario, e: &Scenario) -> Result<Vec<EventClass>> {
        self.check_scenario(s)?;
        self.check_scenario(e)?;
        if s == e {
            return Err(Error::Domain("generated choice points need two distinct scenarios".into()));
        }
        let mut locs: Vec<Point4> = Vec::new();
        match (&self.splitting, s, e) {
            (Splitting::Explicit(_), _, _) => {
                if let Some(f) = self.pair_sites(named(s)?, named(e)?) {
                    locs.extend(f.samples.iter().cloned());
                }
            }
            (Splitting::Indexed(sites), Scenario::Seq(g), Scenario::Seq(h)) => {
                let d = g.diff(h);
                let have = match sites.count() {
                    Some(c) => d.intersect(&IndexSet::range(0, Some(c))),
                    None => d,
                };
                if !have.is_finite() {
                    return Err(Error::Unsupported("infinitely many generated choice points".into()));
                }
                for i in have.iter_below(u64::MAX) {
                    locs.push(sites.point(i)?);
                }
            }
            _ => return Err(Error::Domain("scenario kind does not match the model".into())),
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for l in locs {
            if seen.insert(l.clone()) {
                out.push(self.event_class(&l, s)?);
            }
        }
        Ok(out)
    }

    /// Declared accumulation points of C_{s,e} with the converging sequences.
    fn declared_limits(&self, s: &Scenario, e: &Scenario) -> Result<Vec<(Point4, SiteSequence)>> {
        let mut out = Vec::new();
        match (&self.splitting, s, e) {
            (Splitting::Explicit(_), _, _) => {
                if let Some(f) = self.pair_sites(named(s)?, named(e)?) {
                    for q in &f.sequences {
                        if let Some(l) = q.limit() {
                            out.push((l.clone(), q.clone()));
                        }
                    }
                }
            }
            (Splitting::Indexed(sites), Scenario::Seq(g), Scenario::Seq(h)) => {
                let d = g.diff(h);
                let m = sites.samples.len() as u64;
                if let Some(q) = sites.sequences.first() {
                    // the pair splits at infinitely many members only if d has an unbounded tail
                    if let Some(l) = q.limit() {
                        if !d.intersect(&IndexSet::range(m, None)).is_finite() {
                            out.push((l.clone(), q.clone()));
                        }
                    }
                }
            }
            _ => return Err(Error::Domain("scenario kind does not match the model".into())),
        }
        Ok(out)
    }

    /// Whether e is maximal in h_s ∩ h_e.
    pub fn is_choice_point(&self, ev: &EventClass, s: &Scenario, e: &Scenario) -> Result<Decision> {
        self.check_scenario(s)?;
        self.check_scenario(e)?;
        if s == e {
            return Err(Error::Domain("choice points need two distinct scenarios".into()));
        }
        let x = &ev.location;
        if !ev.contains(self, s) || !ev.contains(self, e) || !self.in_overlap(x, s, e)? {
            return Err(Error::Domain(format!("{x} is not in both histories of {s} and {e}")));
        }
        if self.splits_at(x, s, e)? {
            return Ok(Decision::Yes);
        }
        let lims = self.declared_limits(s, e)?;
        let at: Vec<&SiteSequence> = lims.iter().filter(|(l, _)| l == x).map(|(_, q)| q).collect();
        if at.is_empty() {
            return Ok(Decision::No);
        }
        if !x.is_2d() {
            return Ok(Decision::Undecided);
        }
        let (mut right, mut left) = (false, false);
        for q in at {
            match q {
                SiteSequence::Harmonic { dir, .. } => {
                    if !dir.is_2d() {
                        return Ok(Decision::Undecided);
                    }
                    if dir.x1 >= dir.t {
                        right = true;
                    }
                    if dir.x1 <= -dir.t.clone() {
                        left = true;
                    }
                }
                _ => return Ok(Decision::Undecided),
            }
        }
        Ok(if right && left { Decision::Yes } else { Decision::No })
    }

    /// Whether s and e are undivided at the event (share a point strictly above it).
    pub fn undivided(&self, s: &Scenario, e: &Scenario, at: &EventClass) -> Result<bool> {
        if s == e {
            return Ok(true);
        }
        match self.is_choice_point(at, s, e)? {
            Decision::Yes => Ok(false),
            Decision::No => Ok(true),
            Decision::Undecided => Err(Error::Unsupported("limit choice point outside the 2D fragment".into())),
        }
    }

    /// A rational point strictly above the event that still lies in R_{s,e}, when s, e are undivided there.
    pub fn undivided_witness(&self, s: &Scenario, e: &Scenario, at: &EventClass) -> Result<Option<Point4>> {
        if !self.undivided(s, e, at)? {
            return Ok(None);
        }
        let mut tau = Q::from_integer(1.into());
        for _ in 0..200 {
            let y = at.location.shifted(&tau);
            if self.in_overlap(&y, s, e)? {
                debug_assert!(lt_m(&at.location, &y));
                return Ok(Some(y));
            }
            tau /= Q::from_integer(2.into());
        }
        Err(Error::Unsupported("no overlap witness found above the point".into()))
    }

    pub fn validate(&self) -> Result<ValidationReport> {
        let mut rep = ValidationReport::default();
        match (&self.family, &self.splitting) {
            (Family::Explicit(names), Splitting::Explicit(pairs)) => self.validate_explicit(names, pairs, &mut rep)?,
            (Family::Binary(k), Splitting::Indexed(sites)) => {
                match (k.width(), sites.count()) {
                    (Some(w), Some(c)) if c < w => rep.violations.push(Violation::MissingSites {
                        detail: format!("{} varies {w} indices but only {c} sites are given", k.id()),
                    }),
                    (None, Some(c)) => rep.violations.push(Violation::MissingSites {
                        detail: format!(
                            "{} has labels differing only beyond the {c} given sites; their C is empty",
                            k.id()
                        ),
                    }),
                    _ => {}
                }
                let (bad, notes) = sites.slr_violations()?;
                for (p, q) in bad {
                    rep.violations.push(Violation::NotSlr { a: "*".into(), b: "*".into(), p, q });
                }
                rep.notes.extend(notes);
                rep.notes.push("symmetry and the triangle condition hold by the index rule".into());
            }
            _ => rep.violations.push(Violation::WrongFamily {
                detail: "named scenarios need explicit splitting; binary families need indexed sites".into(),
            }),
        }
        Ok(rep)
    }

    fn validate_explicit(&self, names: &[String], pairs: &[PairSites], rep: &mut ValidationReport) -> Result<()> {
        let mut seen = BTreeSet::new();
        for n in names {
            if !seen.insert(n) {
                rep.violations.push(Violation::DuplicateScenario { name: n.clone() });
            }
        }
        for p in pairs {
            for n in [&p.a, &p.b] {
                if !names.contains(n) {
                    rep.violations.push(Violation::UnknownScenario { name: n.clone() });
                }
            }
        }
        for (i, p) in pairs.iter().enumerate() {
            for q in &pairs[i + 1..] {
                let same_pair = (p.a == q.a && p.b == q.b) || (p.a == q.b && p.b == q.a);
                if same_pair && p.sites != q.sites {
                    rep.violations.push(Violation::Asymmetric { a: p.a.clone(), b: p.b.clone() });
                }
            }
        }
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                match self.pair_sites(a, b) {
                    Some(f) if !f.samples.is_empty() || !f.sequences.is_empty() => {
                        let (bad, notes) = f.slr_violations()?;
                        for (p, q) in bad {
                            rep.violations.push(Violation::NotSlr { a: a.clone(), b: b.clone(), p, q });
                        }
                        rep.notes.extend(notes.into_iter().map(|n| format!("C({a},{b}) {n}")));
                    }
                    _ => rep.violations.push(Violation::EmptySplitting { a: a.clone(), b: b.clone() }),
                }
            }
        }
        // triangle condition over distinct triples
        let empty = SiteFamily::default();
        for s in names {
            for g in names {
                if s == g {
                    continue;
                }
                let csg = self.pair_sites(s, g).unwrap_or(&empty);
                for e in names {
                    if e == s || e == g {
                        continue;
                    }
                    let cse = self.pair_sites(s, e).unwrap_or(&empty);
                    let ceg = self.pair_sites(e, g).unwrap_or(&empty);
                    let below = |x: &Point4| -> Result<bool> {
                        Ok(cse.some_below_or_equal(x)?.is_some() || ceg.some_below_or_equal(x)?.is_some())
                    };
                    for x in &csg.samples {
                        if !below(x)? {
                            rep.violations.push(Violation::Triangle {
                                sigma: s.clone(),
                                eta: e.clone(),
                                gamma: g.clone(),
                                x: x.clone(),
                            });
                        }
                    }
                    for q in &csg.sequences {
                        if cse.sequences.contains(q) || ceg.sequences.contains(q) {
                            continue;
                        }
                        let mut probes = vec![q.member(q.first_param())?];
                        probes.extend(q.limit().cloned());
                        for x in probes {
                            if !below(&x)? {
                                rep.violations.push(Violation::Triangle {
                                    sigma: s.clone(),
                                    eta: e.clone(),
                                    gamma: g.clone(),
                                    x,
                                });
                            }
                        }
                        rep.notes.push(format!(
                            "triangle for the sequence in C({s},{g}) checked on its first member and limit only"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Named scenarios of an explicit model.
    pub fn scenario_names(&self) -> Result<&[String]> {
        match &self.family {
            Family::Explicit(v) => Ok(v),
            Family::Binary(_) => Err(Error::Unsupported("symbolic family has no finite scenario list".into())),
        }
    }

    /// All scenarios of a finite family (binary all-strings families are enumerated).
    pub fn enumerate_scenarios(&self) -> Result<Vec<Scenario>> {
        match &self.family {
            Family::Explicit(v) => Ok(v.iter().map(|n| Scenario::Named(n.clone())).collect()),
            Family::Binary(BinaryKind::AllStrings(n)) if *n <= 16 => Ok((0u64..1 << n)
                .map(|m| Scenario::Seq(crate::family::Label::zeros_at((0..*n).filter(|i| m >> i & 1 == 0))))
                .collect()),
            Family::Binary(k) => Err(Error::Unsupported(format!("cannot enumerate {}", k.id()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{q, qi};

    fn two(c: Vec<Point4>) -> MbsModel {
        MbsModel::new(
            "t",
            Family::Explicit(vec!["s".into(), "e".into()]),
            Splitting::Explicit(vec![PairSites { a: "s".into(), b: "e".into(), sites: SiteFamily::finite(c) }]),
        )
    }

    fn sc(n: &str) -> Scenario {
        Scenario::Named(n.into())
    }

    #[test]
    fn comparable_sites_rejected() {
        let m = two(vec![Point4::int(0, 0, 0, 0), Point4::int(1, 0, 0, 0)]);
        let r = m.validate().unwrap();
        assert!(matches!(r.violations[..], [Violation::NotSlr { .. }]));
    }

    #[test]
    fn triangle_counterexample() {
        // C(a,c) point has nothing below it in C(a,b) or C(b,c)
        let names = vec!["a".to_string(), "b".into(), "c".into()];
        let f = |v: Vec<Point4>| SiteFamily::finite(v);
        let m = MbsModel::new(
            "tri",
            Family::Explicit(names),
            Splitting::Explicit(vec![
                PairSites { a: "a".into(), b: "b".into(), sites: f(vec![Point4::int(0, 5, 0, 0)]) },
                PairSites { a: "b".into(), b: "c".into(), sites: f(vec![Point4::int(0, 5, 0, 0)]) },
                PairSites { a: "a".into(), b: "c".into(), sites: f(vec![Point4::int(0, -5, 0, 0)]) },
            ]),
        );
        let r = m.validate().unwrap();
        assert!(r.violations.iter().any(|v| matches!(v, Violation::Triangle { .. })));
    }

    #[test]
    fn overlap_and_classes() {
        let c = Point4::int(0, 0, 0, 0);
        let m = two(vec![c.clone()]);
        assert!(m.validate().unwrap().is_valid());
        assert!(m.in_overlap(&c, &sc("s"), &sc("e")).unwrap());
        let above = Point4::int(1, 0, 0, 0);
        assert!(!m.in_overlap(&above, &sc("s"), &sc("e")).unwrap());
        let k = m.event_class(&above, &sc("s")).unwrap();
        assert!(!k.contains(&m, &sc("e")));
        let low = m.event_class(&Point4::int(-1, 0, 0, 0), &sc("s")).unwrap();
        assert!(low.contains(&m, &sc("e")));
        let ke = m.event_class(&above, &sc("e")).unwrap();
        assert!(!m.leq_s(&k, &ke).unwrap() && !m.leq_s(&ke, &k).unwrap());
        assert!(m.leq_s(&low, &ke).unwrap() && m.leq_s(&low, &k).unwrap());
        assert!(m.in_overlap(&c, &sc("s"), &sc("x")).is_err());
    }

    #[test]
    fn choice_points_finite() {
        let c = Point4::int(0, 0, 0, 0);
        let m = two(vec![c.clone()]);
        let (s, e) = (sc("s"), sc("e"));
        let at = m.event_class(&c, &s).unwrap();
        assert_eq!(m.is_choice_point(&at, &s, &e).unwrap(), Decision::Yes);
        let far = m.event_class(&Point4::int(-9, 0, 0, 0), &s).unwrap();
        assert_eq!(m.is_choice_point(&far, &s, &e).unwrap(), Decision::No);
        let w = m.undivided_witness(&s, &e, &far).unwrap().unwrap();
        assert!(lt_m(&far.location, &w) && m.in_overlap(&w, &s, &e).unwrap());
        assert!(m.generated_choice_points(&s, &s).is_err());
        let up = m.event_class(&Point4::int(1, 0, 0, 0), &s).unwrap();
        assert!(matches!(m.is_choice_point(&up, &s, &e), Err(Error::Domain(_))));
    }

    #[test]
    fn mixed_models_rejected() {
        let m = two(vec![Point4::int(0, 0, 0, 0)]);
        let mut other = m.clone();
        other.name = "other".into();
        let a = m.event_class(&Point4::int(0, 0, 0, 0), &sc("s")).unwrap();
        let b = other.event_class(&Point4::int(0, 0, 0, 0), &sc("s")).unwrap();
        assert!(matches!(m.leq_s(&a, &b), Err(Error::Domain(_))));
        let _ = (q(1, 2), qi(0));
    }
}
