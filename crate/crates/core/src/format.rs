//! Model files. One TOML document per model: either an MBS presentation (named scenarios with
//! per-pair splitting sites, or a binary family with indexed sites) or an abstract transition
//! structure, together with named points, chains, point sets and an expected-verdict table.
//!
//! ```toml
//! name = "two-sites"
//! kind = "mbs"                      # or "structure"
//!
//! [family]
//! scenarios = ["a", "b"]            # or: binary = "finitely-many-zeros"
//!
//! [[pair]]
//! a = "a"
//! b = "b"
//! [pair.sites]
//! samples = [["0", "-1", "0", "0"], ["0", "1", "0", "0"]]
//! sequences = [{ kind = "harmonic", limit = ["0", "0", "0", "0"], dir = ["0", "1", "0", "0"], start = 2 }]
//!
//! [[point]]
//! id = "e1"
//! at = ["0", "-1", "0", "0"]
//! scenario = "a"
//! outcomes = { "+" = "a", "-" = "b" }
//! ```
//!
//! Rationals are written "p/q". Binary models use `[sites]` instead of `[[pair]]`; structures list
//! `[[event]]` tables with `histories` and `cells` (`"all"`, a list of scenario names, or
//! `{ zeros = "{..}", ones = "{..}" }`) and `order = [["lo", "hi"], ...]`. Index sets are written
//! like `"{0..3, 7, 9..}"` with inclusive ranges.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{BinaryKind, BitSet, Constraints, Family, HistSet, Label, Scenario};
use crate::funny_business::SymbolicPoints;
use crate::geometry::{parse_q, Point4, Q};
use crate::histories::ChainDescriptor;
use crate::indexset::IndexSet;
use crate::model::{Annotation, EventClass, MbsModel, PairSites, Splitting};
use crate::sites::SiteFamily;
use crate::structure::{Event, Structure, Transition, TransitionSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocKind {
    Mbs,
    Structure,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary: Option<String>,
}

/// A set of histories as written in a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HistSpec {
    Names(Vec<String>),
    Word(String),
    Bits(Constraints),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub id: String,
    pub at: Point4,
    pub scenario: String,
    /// Outcome token -> a scenario in that outcome.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outcomes: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at: Option<Point4>,
    pub histories: HistSpec,
    pub cells: Vec<HistSpec>,
    /// Outcome token -> cell index.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outcomes: BTreeMap<String, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicSpec {
    pub indices: IndexSet,
    /// Abstract choice points with nothing below them (no geometry).
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skeleton: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub name: String,
    pub descriptor: ChainDescriptor,
}

/// A point set for Postulate B: listed points, or symbolic points x_n (n in `indices`) lying in
/// exactly the histories with g(n) = rule(n). With `scale`, x_n = scale * site_n in an indexed model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XSetSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

/// A command line (verb plus flags) and the verdict it must produce.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub verb: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<String>,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub name: String,
    pub kind: DocKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transitions: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub order: Vec<(String, String)>,
    pub family: FamilySpec,
    #[serde(default, rename = "pair", skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<PairSites>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<SiteFamily>,
    #[serde(default, rename = "annotation", skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<Annotation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbolic: Option<SymbolicSpec>,
    #[serde(default, rename = "point", skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<PointSpec>,
    #[serde(default, rename = "event", skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<EventSpec>,
    #[serde(default, rename = "chain", skip_serializing_if = "Vec::is_empty")]
    pub chains: Vec<ChainSpec>,
    #[serde(default, rename = "xset", skip_serializing_if = "Vec::is_empty")]
    pub xsets: Vec<XSetSpec>,
    #[serde(default, rename = "expect", skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<Expectation>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Parses a model file; syntax and value errors carry the line and column.
pub fn parse(text: &str) -> Result<Document> {
    toml::from_str::<Document>(text).map_err(|e| {
        let msg = e.message().trim().to_string();
        match e.span() {
            Some(s) => {
                let (l, c) = line_col(text, s.start);
                Error::Parse(format!("line {l}, column {c}: {msg}"))
            }
            None => Error::Parse(msg),
        }
    })
}

pub fn to_toml(doc: &Document) -> Result<String> {
    toml::to_string(doc).map_err(|e| Error::Parse(format!("cannot serialize {}: {e}", doc.name)))
}

/// Product-function rule over binary indices: `zeros`, `ones`, or a label like `zeros[0..3]`.
pub fn parse_rule(s: &str) -> Result<Label> {
    match s.trim() {
        "zeros" | "0" => Ok(Label::constant(0)),
        "ones" | "1" => Ok(Label::constant(1)),
        t => Label::parse(t),
    }
}

/// A point given as `t,x1,x2,x3` (optionally parenthesized) with rational entries.
pub fn parse_point(s: &str) -> Result<Point4> {
    let t = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<String> = t.split(',').map(|p| p.trim().to_string()).collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!("point '{s}' needs four coordinates")));
    }
    Point4::from_strs(&parts)
}

/// A resolved point set for Postulate B.
#[derive(Clone, Debug)]
pub enum XSet {
    Finite { ids: Vec<String>, sets: Vec<HistSet> },
    Symbolic { points: SymbolicPoints, rule: Label, scale: Option<Q> },
}

/// A document with its family, model and structure built and cross-checked.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub doc: Document,
    pub family: Family,
    pub model: Option<MbsModel>,
    pub structure: Structure,
    /// Event classes of the points of an MBS document, in structure order.
    pub classes: Vec<EventClass>,
    /// Structure index of every point or event id (merged points share an index).
    pub index: BTreeMap<String, usize>,
}

impl Document {
    pub fn family(&self) -> Result<Family> {
        match (&self.family.scenarios, &self.family.binary) {
            (Some(v), None) => Ok(Family::Explicit(v.clone())),
            (None, Some(b)) => Ok(Family::Binary(BinaryKind::parse(b)?)),
            _ => Err(Error::Parse(format!("{}: [family] needs exactly one of scenarios, binary", self.name))),
        }
    }

    pub fn model(&self) -> Result<Option<MbsModel>> {
        if self.kind != DocKind::Mbs {
            return Ok(None);
        }
        let family = self.family()?;
        let splitting = match (&family, &self.sites) {
            (Family::Explicit(_), None) => Splitting::Explicit(self.pairs.clone()),
            (Family::Binary(_), Some(s)) if self.pairs.is_empty() => Splitting::Indexed(s.clone()),
            (Family::Binary(_), _) => {
                return Err(Error::Parse(format!("{}: a binary family needs [sites] and no [[pair]]", self.name)))
            }
            (Family::Explicit(_), Some(_)) => {
                return Err(Error::Parse(format!("{}: named scenarios take [[pair]] sites, not [sites]", self.name)))
            }
        };
        let mut m = MbsModel::new(self.name.clone(), family, splitting);
        m.annotations = self.annotations.clone();
        Ok(Some(m))
    }

    pub fn load(&self) -> Result<Loaded> {
        let family = self.family()?;
        let model = self.model()?;
        let mut index = BTreeMap::new();
        let (structure, classes) = match &model {
            Some(m) => {
                if !self.events.is_empty() || !self.order.is_empty() {
                    return Err(Error::Parse(format!("{}: [[event]] and order belong to structure documents", self.name)));
                }
                let triples: Vec<(String, Point4, Scenario)> = self
                    .points
                    .iter()
                    .map(|p| Ok((p.id.clone(), p.at.clone(), m.scenario(&p.scenario)?)))
                    .collect::<Result<_>>()?;
                let (st, classes) = Structure::from_model(m, &triples)?;
                for (id, x, s) in &triples {
                    let c = m.event_class(x, s)?;
                    let k = classes.iter().position(|k| m.same_event(k, &c)).expect("merged class");
                    if index.insert(id.clone(), k).is_some() {
                        return Err(Error::Parse(format!("{}: duplicate point id '{id}'", self.name)));
                    }
                }
                (st, classes)
            }
            None => {
                if !self.points.is_empty() {
                    return Err(Error::Parse(format!("{}: [[point]] needs an mbs document", self.name)));
                }
                let mut events = Vec::new();
                for (k, e) in self.events.iter().enumerate() {
                    if index.insert(e.id.clone(), k).is_some() {
                        return Err(Error::Parse(format!("{}: duplicate event id '{}'", self.name, e.id)));
                    }
                    let cells = e.cells.iter().map(|c| hist_set(&family, c)).collect::<Result<_>>()?;
                    events.push(Event {
                        id: e.id.clone(),
                        location: e.at.clone(),
                        histories: hist_set(&family, &e.histories)?,
                        cells,
                    });
                }
                let mut less = Vec::new();
                for (a, b) in &self.order {
                    let look = |s: &String| index.get(s).copied().ok_or_else(|| Error::lookup("event", s.clone()));
                    less.push((look(a)?, look(b)?));
                }
                (Structure::new(family.clone(), events, &less)?, Vec::new())
            }
        };
        for t in &self.transitions {
            if !index.contains_key(t) {
                return Err(Error::lookup("point", t.clone()));
            }
        }
        Ok(Loaded { doc: self.clone(), family, model, structure, classes, index })
    }
}

/// Parses a history set written in a file.
pub fn hist_set(family: &Family, h: &HistSpec) -> Result<HistSet> {
    match (family, h) {
        (_, HistSpec::Word(w)) if w == "all" => Ok(family.universe()),
        (Family::Explicit(_), HistSpec::Names(v)) => family.set_of(v.iter().map(String::as_str)),
        (Family::Binary(_), HistSpec::Bits(c)) => Ok(HistSet::Binary(c.clone())),
        (Family::Binary(_), HistSpec::Names(v)) if v.is_empty() => Ok(HistSet::Binary(Constraints::none())),
        _ => Err(Error::Parse(format!("history set {h:?} does not fit family {}", family.id()))),
    }
}

/// The file form of a history set.
pub fn hist_spec(family: &Family, h: &HistSet) -> HistSpec {
    match (family, h) {
        (Family::Explicit(v), HistSet::Explicit(b)) => {
            if b.count() == v.len() {
                HistSpec::Word("all".into())
            } else {
                HistSpec::Names(b.iter().map(|i| v[i].clone()).collect())
            }
        }
        (_, HistSet::Binary(c)) if c.zeros.is_empty() && c.ones.is_empty() => HistSpec::Word("all".into()),
        (_, HistSet::Binary(c)) => HistSpec::Bits(c.clone()),
        _ => HistSpec::Names(Vec::new()),
    }
}

impl Loaded {
    pub fn name(&self) -> &str {
        &self.doc.name
    }

    pub fn model(&self) -> Result<&MbsModel> {
        self.model
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("{} is an abstract structure, not an MBS", self.doc.name)))
    }

    /// Structure indices of the transition points, in file order.
    pub fn transition_points(&self) -> Vec<usize> {
        let ids: Vec<&String> = if self.doc.transitions.is_empty() {
            match self.doc.kind {
                DocKind::Mbs => self.doc.points.iter().map(|p| &p.id).collect(),
                DocKind::Structure => self.doc.events.iter().map(|e| &e.id).collect(),
            }
        } else {
            self.doc.transitions.iter().collect()
        };
        let mut out: Vec<usize> = Vec::new();
        for id in ids {
            let k = self.index[id];
            if !out.contains(&k) {
                out.push(k);
            }
        }
        out
    }

    fn outcome_map(&self, k: usize) -> BTreeMap<String, HistSet> {
        let st = &self.structure;
        let mut out = BTreeMap::new();
        for p in &self.doc.points {
            if self.index.get(&p.id) == Some(&k) {
                for (tok, s) in &p.outcomes {
                    if let Ok(sc) = self.family.scenario(s) {
                        if let Some(c) = st.cell_of(k, &sc) {
                            out.insert(tok.clone(), st.events[k].cells[c].clone());
                        }
                    }
                }
            }
        }
        for e in &self.doc.events {
            if self.index.get(&e.id) == Some(&k) {
                for (tok, &c) in &e.outcomes {
                    if let Some(cell) = st.events[k].cells.get(c) {
                        out.insert(tok.clone(), cell.clone());
                    }
                }
            }
        }
        out
    }

    /// The cell of a binary event whose bit requirements the label meets (the label need not be
    /// a member of the family).
    fn cell_by_label(&self, k: usize, l: &Label) -> Option<HistSet> {
        self.structure.events[k]
            .cells
            .iter()
            .find(|c| matches!(c, HistSet::Binary(b) if b.is_satisfied_by(l)))
            .cloned()
    }

    fn cell_for_token(&self, k: usize, tok: &str) -> Result<HistSet> {
        let st = &self.structure;
        let ev = &st.events[k];
        let tok = &tok.replace('\u{2212}', "-");
        if let Some(c) = self.outcome_map(k).remove(tok) {
            return Ok(c);
        }
        let found = match &self.family {
            Family::Binary(_) => parse_rule(tok).ok().and_then(|l| self.cell_by_label(k, &l)),
            Family::Explicit(_) => match tok.parse::<usize>() {
                Ok(c) => ev.cells.get(c).cloned(),
                Err(_) => self.family.scenario(tok).ok().and_then(|s| st.cell_of(k, &s)).map(|c| ev.cells[c].clone()),
            },
        };
        found.ok_or_else(|| Error::lookup("outcome", format!("{tok} at {}", ev.id)))
    }

    /// The product function named by `f`: one token per transition point (comma separated), or a
    /// single binary rule applied at every point.
    pub fn transition_set(&self, f: &str) -> Result<TransitionSet> {
        let pts = self.transition_points();
        let st = &self.structure;
        let tokens: Vec<&str> = f.split(',').map(str::trim).collect();
        let mut ts = Vec::new();
        if tokens.len() == pts.len() && !(pts.len() == 1 && matches!(self.family, Family::Binary(_)) && f.contains('[')) {
            for (&k, tok) in pts.iter().zip(&tokens) {
                ts.push(Transition { event: k, outcome: self.cell_for_token(k, tok)? });
            }
        } else if let (Family::Binary(_), Ok(rule)) = (&self.family, parse_rule(f)) {
            for &k in &pts {
                let outcome = self
                    .cell_by_label(k, &rule)
                    .ok_or_else(|| Error::Domain(format!("rule {f} selects no outcome at {}", st.events[k].id)))?;
                ts.push(Transition { event: k, outcome });
            }
        } else {
            return Err(Error::Parse(format!(
                "--f '{f}' gives {} outcomes for {} transition points",
                tokens.len(),
                pts.len()
            )));
        }
        Ok(TransitionSet { structure: st.clone(), transitions: ts })
    }

    /// The ω-indexed point family of the document.
    pub fn symbolic_points(&self) -> Result<SymbolicPoints> {
        let spec = self
            .doc
            .symbolic
            .as_ref()
            .ok_or_else(|| Error::Unsupported(format!("{} declares no symbolic point family", self.doc.name)))?;
        if spec.skeleton {
            let kind = match self.family {
                Family::Binary(k) => k,
                Family::Explicit(_) => return Err(Error::Unsupported("skeleton points need a binary family".into())),
            };
            let mut sp = SymbolicPoints::skeleton(&self.doc.name, kind);
            sp.indices = sp.indices.intersect(&spec.indices);
            Ok(sp)
        } else {
            SymbolicPoints::from_model(self.model()?, &spec.indices)
        }
    }

    pub fn indices(&self) -> Result<IndexSet> {
        Ok(self.symbolic_points()?.indices)
    }

    pub fn chain(&self, name: &str) -> Result<&ChainDescriptor> {
        self.doc
            .chains
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.descriptor)
            .ok_or_else(|| Error::lookup("chain", name))
    }

    pub fn xset(&self, name: &str) -> Result<XSet> {
        let spec = self.doc.xsets.iter().find(|x| x.name == name).ok_or_else(|| Error::lookup("point set", name))?;
        if let Some(idx) = &spec.indices {
            let kind = match self.family {
                Family::Binary(k) => k,
                Family::Explicit(_) => return Err(Error::Unsupported("symbolic point sets need a binary family".into())),
            };
            let rule = parse_rule(spec.rule.as_deref().unwrap_or("zeros"))?;
            let scale = spec.scale.as_deref().map(parse_q).transpose()?;
            let mut points = SymbolicPoints::skeleton(&format!("{}:{name}", self.doc.name), kind);
            points.indices = points.indices.intersect(idx);
            points.notes = vec![format!("x_n lies in exactly the histories with g(n) = rule(n), n in {idx}")];
            return Ok(XSet::Symbolic { points, rule, scale });
        }
        let mut sets = Vec::new();
        for id in &spec.points {
            let k = *self.index.get(id).ok_or_else(|| Error::lookup("point", id.clone()))?;
            sets.push(self.structure.events[k].histories.clone());
        }
        Ok(XSet::Finite { ids: spec.points.clone(), sets })
    }
}

/// History set of explicit names, for building structures in code.
pub fn names_set(family: &Family, names: &[&str]) -> Result<HistSet> {
    family.set_of(names.iter().copied())
}

/// Full bit set over `n` scenarios.
pub fn all_of(n: usize) -> HistSet {
    HistSet::Explicit(BitSet::full(n))
}
