//! Finite transition structures: events with their histories and elementary
//! possibilities, the strict order among them, and transition sets (S, f).

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::family::{Family, HistSet, Scenario};
use crate::geometry::Point4;
use crate::histories::elementary_possibilities;
use crate::model::{EventClass, MbsModel};

/// A point event: the histories through it and their partition into elementary possibilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Event {
    pub id: String,
    pub location: Option<Point4>,
    pub histories: HistSet,
    pub cells: Vec<HistSet>,
}

#[derive(Clone, Debug)]
pub struct Structure {
    pub family: Family,
    pub events: Vec<Event>,
    lt: Vec<Vec<bool>>,
}

impl Structure {
    /// Builds a structure from events and a strict order given as pairs (i, j) meaning e_i < e_j;
    /// the order is closed transitively.
    pub fn new(family: Family, events: Vec<Event>, less: &[(usize, usize)]) -> Result<Structure> {
        let n = events.len();
        let mut lt = vec![vec![false; n]; n];
        for &(i, j) in less {
            if i >= n || j >= n {
                return Err(Error::Domain(format!("order pair ({i}, {j}) out of range")));
            }
            lt[i][j] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if lt[i][k] {
                    for j in 0..n {
                        if lt[k][j] {
                            lt[i][j] = true;
                        }
                    }
                }
            }
        }
        if (0..n).any(|i| lt[i][i]) {
            return Err(Error::Domain("order has a cycle".into()));
        }
        let s = Structure { family, events, lt };
        s.check_cells()?;
        Ok(s)
    }

    fn check_cells(&self) -> Result<()> {
        for e in &self.events {
            if e.cells.is_empty() {
                return Err(Error::Domain(format!("event {} has no elementary possibilities", e.id)));
            }
            for (i, c) in e.cells.iter().enumerate() {
                if self.family.is_empty(c) {
                    return Err(Error::Domain(format!("event {} has an empty possibility", e.id)));
                }
                if !self.family.subset(c, &e.histories) {
                    return Err(Error::Domain(format!("a possibility of {} leaves its histories", e.id)));
                }
                for d in &e.cells[i + 1..] {
                    if !self.family.is_empty(&self.family.meet(c, d)) {
                        return Err(Error::Domain(format!("possibilities of {} overlap", e.id)));
                    }
                }
            }
            if let (HistSet::Explicit(h), Family::Explicit(names)) = (&e.histories, &self.family) {
                let mut u = crate::family::BitSet::new(names.len());
                for c in &e.cells {
                    if let HistSet::Explicit(b) = c {
                        u = u.or(b);
                    }
                }
                if &u != h {
                    return Err(Error::Domain(format!("possibilities of {} do not cover its histories", e.id)));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.lt[i][j]
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        i == j || self.lt[i][j] || self.lt[j][i]
    }

    /// Incomparable and sharing a history.
    pub fn slr(&self, i: usize, j: usize) -> bool {
        !self.comparable(i, j)
            && !self.family.is_empty(&self.family.meet(&self.events[i].histories, &self.events[j].histories))
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.events.iter().position(|e| e.id == id).ok_or_else(|| Error::lookup("point", id))
    }

    /// The possibility of event `i` containing history `h`.
    pub fn cell_of(&self, i: usize, h: &Scenario) -> Option<usize> {
        self.events[i].cells.iter().position(|c| self.family.member(c, h))
    }

    /// Events of an MBS model at the given (id, location, scenario) triples; duplicates of the same
    /// event are merged under the first id.
    pub fn from_model(model: &MbsModel, points: &[(String, Point4, Scenario)]) -> Result<(Structure, Vec<EventClass>)> {
        let mut classes: Vec<EventClass> = Vec::new();
        let mut ids = Vec::new();
        for (id, x, s) in points {
            let c = model.event_class(x, s)?;
            if !classes.iter().any(|k| model.same_event(k, &c)) {
                classes.push(c);
                ids.push(id.clone());
            }
        }
        let mut events = Vec::new();
        for (c, id) in classes.iter().zip(&ids) {
            let cells = elementary_possibilities(c, model)?.into_iter().map(|p| p.members).collect();
            events.push(Event { id: id.clone(), location: Some(c.location.clone()), histories: c.members.clone(), cells });
        }
        let mut less = Vec::new();
        for (i, a) in classes.iter().enumerate() {
            for (j, b) in classes.iter().enumerate() {
                if i != j && model.lt_s(a, b)? {
                    less.push((i, j));
                }
            }
        }
        Ok((Structure::new(model.family.clone(), events, &less)?, classes))
    }
}

/// One elementary transition: an event and a chosen outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub event: usize,
    pub outcome: HistSet,
}

#[derive(Clone, Debug)]
pub struct TransitionSet {
    pub structure: Structure,
    pub transitions: Vec<Transition>,
}

impl TransitionSet {
    /// The product function choosing cell `choice[k]` at event `points[k]`.
    pub fn product(structure: Structure, points: &[usize], choice: &[usize]) -> Result<TransitionSet> {
        if points.len() != choice.len() {
            return Err(Error::Domain("one choice per point required".into()));
        }
        let mut ts = Vec::new();
        for (&p, &c) in points.iter().zip(choice) {
            let e = structure.events.get(p).ok_or_else(|| Error::Domain(format!("point {p} out of range")))?;
            let cell = e.cells.get(c).ok_or_else(|| Error::Domain(format!("{} has no possibility {c}", e.id)))?;
            ts.push(Transition { event: p, outcome: cell.clone() });
        }
        Ok(TransitionSet { structure, transitions: ts })
    }

    /// Whether the transitions form a product function (one per event, outcomes among the cells).
    pub fn is_product_function(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.transitions.iter().all(|t| {
            seen.insert(t.event)
                && self.structure.events[t.event].cells.iter().any(|c| self.structure.family.same(c, &t.outcome))
        })
    }

    pub fn family(&self) -> &Family {
        &self.structure.family
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// SLR between the events of two transitions.
    pub fn slr(&self, a: usize, b: usize) -> bool {
        self.structure.slr(self.transitions[a].event, self.transitions[b].event)
    }

    /// Intersection of the outcomes of the listed transitions.
    pub fn meet_of(&self, idx: &[usize]) -> HistSet {
        let f = self.family();
        idx.iter().fold(f.universe(), |acc, &i| f.meet(&acc, &self.transitions[i].outcome))
    }

    pub fn name(&self, i: usize) -> String {
        self.structure.events[self.transitions[i].event].id.clone()
    }

    pub fn names(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.name(i)).collect()
    }

    /// Render of the outcome of transition i.
    pub fn outcome_text(&self, i: usize) -> String {
        self.family().render(&self.transitions[i].outcome)
    }
}
