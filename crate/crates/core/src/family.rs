//! History families: finite lists of scenario names, or symbolic families of
//! binary sequences g: N -> {0,1} decided by bespoke satisfiability oracles.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indexset::IndexSet;

/// The symbolic binary families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryKind {
    /// Sequences that are 1 from index n on (the 2^n strings of length n).
    AllStrings(u64),
    /// Sequences with finitely many zeros.
    FinitelyManyZeros,
    /// Sequences with at most k zeros.
    AtMostKZeros(u64),
    /// Every eventually constant sequence is a witness; the family is all of {0,1}^N.
    AllSequences,
}

impl BinaryKind {
    pub fn id(&self) -> String {
        match self {
            BinaryKind::AllStrings(n) => format!("all-strings({n})"),
            BinaryKind::FinitelyManyZeros => "finitely-many-zeros".into(),
            BinaryKind::AtMostKZeros(k) => format!("at-most-k-zeros({k})"),
            BinaryKind::AllSequences => "all-sequences".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let arg = |prefix: &str| -> Option<Result<u64>> {
            s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')).map(|n| {
                n.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad family parameter in '{s}'")))
            })
        };
        if let Some(n) = arg("all-strings(") {
            return Ok(BinaryKind::AllStrings(n?));
        }
        if let Some(k) = arg("at-most-k-zeros(") {
            return Ok(BinaryKind::AtMostKZeros(k?));
        }
        match s {
            "finitely-many-zeros" => Ok(BinaryKind::FinitelyManyZeros),
            "all-sequences" => Ok(BinaryKind::AllSequences),
            _ => Err(Error::Parse(format!(
                "unknown family '{s}' (expected all-strings(n), finitely-many-zeros, at-most-k-zeros(k), all-sequences)"
            ))),
        }
    }

    /// True when every finite set of bit requirements without internal conflict is satisfiable.
    pub fn finite_sets_always_sat(&self) -> bool {
        matches!(self, BinaryKind::FinitelyManyZeros | BinaryKind::AllSequences)
    }

    /// Number of indices that carry choices, `None` for infinitely many.
    pub fn width(&self) -> Option<u64> {
        match self {
            BinaryKind::AllStrings(n) => Some(*n),
            _ => None,
        }
    }
}

/// An eventually constant binary sequence: `default` everywhere except the listed exceptions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub default: u8,
    pub exceptions: BTreeSet<u64>,
}

impl Label {
    pub fn constant(b: u8) -> Self {
        Label { default: b, exceptions: BTreeSet::new() }
    }

    /// Label with zeros exactly at the given indices (ones elsewhere).
    pub fn zeros_at<I: IntoIterator<Item = u64>>(it: I) -> Self {
        Label { default: 1, exceptions: it.into_iter().collect() }
    }

    pub fn bit(&self, n: u64) -> u8 {
        if self.exceptions.contains(&n) {
            1 - self.default
        } else {
            self.default
        }
    }

    /// Indices where the bit equals `b`, as an index set.
    pub fn indices_with(&self, b: u8) -> IndexSet {
        let ex = IndexSet::from_iter(self.exceptions.iter().copied());
        if b == self.default {
            ex.complement()
        } else {
            ex
        }
    }

    /// Indices where the two labels differ.
    pub fn diff(&self, o: &Label) -> IndexSet {
        let sym: BTreeSet<u64> = self.exceptions.symmetric_difference(&o.exceptions).copied().collect();
        let s = IndexSet::from_iter(sym);
        if self.default == o.default {
            s
        } else {
            s.complement()
        }
    }

    pub fn parse(s: &str) -> Result<Label> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed label '{s}' (expected zeros[..], ones[..], all-zeros or all-ones)"));
        match s {
            "all-zeros" => return Ok(Label::constant(0)),
            "all-ones" => return Ok(Label::constant(1)),
            _ => {}
        }
        let (default, body) = if let Some(r) = s.strip_prefix("zeros[") {
            (1, r)
        } else if let Some(r) = s.strip_prefix("ones[") {
            (0, r)
        } else {
            return Err(bad());
        };
        let body = body.strip_suffix(']').ok_or_else(bad)?;
        let mut exceptions = BTreeSet::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let a: u64 = a.trim().parse().map_err(|_| bad())?;
                let b: u64 = b.trim().parse().map_err(|_| bad())?;
                exceptions.extend(a..=b);
            } else {
                exceptions.insert(part.parse().map_err(|_| bad())?);
            }
        }
        Ok(Label { default, exceptions })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.default == 1 { "zeros" } else { "ones" };
        if self.exceptions.is_empty() {
            return write!(f, "all-{}", if self.default == 1 { "ones" } else { "zeros" });
        }
        let set = IndexSet::from_iter(self.exceptions.iter().copied()).to_string();
        write!(f, "{kind}[{}]", set.trim_start_matches('{').trim_end_matches('}').replace(", ", ","))
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Label::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl BinaryKind {
    pub fn contains(&self, g: &Label) -> bool {
        match self {
            BinaryKind::AllSequences => true,
            BinaryKind::FinitelyManyZeros => g.default == 1,
            BinaryKind::AtMostKZeros(k) => g.default == 1 && g.exceptions.len() as u64 <= *k,
            BinaryKind::AllStrings(n) => g.default == 1 && g.exceptions.iter().all(|i| i < n),
        }
    }
}

/// A conjunction of per-index bit requirements, stored as the index sets forced to 0 and to 1.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Constraints {
    pub zeros: IndexSet,
    pub ones: IndexSet,
}

impl fmt::Debug for Constraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Constraints {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g=0 on {}, g=1 on {}", self.zeros, self.ones)
    }
}

impl Constraints {
    pub fn none() -> Self {
        Constraints::default()
    }

    pub fn bit(n: u64, b: u8) -> Self {
        Constraints::on(IndexSet::single(n), b)
    }

    /// Requirement `g(n) = b` for every n in `s`.
    pub fn on(s: IndexSet, b: u8) -> Self {
        if b == 0 {
            Constraints { zeros: s, ones: IndexSet::empty() }
        } else {
            Constraints { zeros: IndexSet::empty(), ones: s }
        }
    }

    /// Requirement that g agrees with `label` on `s`.
    pub fn agree(label: &Label, s: &IndexSet) -> Self {
        Constraints {
            zeros: label.indices_with(0).intersect(s),
            ones: label.indices_with(1).intersect(s),
        }
    }

    pub fn meet(&self, o: &Constraints) -> Constraints {
        Constraints { zeros: self.zeros.union(&o.zeros), ones: self.ones.union(&o.ones) }
    }

    /// Indices required to be both 0 and 1.
    pub fn conflicts(&self) -> IndexSet {
        self.zeros.intersect(&self.ones)
    }

    pub fn is_satisfied_by(&self, g: &Label) -> bool {
        self.zeros.is_subset(&g.indices_with(0)) && self.ones.is_subset(&g.indices_with(1))
    }

    /// Indices constrained either way.
    pub fn support(&self) -> IndexSet {
        self.zeros.union(&self.ones)
    }
}

/// Why a constraint set has no member in a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Unsat {
    /// Some index is required to be both 0 and 1.
    Conflict { index: u64 },
    /// Infinitely many zeros required in a family allowing only finitely many.
    InfiniteZeros { from: u64 },
    /// More zeros required than the family allows.
    TooManyZeros { required: u64, allowed: u64 },
    /// A zero required at an index the family fixes to 1.
    OutOfRange { index: u64, width: u64 },
}

impl fmt::Display for Unsat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Unsat::Conflict { index } => write!(f, "index {index} required to be both 0 and 1"),
            Unsat::InfiniteZeros { from } => {
                write!(f, "zeros required at every index from {from} on; the family allows finitely many")
            }
            Unsat::TooManyZeros { required, allowed } => {
                write!(f, "{required} zeros required; the family allows at most {allowed}")
            }
            Unsat::OutOfRange { index, width } => {
                write!(f, "zero required at index {index}; only indices below {width} vary")
            }
        }
    }
}

/// Decides satisfiability of `c` in the family; returns a witness label or the reason it fails.
pub fn oracle(kind: BinaryKind, c: &Constraints) -> std::result::Result<Label, Unsat> {
    if let Some(i) = c.conflicts().min() {
        return Err(Unsat::Conflict { index: i });
    }
    match kind {
        BinaryKind::FinitelyManyZeros | BinaryKind::AtMostKZeros(_) | BinaryKind::AllStrings(_) => {
            if let Some(from) = c.zeros.tail_start() {
                return Err(Unsat::InfiniteZeros { from });
            }
        }
        BinaryKind::AllSequences => {}
    }
    match kind {
        BinaryKind::AtMostKZeros(k) => {
            let req = c.zeros.len().unwrap_or(u64::MAX);
            if req > k {
                return Err(Unsat::TooManyZeros { required: req, allowed: k });
            }
        }
        BinaryKind::AllStrings(n) => {
            if let Some(m) = c.zeros.max() {
                if m >= n {
                    return Err(Unsat::OutOfRange { index: m, width: n });
                }
            }
        }
        _ => {}
    }
    // witness: required bits, ones elsewhere unless an infinite zero run is required
    if c.zeros.tail_start().is_some() {
        Ok(Label { default: 0, exceptions: c.zeros.complement().iter_below(u64::MAX).collect() })
    } else {
        Ok(Label::zeros_at(c.zeros.iter_below(u64::MAX)))
    }
}

/// Whether every member of `a` (in the family) is a member of `b`.
pub fn implies(kind: BinaryKind, a: &Constraints, b: &Constraints) -> bool {
    if oracle(kind, a).is_err() {
        return true;
    }
    // indices a forces to 1 through the family bound
    let forced_ones = match kind {
        BinaryKind::AllStrings(n) => IndexSet::range(n, None),
        BinaryKind::AtMostKZeros(k) if a.zeros.len() == Some(k) => a.zeros.complement(),
        _ => IndexSet::empty(),
    };
    b.zeros.is_subset(&a.zeros) && b.ones.is_subset(&a.ones.union(&forced_ones))
}

/// Fixed-width bit set over explicitly enumerated scenarios.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet { words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> Self {
        let mut b = BitSet::new(n);
        for i in 0..n {
            b.insert(i);
        }
        b
    }

    pub fn from_indices(n: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut b = BitSet::new(n);
        for i in it {
            b.insert(i);
        }
        b
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
    }

    pub fn and(&self, o: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&o.words).map(|(a, b)| a & b).collect() }
    }

    pub fn or(&self, o: &BitSet) -> BitSet {
        BitSet { words: self.words.iter().zip(&o.words).map(|(a, b)| a | b).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn is_subset(&self, o: &BitSet) -> bool {
        self.words.iter().zip(&o.words).all(|(a, b)| a & !b == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A history family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    /// Finitely many named scenarios.
    Explicit(Vec<String>),
    /// Symbolic binary family.
    Binary(BinaryKind),
}

/// A single history (scenario) of a family.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scenario {
    Named(String),
    Seq(Label),
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Named(s) => write!(f, "{s}"),
            Scenario::Seq(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A set of histories of a family.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum HistSet {
    Explicit(BitSet),
    Binary(Constraints),
}

impl Family {
    pub fn id(&self) -> String {
        match self {
            Family::Explicit(v) => format!("explicit({})", v.len()),
            Family::Binary(k) => k.id(),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Family::Explicit(_) => true,
            Family::Binary(BinaryKind::AllStrings(_)) => true,
            Family::Binary(_) => false,
        }
    }

    pub fn universe(&self) -> HistSet {
        match self {
            Family::Explicit(v) => HistSet::Explicit(BitSet::full(v.len())),
            Family::Binary(_) => HistSet::Binary(Constraints::none()),
        }
    }

    pub fn empty_set(&self) -> HistSet {
        match self {
            Family::Explicit(v) => HistSet::Explicit(BitSet::new(v.len())),
            Family::Binary(_) => HistSet::Binary(Constraints::on(IndexSet::single(0), 0).meet(&Constraints::bit(0, 1))),
        }
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        match self {
            Family::Explicit(v) => {
                v.iter().position(|s| s == name).ok_or_else(|| Error::lookup("scenario", name))
            }
            Family::Binary(_) => Err(Error::Domain("symbolic family has no scenario indices".into())),
        }
    }

    /// Resolves a scenario from its textual form.
    pub fn scenario(&self, s: &str) -> Result<Scenario> {
        match self {
            Family::Explicit(_) => {
                self.index_of(s)?;
                Ok(Scenario::Named(s.to_string()))
            }
            Family::Binary(k) => {
                let l = Label::parse(s)?;
                if !k.contains(&l) {
                    return Err(Error::lookup("scenario", format!("{s} (not in {})", k.id())));
                }
                Ok(Scenario::Seq(l))
            }
        }
    }

    pub fn contains(&self, s: &Scenario) -> bool {
        match (self, s) {
            (Family::Explicit(v), Scenario::Named(n)) => v.contains(n),
            (Family::Binary(k), Scenario::Seq(l)) => k.contains(l),
            _ => false,
        }
    }

    pub fn meet(&self, a: &HistSet, b: &HistSet) -> HistSet {
        match (a, b) {
            (HistSet::Explicit(x), HistSet::Explicit(y)) => HistSet::Explicit(x.and(y)),
            (HistSet::Binary(x), HistSet::Binary(y)) => HistSet::Binary(x.meet(y)),
            _ => panic!("mixed history-set kinds"),
        }
    }

    pub fn is_empty(&self, a: &HistSet) -> bool {
        self.witness(a).is_none()
    }

    /// Some member of the set, chosen deterministically.
    pub fn witness(&self, a: &HistSet) -> Option<Scenario> {
        match (self, a) {
            (Family::Explicit(v), HistSet::Explicit(b)) => b.first().map(|i| Scenario::Named(v[i].clone())),
            (Family::Binary(k), HistSet::Binary(c)) => oracle(*k, c).ok().map(Scenario::Seq),
            _ => None,
        }
    }

    /// Reason for emptiness of a binary set.
    pub fn unsat_reason(&self, a: &HistSet) -> Option<String> {
        match (self, a) {
            (Family::Binary(k), HistSet::Binary(c)) => oracle(*k, c).err().map(|u| u.to_string()),
            (Family::Explicit(_), HistSet::Explicit(b)) if b.is_empty() => Some("no listed scenario remains".into()),
            _ => None,
        }
    }

    pub fn member(&self, a: &HistSet, s: &Scenario) -> bool {
        match (a, s) {
            (HistSet::Explicit(b), Scenario::Named(n)) => self.index_of(n).is_ok_and(|i| b.contains(i)),
            (HistSet::Binary(c), Scenario::Seq(l)) => self.contains(s) && c.is_satisfied_by(l),
            _ => false,
        }
    }

    /// Whether `a` is a subset of `b` within the family.
    pub fn subset(&self, a: &HistSet, b: &HistSet) -> bool {
        match (self, a, b) {
            (Family::Explicit(_), HistSet::Explicit(x), HistSet::Explicit(y)) => x.is_subset(y),
            (Family::Binary(k), HistSet::Binary(x), HistSet::Binary(y)) => implies(*k, x, y),
            _ => false,
        }
    }

    /// Whether two sets have the same members in the family.
    pub fn same(&self, a: &HistSet, b: &HistSet) -> bool {
        self.subset(a, b) && self.subset(b, a)
    }

    pub fn render(&self, a: &HistSet) -> String {
        match (self, a) {
            (Family::Explicit(v), HistSet::Explicit(b)) => {
                let names: Vec<&str> = b.iter().map(|i| v[i].as_str()).collect();
                format!("{{{}}}", names.join(", "))
            }
            (_, HistSet::Binary(c)) => c.to_string(),
            _ => "?".into(),
        }
    }

    /// Explicit set from scenario names.
    pub fn set_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<HistSet> {
        match self {
            Family::Explicit(v) => {
                let mut b = BitSet::new(v.len());
                for n in names {
                    b.insert(self.index_of(n)?);
                }
                Ok(HistSet::Explicit(b))
            }
            Family::Binary(_) => Err(Error::Domain("named scenarios in a symbolic family".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn oracle_by_family() {
        let tail0 = Constraints::on(IndexSet::range(3, None), 0);
        assert!(oracle(BinaryKind::FinitelyManyZeros, &tail0).is_err());
        assert!(oracle(BinaryKind::AllSequences, &tail0).is_ok());
        let three = Constraints::on(IndexSet::from_iter([1, 4, 9]), 0);
        assert!(oracle(BinaryKind::AtMostKZeros(2), &three).is_err());
        assert!(oracle(BinaryKind::AtMostKZeros(3), &three).is_ok());
        assert!(oracle(BinaryKind::AllStrings(9), &three).is_err());
        assert!(oracle(BinaryKind::AllStrings(10), &three).is_ok());
        let clash = Constraints::bit(2, 0).meet(&Constraints::bit(2, 1));
        assert_eq!(oracle(BinaryKind::AllSequences, &clash), Err(Unsat::Conflict { index: 2 }));
        assert!(oracle(BinaryKind::FinitelyManyZeros, &Constraints::none()).is_ok());
    }

    #[test]
    fn label_text() {
        let l = Label::parse("zeros[0..2,5]").unwrap();
        assert_eq!(l.to_string(), "zeros[0..2,5]");
        assert_eq!(l.bit(1), 0);
        assert_eq!(l.bit(3), 1);
        let o = Label::parse("ones[]").unwrap();
        assert_eq!(o, Label::constant(0));
        assert_eq!(o.to_string(), "all-zeros");
        assert_eq!(Label::parse("all-ones").unwrap(), Label::constant(1));
        assert_eq!(l.diff(&Label::constant(1)).to_string(), "{0..2, 5}");
        assert_eq!(o.diff(&Label::constant(1)).to_string(), "{0..}");
    }

    #[test]
    fn witness_satisfies_tail_requirements() {
        let c = Constraints::on(IndexSet::range(4, None), 0).meet(&Constraints::bit(1, 1));
        let g = oracle(BinaryKind::AllSequences, &c).unwrap();
        assert!(c.is_satisfied_by(&g));
        assert_eq!(g.bit(1), 1);
        assert_eq!(g.bit(100), 0);
    }

    #[test]
    fn implication_uses_family_bound() {
        let k = BinaryKind::AtMostKZeros(1);
        assert!(implies(k, &Constraints::bit(0, 0), &Constraints::bit(5, 1)));
        assert!(!implies(BinaryKind::FinitelyManyZeros, &Constraints::bit(0, 0), &Constraints::bit(5, 1)));
    }

    fn cons() -> impl Strategy<Value = Constraints> {
        proptest::collection::vec((0u64..6, 0u8..2), 0..5).prop_map(|v| {
            v.into_iter().fold(Constraints::none(), |c, (i, b)| c.meet(&Constraints::bit(i, b)))
        })
    }

    fn kinds() -> impl Strategy<Value = BinaryKind> {
        prop_oneof![
            (1u64..7).prop_map(BinaryKind::AllStrings),
            Just(BinaryKind::FinitelyManyZeros),
            (0u64..4).prop_map(BinaryKind::AtMostKZeros),
            Just(BinaryKind::AllSequences),
        ]
    }

    /// Brute force over all labels that are 1 from index 6 on.
    fn brute(kind: BinaryKind, c: &Constraints) -> bool {
        (0u32..64).any(|m| {
            let g = Label::zeros_at((0..6).filter(|i| m >> i & 1 == 0));
            kind.contains(&g) && c.is_satisfied_by(&g)
        })
    }

    proptest! {
        #[test]
        fn oracle_matches_brute(kind in kinds(), c in cons()) {
            let r = oracle(kind, &c);
            prop_assert_eq!(r.is_ok(), brute(kind, &c));
            if let Ok(g) = r {
                prop_assert!(kind.contains(&g) && c.is_satisfied_by(&g));
            }
        }

        #[test]
        fn oracle_monotone(kind in kinds(), a in cons(), b in cons()) {
            if oracle(kind, &a).is_err() {
                prop_assert!(oracle(kind, &a.meet(&b)).is_err());
            }
        }

        #[test]
        fn implies_matches_brute(kind in kinds(), a in cons(), b in cons()) {
            let want = (0u32..64).all(|m| {
                let g = Label::zeros_at((0..6).filter(|i| m >> i & 1 == 0));
                !(kind.contains(&g) && a.is_satisfied_by(&g)) || b.is_satisfied_by(&g)
            });
            prop_assert_eq!(implies(kind, &a, &b), want);
        }
    }
}
