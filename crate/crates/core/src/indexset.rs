//! Sets of natural numbers as finite unions of intervals, and an exact solver
//! for conjunctions of quadratic sign conditions over integer indices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Q;

/// Sorted, disjoint, non-adjacent half-open runs `[start, end)`; `end = None` means unbounded.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IndexSet {
    runs: Vec<(u64, Option<u64>)>,
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .runs
            .iter()
            .map(|&(a, b)| match b {
                None => format!("{a}.."),
                Some(b) if b == a + 1 => format!("{a}"),
                Some(b) => format!("{a}..{}", b - 1),
            })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        IndexSet::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl IndexSet {
    /// Parses the display form, e.g. `{0..2, 5, 8..}`; braces are optional and ranges inclusive.
    pub fn parse(s: &str) -> Result<IndexSet> {
        let t = s.trim();
        let body = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')).unwrap_or(t);
        let bad = || Error::Parse(format!("malformed index set '{s}'"));
        let num = |v: &str| v.trim().parse::<u64>().map_err(|_| bad());
        let mut runs = Vec::new();
        for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once("..") {
                Some((a, "")) => runs.push((num(a)?, None)),
                Some((a, b)) => {
                    let (a, b) = (num(a)?, num(b)?);
                    if b < a {
                        return Err(bad());
                    }
                    runs.push((a, Some(b + 1)));
                }
                None => {
                    let a = num(part)?;
                    runs.push((a, Some(a + 1)));
                }
            }
        }
        Ok(IndexSet::normalize(runs))
    }

    pub fn empty() -> Self {
        IndexSet { runs: Vec::new() }
    }

    pub fn all() -> Self {
        IndexSet { runs: vec![(0, None)] }
    }

    /// `[a, b)`, or `[a, inf)` for `b = None`.
    pub fn range(a: u64, b: Option<u64>) -> Self {
        match b {
            Some(b) if b <= a => IndexSet::empty(),
            _ => IndexSet { runs: vec![(a, b)] },
        }
    }

    pub fn single(n: u64) -> Self {
        IndexSet::range(n, Some(n + 1))
    }

    pub fn from_iter<I: IntoIterator<Item = u64>>(it: I) -> Self {
        let mut v: Vec<u64> = it.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let mut s = IndexSet::empty();
        for n in v {
            s.push_run(n, Some(n + 1));
        }
        s
    }

    fn push_run(&mut self, a: u64, b: Option<u64>) {
        if let Some(last) = self.runs.last_mut() {
            if let Some(e) = last.1 {
                if e >= a {
                    last.1 = b.map(|b| e.max(b));
                    return;
                }
            } else {
                return;
            }
        }
        self.runs.push((a, b));
    }

    fn normalize(mut runs: Vec<(u64, Option<u64>)>) -> Self {
        runs.retain(|&(a, b)| b.is_none_or(|b| b > a));
        runs.sort_by_key(|r| r.0);
        let mut s = IndexSet::empty();
        for (a, b) in runs {
            s.push_run(a, b);
        }
        s
    }

    pub fn runs(&self) -> &[(u64, Option<u64>)] {
        &self.runs
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.runs.last().is_none_or(|r| r.1.is_some())
    }

    /// Number of members, `None` when infinite.
    pub fn len(&self) -> Option<u64> {
        self.runs.iter().try_fold(0u64, |acc, &(a, b)| b.map(|b| acc + (b - a)))
    }

    pub fn min(&self) -> Option<u64> {
        self.runs.first().map(|r| r.0)
    }

    /// Largest member of a finite set.
    pub fn max(&self) -> Option<u64> {
        match self.runs.last() {
            Some(&(_, Some(b))) => Some(b - 1),
            _ => None,
        }
    }

    /// Start of the unbounded run, if any.
    pub fn tail_start(&self) -> Option<u64> {
        match self.runs.last() {
            Some(&(a, None)) => Some(a),
            _ => None,
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        self.runs.iter().any(|&(a, b)| n >= a && b.is_none_or(|b| n < b))
    }

    pub fn union(&self, o: &IndexSet) -> IndexSet {
        let mut v = self.runs.clone();
        v.extend_from_slice(&o.runs);
        IndexSet::normalize(v)
    }

    pub fn intersect(&self, o: &IndexSet) -> IndexSet {
        let mut out = Vec::new();
        for &(a, b) in &self.runs {
            for &(c, d) in &o.runs {
                let lo = a.max(c);
                let hi = match (b, d) {
                    (None, None) => None,
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (Some(x), Some(y)) => Some(x.min(y)),
                };
                out.push((lo, hi));
            }
        }
        IndexSet::normalize(out)
    }

    pub fn complement(&self) -> IndexSet {
        let mut out = Vec::new();
        let mut cur = 0u64;
        for &(a, b) in &self.runs {
            if a > cur {
                out.push((cur, Some(a)));
            }
            match b {
                Some(b) => cur = b,
                None => return IndexSet::normalize(out),
            }
        }
        out.push((cur, None));
        IndexSet::normalize(out)
    }

    pub fn difference(&self, o: &IndexSet) -> IndexSet {
        self.intersect(&o.complement())
    }

    pub fn is_subset(&self, o: &IndexSet) -> bool {
        self.difference(o).is_empty()
    }

    /// Members below `limit`, in increasing order.
    pub fn iter_below(&self, limit: u64) -> impl Iterator<Item = u64> + '_ {
        self.runs.iter().flat_map(move |&(a, b)| {
            let e = b.unwrap_or(limit).min(limit);
            a..e.max(a)
        })
    }

    /// The first `n` members.
    pub fn first_n(&self, n: usize) -> Vec<u64> {
        let mut out = Vec::new();
        for &(a, b) in &self.runs {
            let mut k = a;
            while b.is_none_or(|b| k < b) && out.len() < n {
                out.push(k);
                k += 1;
            }
            if out.len() >= n {
                break;
            }
        }
        out
    }

    /// Shifts every member by `off` (used to map sequence parameters to site indices).
    pub fn shift_up(&self, off: u64) -> IndexSet {
        IndexSet { runs: self.runs.iter().map(|&(a, b)| (a + off, b.map(|b| b + off))).collect() }
    }
}

/// `c0 + c1 k + c2 k^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub c: [Q; 3],
}

impl Poly {
    pub fn new(c0: Q, c1: Q, c2: Q) -> Self {
        Poly { c: [c0, c1, c2] }
    }

    pub fn linear(c0: Q, c1: Q) -> Self {
        Poly::new(c0, c1, Q::zero())
    }

    pub fn eval(&self, k: u64) -> Q {
        let k = Q::from_integer(BigInt::from(k));
        &self.c[0] + &self.c[1] * &k + &self.c[2] * &k * &k
    }

    pub fn add(&self, o: &Poly) -> Poly {
        Poly::new(&self.c[0] + &o.c[0], &self.c[1] + &o.c[1], &self.c[2] + &o.c[2])
    }

    pub fn neg(&self) -> Poly {
        Poly::new(-&self.c[0], -&self.c[1], -&self.c[2])
    }

    pub fn scale(&self, s: &Q) -> Poly {
        Poly::new(&self.c[0] * s, &self.c[1] * s, &self.c[2] * s)
    }

    /// Product of two linear polynomials.
    pub fn mul_linear(&self, o: &Poly) -> Result<Poly> {
        if !self.c[2].is_zero() || !o.c[2].is_zero() {
            return Err(Error::Unsupported("polynomial degree above 2".into()));
        }
        Ok(Poly::new(
            &self.c[0] * &o.c[0],
            &self.c[0] * &o.c[1] + &self.c[1] * &o.c[0],
            &self.c[1] * &o.c[1],
        ))
    }

    /// Sign of the polynomial for all sufficiently large k.
    fn eventual_sign(&self) -> i8 {
        for c in self.c.iter().rev() {
            if c.is_positive() {
                return 1;
            }
            if c.is_negative() {
                return -1;
            }
        }
        0
    }
}

/// Sign condition on a polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Ge0,
    Gt0,
    Le0,
    Lt0,
}

impl Rel {
    fn holds(self, v: &Q) -> bool {
        match self {
            Rel::Ge0 => !v.is_negative(),
            Rel::Gt0 => v.is_positive(),
            Rel::Le0 => !v.is_positive(),
            Rel::Lt0 => v.is_negative(),
        }
    }

    fn holds_sign(self, s: i8) -> bool {
        match self {
            Rel::Ge0 => s >= 0,
            Rel::Gt0 => s > 0,
            Rel::Le0 => s <= 0,
            Rel::Lt0 => s < 0,
        }
    }
}

const GALLOP_CAP: u32 = 62;

fn floor_q(v: &Q) -> BigInt {
    v.numer().div_floor(v.denom())
}

/// Truth set of `rel(p(k))` on a piece `[a, b)` where p is monotone.
fn piece_truth(p: &Poly, rel: Rel, a: u64, b: Option<u64>) -> Result<IndexSet> {
    let at = |k: u64| rel.holds(&p.eval(k));
    let first = at(a);
    let (last_k, last) = match b {
        Some(b) => (b - 1, at(b - 1)),
        None => {
            let ev = rel.holds_sign(p.eventual_sign());
            if ev == first {
                return Ok(if first { IndexSet::range(a, b) } else { IndexSet::empty() });
            }
            // gallop to a point where the eventual value holds
            let mut step: u64 = 1;
            let mut j = 0;
            loop {
                let k = a.checked_add(step).ok_or_else(|| Error::Unsupported("index overflow".into()))?;
                if at(k) == ev {
                    break (k, ev);
                }
                j += 1;
                if j > GALLOP_CAP {
                    return Err(Error::Unsupported("index boundary beyond 2^62".into()));
                }
                step *= 2;
            }
        }
    };
    if first == last {
        return Ok(if first {
            match b {
                Some(_) => IndexSet::range(a, Some(last_k + 1)),
                None => IndexSet::range(a, None),
            }
        } else if b.is_none() {
            // truth flips back to `first` eventually is impossible for monotone pieces
            IndexSet::empty()
        } else {
            IndexSet::empty()
        });
    }
    // binary search the flip point in (a, last_k]
    let (mut lo, mut hi) = (a, last_k); // at(lo) == first, at(hi) == last
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if at(mid) == first {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if first {
        IndexSet::range(a, Some(hi))
    } else {
        IndexSet::range(hi, b)
    })
}

/// Integers k in `[lo, hi)` satisfying every condition `rel(p(k))`.
pub fn solve(conds: &[(Poly, Rel)], lo: u64, hi: Option<u64>) -> Result<IndexSet> {
    if hi.is_some_and(|h| h <= lo) {
        return Ok(IndexSet::empty());
    }
    // split points where quadratics change monotonicity
    let mut cuts: Vec<u64> = Vec::new();
    for (p, _) in conds {
        if !p.c[2].is_zero() {
            let v = -&p.c[1] / (&p.c[2] * Q::from_integer(BigInt::from(2)));
            let f: BigInt = floor_q(&v) + 1;
            if f.is_positive() {
                if let Some(c) = f.to_u64() {
                    if c > lo && hi.is_none_or(|h| c < h) {
                        cuts.push(c);
                    }
                }
            }
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    let mut bounds = vec![lo];
    bounds.extend(cuts);
    let mut out = IndexSet::empty();
    for (i, &a) in bounds.iter().enumerate() {
        let b = if i + 1 < bounds.len() { Some(bounds[i + 1]) } else { hi };
        let mut acc = IndexSet::range(a, b);
        for (p, rel) in conds {
            if acc.is_empty() {
                break;
            }
            acc = acc.intersect(&piece_truth(p, *rel, a, b)?);
        }
        out = out.union(&acc);
    }
    Ok(out)
}
