//! Families of splitting sites: finite rational samples plus optional symbolic
//! sequences, with exact answers to "which members lie below x".

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    euclid_dist_sq, fmt_q, leq_m, lorentz_interval, lt_m, q, qi, slr_m, sqrt_upper, Point4, Surd, Q,
};
use crate::indexset::{solve, IndexSet, Poly, Rel};

/// Largest sequence parameter for which members are ever materialized.
pub const MAX_MATERIALIZED: u64 = 4096;

/// A symbolic sequence of sites indexed by a parameter k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SiteSequence {
    /// `base + k * step` for k >= 0.
    Arithmetic { base: Point4, step: Point4 },
    /// `limit + dir / k` for k >= start (start >= 1).
    Harmonic { limit: Point4, dir: Point4, start: u64 },
    /// `(-k, k c_k, k s_k, 0)` for k >= 1, with (c_k, s_k) the rational circle point of
    /// parameter t_k approximating angle pi (2^k - 1) / 2^k.
    ConeWrap,
}

fn t_cache() -> &'static Mutex<Vec<Q>> {
    static CACHE: OnceLock<Mutex<Vec<Q>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Q::zero(), Q::one()]))
}

/// Circle parameter t_k (k >= 1): t_1 = 1, t_{k+1} = t_k + sqrt_upper(1 + t_k^2) > 2 t_k.
pub fn cone_t(k: u64) -> Result<Q> {
    if k == 0 {
        return Err(Error::Domain("cone sequence starts at k = 1".into()));
    }
    if k > MAX_MATERIALIZED {
        return Err(Error::Unsupported(format!("cone sequence member {k} too large to materialize")));
    }
    let mut c = t_cache().lock().expect("t cache poisoned");
    while (c.len() as u64) <= k {
        let t = c.last().expect("nonempty").clone();
        let next = &t + sqrt_upper(&(Q::one() + &t * &t));
        c.push(next);
    }
    Ok(c[k as usize].clone())
}

/// Unit circle point ((1 - t^2)/(1 + t^2), 2t/(1 + t^2)).
pub fn circle_point(t: &Q) -> (Q, Q) {
    let d = Q::one() + t * t;
    ((Q::one() - t * t) / &d, (t * qi(2)) / d)
}

fn cone_member(k: u64) -> Result<Point4> {
    let (c, s) = circle_point(&cone_t(k)?);
    let kq = qi(k as i64);
    Ok(Point4::new(-&kq, &kq * c, &kq * s, Q::zero()))
}

/// Upper bound on 2k |rho_k| using t_k >= 2^(k-1).
fn cone_tail_bound(k: u64, p1: &Q, p2: &Q) -> Q {
    let two_k1 = Q::from_integer(BigInt::one() << (k - 1) as usize);
    let b = p1.abs() * qi(2) / (&two_k1 * &two_k1) + p2.abs() * qi(2) / &two_k1;
    b * qi(2 * k as i64)
}

fn ceil_q(v: &Q) -> BigInt {
    -((-v).numer().div_floor(v.denom()))
}

fn to_param(v: &BigInt) -> u64 {
    if v.is_negative() {
        0
    } else {
        v.to_u64().unwrap_or(u64::MAX)
    }
}

impl SiteSequence {
    pub fn first_param(&self) -> u64 {
        match self {
            SiteSequence::Arithmetic { .. } => 0,
            SiteSequence::Harmonic { start, .. } => *start,
            SiteSequence::ConeWrap => 1,
        }
    }

    pub fn member(&self, k: u64) -> Result<Point4> {
        if k < self.first_param() {
            return Err(Error::Domain(format!("sequence parameter {k} below start")));
        }
        match self {
            SiteSequence::Arithmetic { base, step } => Ok(base.add(&step.scale(&qi(k as i64)))),
            SiteSequence::Harmonic { limit, dir, .. } => Ok(limit.add(&dir.scale(&q(1, k as i64)))),
            SiteSequence::ConeWrap => cone_member(k),
        }
    }

    pub fn limit(&self) -> Option<&Point4> {
        match self {
            SiteSequence::Harmonic { limit, .. } => Some(limit),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SiteSequence::Arithmetic { base, step } => format!("{base} + k*{step}, k >= 0"),
            SiteSequence::Harmonic { limit, dir, start } => format!("{limit} + {dir}/k, k >= {start}"),
            SiteSequence::ConeWrap => "(-k, k c_k, k s_k, 0), k >= 1, on the past light cone of the origin".into(),
        }
    }

    /// Linear vector form W(k) = A + k B whose sign pattern matches `x - member(k)`.
    fn linear_form(&self, x: &Point4) -> Option<(Point4, Point4)> {
        match self {
            SiteSequence::Arithmetic { base, step } => Some((x.sub(base), step.scale(&qi(-1)))),
            SiteSequence::Harmonic { limit, dir, .. } => Some((dir.scale(&qi(-1)), x.sub(limit))),
            SiteSequence::ConeWrap => None,
        }
    }

    fn comp(p: &Point4, i: usize) -> Q {
        p.coords()[i].clone()
    }

    /// Parameters where W(k) = 0, i.e. member(k) = x.
    fn zero_params(a: &Point4, b: &Point4, from: u64) -> IndexSet {
        let mut k: Option<Q> = None;
        for i in 0..4 {
            let (ai, bi) = (Self::comp(a, i), Self::comp(b, i));
            if bi.is_zero() {
                if !ai.is_zero() {
                    return IndexSet::empty();
                }
            } else {
                let ki = -ai / bi;
                match &k {
                    Some(prev) if *prev != ki => return IndexSet::empty(),
                    _ => k = Some(ki),
                }
            }
        }
        match k {
            None => IndexSet::range(from, None),
            Some(k) if k.is_integer() && !k.is_negative() => {
                let k = to_param(&k.to_integer());
                if k >= from {
                    IndexSet::single(k)
                } else {
                    IndexSet::empty()
                }
            }
            Some(_) => IndexSet::empty(),
        }
    }

    fn causal_polys(a: &Point4, b: &Point4) -> Result<(Poly, Poly)> {
        let lin = |i: usize| Poly::linear(Self::comp(a, i), Self::comp(b, i));
        let w0 = lin(0);
        let mut quad = w0.mul_linear(&w0)?.neg();
        for i in 1..4 {
            let wi = lin(i);
            quad = quad.add(&wi.mul_linear(&wi)?);
        }
        Ok((w0, quad))
    }

    /// Parameters k with member(k) <=_M x (or <_M when `strict`).
    pub fn below_params(&self, x: &Point4, strict: bool) -> Result<IndexSet> {
        let from = self.first_param();
        if let Some((a, b)) = self.linear_form(x) {
            let (w0, quad) = Self::causal_polys(&a, &b)?;
            let s = solve(&[(w0, Rel::Ge0), (quad, Rel::Le0)], from, None)?;
            return Ok(if strict { s.difference(&Self::zero_params(&a, &b, from)) } else { s });
        }
        cone_below(x, strict)
    }

    /// Parameters k with x <_M member(k).
    pub fn above_params(&self, x: &Point4) -> Result<IndexSet> {
        let from = self.first_param();
        match self.linear_form(x) {
            Some((a, b)) => {
                let (w0, quad) = Self::causal_polys(&a, &b)?;
                let s = solve(&[(w0, Rel::Le0), (quad, Rel::Le0)], from, None)?;
                Ok(s.difference(&Self::zero_params(&a, &b, from)))
            }
            None => {
                // x <_M e_k would put x in the past of the origin's past cone; decide on the
                // materialized prefix and bound the rest: e_k has time -k, so k <= -x.t.
                if x.t.is_negative() {
                    let kmax = to_param(&(-&x.t).floor().to_integer());
                    if kmax > MAX_MATERIALIZED {
                        return Err(Error::Unsupported("query point too far in the past".into()));
                    }
                    let mut v = Vec::new();
                    for k in 1..=kmax {
                        if lt_m(x, &self.member(k)?) {
                            v.push(k);
                        }
                    }
                    Ok(IndexSet::from_iter(v))
                } else {
                    Ok(IndexSet::empty())
                }
            }
        }
    }

    pub fn equal_params(&self, x: &Point4) -> Result<IndexSet> {
        let from = self.first_param();
        match self.linear_form(x) {
            Some((a, b)) => Ok(Self::zero_params(&a, &b, from)),
            None => Ok(match cone_equal(x)? {
                Some(k) => IndexSet::single(k),
                None => IndexSet::empty(),
            }),
        }
    }

    /// Parameters k with euclid_dist_sq(member(k), x) < r2.
    pub fn within_params(&self, x: &Point4, r2: &Q) -> Result<IndexSet> {
        let from = self.first_param();
        match self {
            SiteSequence::Arithmetic { base, step } => {
                let (a, b) = (x.sub(base), step.scale(&qi(-1)));
                let mut p = Poly::linear(-r2.clone(), Q::zero());
                for i in 0..4 {
                    let l = Poly::linear(Self::comp(&a, i), Self::comp(&b, i));
                    p = p.add(&l.mul_linear(&l)?);
                }
                solve(&[(p, Rel::Lt0)], from, None)
            }
            SiteSequence::Harmonic { limit, dir, .. } => {
                let (a, b) = (dir.scale(&qi(-1)), x.sub(limit));
                let mut p = Poly::new(Q::zero(), Q::zero(), -r2.clone());
                for i in 0..4 {
                    let l = Poly::linear(Self::comp(&a, i), Self::comp(&b, i));
                    p = p.add(&l.mul_linear(&l)?);
                }
                solve(&[(p, Rel::Lt0)], from, None)
            }
            SiteSequence::ConeWrap => {
                // |e_k|^2 = 2k^2, so |e_k - x| >= sqrt(2) k - |x| exceeds r once 2k^2 > (|x| + r)^2
                let bound = sqrt_upper(&euclid_dist_sq(x, &Point4::origin())) + sqrt_upper(r2);
                let mut v = Vec::new();
                let mut k = 1u64;
                while Q::from_integer(BigInt::from(2 * k * k)) <= &bound * &bound {
                    if &euclid_dist_sq(&self.member(k)?, x) < r2 {
                        v.push(k);
                    }
                    k += 1;
                }
                Ok(IndexSet::from_iter(v))
            }
        }
    }

    /// Whether distinct members are pairwise SLR, with the reason.
    pub fn internally_slr(&self) -> (bool, String) {
        match self {
            SiteSequence::Arithmetic { step, .. } => {
                let v = lorentz_interval(step, &Point4::origin()).value;
                (v.is_positive(), format!("member differences are multiples of the step, interval {}", fmt_q(&v)))
            }
            SiteSequence::Harmonic { dir, .. } => {
                let v = lorentz_interval(dir, &Point4::origin()).value;
                (v.is_positive(), format!("member differences are multiples of the direction, interval {}", fmt_q(&v)))
            }
            SiteSequence::ConeWrap => (
                true,
                "members lie on distinct generators of the origin's past light cone (strictly increasing circle parameter)"
                    .into(),
            ),
        }
    }
}

/// Exact `e_k = x` for the cone sequence.
fn cone_equal(x: &Point4) -> Result<Option<u64>> {
    if !x.t.is_integer() || !x.t.is_negative() || !x.x3.is_zero() {
        return Ok(None);
    }
    let s2 = &x.x1 * &x.x1 + &x.x2 * &x.x2;
    if s2 != &x.t * &x.t {
        return Ok(None);
    }
    let k = to_param(&(-&x.t).to_integer());
    if k > MAX_MATERIALIZED {
        return Err(Error::Unsupported("cone member equality beyond materialized range".into()));
    }
    Ok(if cone_member(k)? == *x { Some(k) } else { None })
}

/// Parameters k >= 1 with e_k <=_M x (strictly when `strict`) for the cone sequence.
fn cone_below(x: &Point4, strict: bool) -> Result<IndexSet> {
    let (t, p1, p2) = (&x.t, &x.x1, &x.x2);
    let r = &x.x1 * &x.x1 + &x.x2 * &x.x2 + &x.x3 * &x.x3 - t * t;
    let kappa = t - p1;
    // time condition k >= -t
    let kmin = to_param(&ceil_q(&-t)).max(1);
    let time_ok = IndexSet::range(kmin, None);
    // K: from here on the sign of the causal condition is decided without t_k
    let (k_cut, tail): (u64, IndexSet) = if kappa.is_zero() {
        if r.is_zero() {
            // x on the ray t = x1 >= ... with p2 = p3 = 0: condition is rho_k >= 0 iff p1 >= 0
            let all = if p1.is_negative() { IndexSet::empty() } else { IndexSet::range(1, None) };
            (1, all)
        } else {
            let mut k = 1u64;
            while cone_tail_bound(k, p1, p2) >= r {
                k += 1;
                if k > MAX_MATERIALIZED {
                    return Err(Error::Unsupported("cone tail bound not reached".into()));
                }
            }
            (k, IndexSet::empty())
        }
    } else {
        let kstar = &r / (&kappa * qi(2));
        let d0 = if kstar.is_integer() {
            Q::one()
        } else {
            let fr = &kstar - kstar.floor();
            fr.clone().min(Q::one() - fr)
        };
        let gap = kappa.abs() * qi(2) * d0;
        let mut k = 1u64;
        while cone_tail_bound(k, p1, p2) >= gap {
            k += 1;
            if k > MAX_MATERIALIZED {
                return Err(Error::Unsupported("cone tail bound not reached".into()));
            }
        }
        let fl = to_param(&kstar.floor().to_integer().max(BigInt::zero()));
        let above_star = if kstar.is_negative() { IndexSet::all() } else { IndexSet::range(fl + 1, None) };
        let mut set = if kappa.is_positive() { above_star } else { above_star.complement() };
        if kstar.is_integer() && !kstar.is_negative() {
            let ks = fl;
            set = set.difference(&IndexSet::single(ks));
            if ks >= 1 {
                // at k = k*, the condition reduces to rho >= 0, i.e. p1 + p2 t_k >= 0
                let ok = if ks <= MAX_MATERIALIZED {
                    !(p1 + p2 * cone_t(ks)?).is_negative()
                } else if p2.is_zero() {
                    !p1.is_negative()
                } else {
                    let big = Q::from_integer(BigInt::one() << 4000usize);
                    if (p1 / p2).abs() < big {
                        p2.is_positive()
                    } else {
                        return Err(Error::Unsupported("cone boundary index too large".into()));
                    }
                };
                if ok {
                    set = set.union(&IndexSet::single(ks));
                }
            }
        }
        (k, set)
    };
    // exact checks below the cut
    let mut head = Vec::new();
    for k in kmin..k_cut {
        let e = cone_member(k)?;
        if leq_m(&e, x) {
            head.push(k);
        }
    }
    let mut out = IndexSet::from_iter(head).union(&tail.intersect(&IndexSet::range(k_cut, None)).intersect(&time_ok));
    if strict {
        if let Some(k) = cone_equal(x)? {
            out = out.difference(&IndexSet::single(k));
        }
    }
    Ok(out)
}

/// Finite samples plus optional symbolic sequences. When there is at most one
/// sequence, sites are indexed: samples first, then sequence members in order.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SiteFamily {
    #[serde(default)]
    pub samples: Vec<Point4>,
    #[serde(default)]
    pub sequences: Vec<SiteSequence>,
}

impl SiteFamily {
    pub fn finite(samples: Vec<Point4>) -> Self {
        SiteFamily { samples, sequences: Vec::new() }
    }

    pub fn with_sequence(samples: Vec<Point4>, seq: SiteSequence) -> Self {
        SiteFamily { samples, sequences: vec![seq] }
    }

    /// Number of sites, `None` when infinite.
    pub fn count(&self) -> Option<u64> {
        if self.sequences.is_empty() {
            Some(self.samples.len() as u64)
        } else {
            None
        }
    }

    fn single_seq(&self) -> Result<Option<&SiteSequence>> {
        match self.sequences.len() {
            0 => Ok(None),
            1 => Ok(Some(&self.sequences[0])),
            _ => Err(Error::Unsupported("indexed sites with more than one sequence".into())),
        }
    }

    fn seq_to_index(&self, seq: &SiteSequence, params: &IndexSet) -> IndexSet {
        // parameter k maps to index samples.len() + (k - first)
        let first = seq.first_param();
        let m = self.samples.len() as u64;
        let shifted = params.intersect(&IndexSet::range(first, None));
        let mut runs = IndexSet::empty();
        for &(a, b) in shifted.runs() {
            runs = runs.union(&IndexSet::range(a - first + m, b.map(|b| b - first + m)));
        }
        runs
    }

    /// Parameter of sequence member with index `i`, if `i` is a sequence index.
    pub fn param_of(&self, i: u64) -> Option<u64> {
        let m = self.samples.len() as u64;
        let seq = self.sequences.first()?;
        (i >= m).then(|| i - m + seq.first_param())
    }

    pub fn point(&self, i: u64) -> Result<Point4> {
        let m = self.samples.len() as u64;
        if i < m {
            return Ok(self.samples[i as usize].clone());
        }
        match self.single_seq()? {
            Some(seq) => seq.member(i - m + seq.first_param()),
            None => Err(Error::Domain(format!("site index {i} out of range"))),
        }
    }

    fn collect(&self, f: impl Fn(&Point4) -> bool, g: impl Fn(&SiteSequence) -> Result<IndexSet>) -> Result<IndexSet> {
        let mut s = IndexSet::from_iter(
            self.samples.iter().enumerate().filter(|(_, p)| f(p)).map(|(i, _)| i as u64),
        );
        if let Some(seq) = self.single_seq()? {
            s = s.union(&self.seq_to_index(seq, &g(seq)?));
        }
        Ok(s)
    }

    /// Indices of sites `<=_M x` (`<_M` when strict).
    pub fn below(&self, x: &Point4, strict: bool) -> Result<IndexSet> {
        self.collect(
            |p| if strict { lt_m(p, x) } else { leq_m(p, x) },
            |s| s.below_params(x, strict),
        )
    }

    /// Indices of sites strictly above x.
    pub fn above(&self, x: &Point4) -> Result<IndexSet> {
        self.collect(|p| lt_m(x, p), |s| s.above_params(x))
    }

    pub fn equal(&self, x: &Point4) -> Result<IndexSet> {
        self.collect(|p| p == x, |s| s.equal_params(x))
    }

    /// Indices with squared Euclidean distance to x below r2.
    pub fn within(&self, x: &Point4, r2: &Q) -> Result<IndexSet> {
        self.collect(|p| &euclid_dist_sq(p, x) < r2, |s| s.within_params(x, r2))
    }

    /// Whether some site (sample or member of any sequence) is strictly below x.
    pub fn any_below(&self, x: &Point4) -> Result<bool> {
        if self.samples.iter().any(|p| lt_m(p, x)) {
            return Ok(true);
        }
        for s in &self.sequences {
            if !s.below_params(x, true)?.is_empty() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Whether x is a site.
    pub fn contains(&self, x: &Point4) -> Result<bool> {
        if self.samples.contains(x) {
            return Ok(true);
        }
        for s in &self.sequences {
            if !s.equal_params(x)?.is_empty() {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Some site y with y <=_M x.
    pub fn some_below_or_equal(&self, x: &Point4) -> Result<Option<Point4>> {
        if let Some(p) = self.samples.iter().find(|p| leq_m(p, x)) {
            return Ok(Some(p.clone()));
        }
        for s in &self.sequences {
            if let Some(k) = s.below_params(x, false)?.min() {
                return Ok(Some(s.member(k)?));
            }
        }
        Ok(None)
    }

    pub fn limits(&self) -> Vec<Point4> {
        self.sequences.iter().filter_map(|s| s.limit().cloned()).collect()
    }

    /// Violations of pairwise SLR among sites, and notes on how infinite parts were decided.
    pub fn slr_violations(&self) -> Result<(Vec<(Point4, Point4)>, Vec<String>)> {
        let mut bad = Vec::new();
        let mut notes = Vec::new();
        for i in 0..self.samples.len() {
            for j in i + 1..self.samples.len() {
                if !slr_m(&self.samples[i], &self.samples[j]) {
                    bad.push((self.samples[i].clone(), self.samples[j].clone()));
                }
            }
        }
        for (si, s) in self.sequences.iter().enumerate() {
            let (ok, why) = s.internally_slr();
            notes.push(format!("sequence {si}: {why}"));
            if !ok {
                let a = s.member(s.first_param())?;
                let b = s.member(s.first_param() + 1)?;
                bad.push((a, b));
            }
            for p in &self.samples {
                let hits = s.below_params(p, false)?.union(&s.above_params(p)?);
                if let Some(k) = hits.min() {
                    bad.push((p.clone(), s.member(k)?));
                }
            }
            for (sj, s2) in self.sequences.iter().enumerate().skip(si + 1) {
                // cross-sequence pairs: decided on the materialized prefix only
                let n = 24;
                'outer: for a in s.first_param()..s.first_param() + n {
                    for b in s2.first_param()..s2.first_param() + n {
                        let (pa, pb) = (s.member(a)?, s2.member(b)?);
                        if !slr_m(&pa, &pb) {
                            bad.push((pa, pb));
                            break 'outer;
                        }
                    }
                }
                notes.push(format!("sequences {si} and {sj}: cross pairs checked on the first {n} members"));
            }
        }
        Ok((bad, notes))
    }
}

/// Threshold time at which site `e` enters the closed past of the vertical line through `line`.
pub fn threshold(e: &Point4, line: &Point4) -> Surd {
    crate::geometry::vertical_threshold(e, line)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_below(seq: &SiteSequence, x: &Point4, strict: bool, upto: u64) -> Vec<u64> {
        (seq.first_param()..upto)
            .filter(|&k| {
                let e = seq.member(k).unwrap();
                if strict {
                    lt_m(&e, x)
                } else {
                    leq_m(&e, x)
                }
            })
            .collect()
    }

    #[test]
    fn cone_members_exact() {
        for k in 1..=64u64 {
            let e = cone_member(k).unwrap();
            assert_eq!(lorentz_interval(&e, &Point4::origin()).value, Q::zero());
            assert!(leq_m(&e, &Point4::origin()));
        }
        assert_eq!(cone_member(1).unwrap(), Point4::int(-1, 0, 1, 0));
        for k in 1..=16u64 {
            for m in k + 1..=16 {
                let (a, b) = (cone_member(k).unwrap(), cone_member(m).unwrap());
                assert!(slr_m(&a, &b));
                assert!(euclid_dist_sq(&a, &b) >= qi(2));
            }
        }
    }

    #[test]
    fn cone_below_examples() {
        let s = SiteSequence::ConeWrap;
        // origin is above every member
        assert_eq!(s.below_params(&Point4::origin(), true).unwrap(), IndexSet::range(1, None));
        // slightly below the origin: none
        assert!(s.below_params(&Point4::p2(q(-1, 4), qi(0)), true).unwrap().is_empty());
        // a member is not strictly below itself
        let e3 = cone_member(3).unwrap();
        assert!(!s.below_params(&e3, true).unwrap().contains(3));
        assert!(s.below_params(&e3, false).unwrap().contains(3));
    }

    #[test]
    fn harmonic_below_tail() {
        let s = SiteSequence::Harmonic { limit: Point4::p2(qi(0), q(1, 2)), dir: Point4::p2(qi(0), qi(-1)), start: 3 };
        // (1/10, 1/2): members (0, 1/2 - 1/k) are below when 1/k <= 1/10
        let x = Point4::p2(q(1, 10), q(1, 2));
        assert_eq!(s.below_params(&x, true).unwrap(), IndexSet::range(10, None));
    }

    fn small() -> impl Strategy<Value = Q> {
        (-8i64..=8, 1i64..=4).prop_map(|(n, d)| q(n, d))
    }

    fn pt() -> impl Strategy<Value = Point4> {
        (small(), small(), small(), small()).prop_map(|(t, a, b, c)| Point4::new(t, a, b, c))
    }

    proptest! {
        #[test]
        fn cone_below_matches_brute(x in pt(), strict in any::<bool>()) {
            let s = SiteSequence::ConeWrap;
            let got = s.below_params(&x, strict).unwrap();
            let want = brute_below(&s, &x, strict, 80);
            prop_assert_eq!(got.iter_below(80).collect::<Vec<_>>(), want);
        }

        #[test]
        fn cone_below_on_axis_points(t in -8i64..8, d in 1i64..4, p1 in -8i64..8) {
            // points with kappa = 0 exercise the boundary branch
            let x = Point4::p2(q(t, d), q(t, d) - q(p1, 3));
            let s = SiteSequence::ConeWrap;
            let got = s.below_params(&x, true).unwrap();
            prop_assert_eq!(got.iter_below(80).collect::<Vec<_>>(), brute_below(&s, &x, true, 80));
        }

        #[test]
        fn linear_below_matches_brute(x in pt(), b in pt(), st in pt(), strict in any::<bool>()) {
            for s in [
                SiteSequence::Arithmetic { base: b.clone(), step: st.clone() },
                SiteSequence::Harmonic { limit: b.clone(), dir: st.clone(), start: 1 },
            ] {
                let got = s.below_params(&x, strict).unwrap();
                prop_assert_eq!(got.iter_below(300).collect::<Vec<_>>(), brute_below(&s, &x, strict, 300));
                let above = s.above_params(&x).unwrap();
                let want: Vec<u64> = (s.first_param()..300).filter(|&k| lt_m(&x, &s.member(k).unwrap())).collect();
                prop_assert_eq!(above.iter_below(300).collect::<Vec<_>>(), want);
            }
        }

        #[test]
        fn within_matches_brute(x in pt(), b in pt(), st in pt(), r in 1i64..20) {
            let r2 = qi(r);
            for s in [
                SiteSequence::Arithmetic { base: b.clone(), step: st.clone() },
                SiteSequence::Harmonic { limit: b.clone(), dir: st.clone(), start: 1 },
                SiteSequence::ConeWrap,
            ] {
                let got = s.within_params(&x, &r2).unwrap();
                let want: Vec<u64> = (s.first_param()..60)
                    .filter(|&k| euclid_dist_sq(&s.member(k).unwrap(), &x) < r2).collect();
                prop_assert_eq!(got.iter_below(60).collect::<Vec<_>>(), want);
            }
        }
    }
}
