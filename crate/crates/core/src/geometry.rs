//! Exact Minkowski and Euclidean predicates over rational coordinates.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number used for every coordinate.
pub type Q = num_rational::BigRational;

/// Builds `n/d`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Formats a rational as `p/q` (denominator always present).
pub fn fmt_q(v: &Q) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses `p/q` or a bare integer `p`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational '{s}' (expected p/q)"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in '{s}'")));
    }
    Ok(Q::new(n, d))
}

/// Serde adapter storing rationals as `p/q` strings.
pub mod qser {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// A point of R^4: time coordinate `t` and spatial coordinates `x1..x3`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point4 {
    pub t: Q,
    pub x1: Q,
    pub x2: Q,
    pub x3: Q,
}

impl Point4 {
    pub fn new(t: Q, x1: Q, x2: Q, x3: Q) -> Self {
        Point4 { t, x1, x2, x3 }
    }

    pub fn origin() -> Self {
        Point4::new(Q::zero(), Q::zero(), Q::zero(), Q::zero())
    }

    /// Point in the 2D embedding (x2 = x3 = 0).
    pub fn p2(t: Q, x: Q) -> Self {
        Point4::new(t, x, Q::zero(), Q::zero())
    }

    /// Integer point shorthand.
    pub fn int(t: i64, x1: i64, x2: i64, x3: i64) -> Self {
        Point4::new(qi(t), qi(x1), qi(x2), qi(x3))
    }

    pub fn coords(&self) -> [&Q; 4] {
        [&self.t, &self.x1, &self.x2, &self.x3]
    }

    pub fn spatial(&self) -> [&Q; 3] {
        [&self.x1, &self.x2, &self.x3]
    }

    pub fn is_2d(&self) -> bool {
        self.x2.is_zero() && self.x3.is_zero()
    }

    /// Same point moved forward in time by `dt`.
    pub fn shifted(&self, dt: &Q) -> Point4 {
        Point4::new(&self.t + dt, self.x1.clone(), self.x2.clone(), self.x3.clone())
    }

    pub fn sub(&self, o: &Point4) -> Point4 {
        Point4::new(&self.t - &o.t, &self.x1 - &o.x1, &self.x2 - &o.x2, &self.x3 - &o.x3)
    }

    pub fn add(&self, o: &Point4) -> Point4 {
        Point4::new(&self.t + &o.t, &self.x1 + &o.x1, &self.x2 + &o.x2, &self.x3 + &o.x3)
    }

    pub fn scale(&self, k: &Q) -> Point4 {
        Point4::new(&self.t * k, &self.x1 * k, &self.x2 * k, &self.x3 * k)
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|c| c.is_zero())
    }

    /// `[t, x1, x2, x3]` as `p/q` strings.
    pub fn to_strings(&self) -> [String; 4] {
        [fmt_q(&self.t), fmt_q(&self.x1), fmt_q(&self.x2), fmt_q(&self.x3)]
    }

    pub fn from_strs(v: &[String]) -> Result<Point4> {
        if v.len() != 4 && v.len() != 2 {
            return Err(Error::Parse(format!(
                "a point needs 4 coordinates (or 2 for a 2D point), got {}",
                v.len()
            )));
        }
        let c: Vec<Q> = v.iter().map(|s| parse_q(s)).collect::<Result<_>>()?;
        Ok(if c.len() == 2 {
            Point4::p2(c[0].clone(), c[1].clone())
        } else {
            Point4::new(c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone())
        })
    }
}

impl fmt::Debug for Point4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: &Q| {
            if v.is_integer() {
                v.numer().to_string()
            } else {
                format!("{}/{}", v.numer(), v.denom())
            }
        };
        write!(f, "({}, {}, {}, {})", s(&self.t), s(&self.x1), s(&self.x2), s(&self.x3))
    }
}

impl Serialize for Point4 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        Point4::from_strs(&v).map_err(serde::de::Error::custom)
    }
}

/// Signed Lorentz interval between two points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub value: Q,
}

impl Interval {
    pub fn is_timelike(&self) -> bool {
        self.value.is_negative()
    }
    pub fn is_lightlike(&self) -> bool {
        self.value.is_zero()
    }
    pub fn is_spacelike(&self) -> bool {
        self.value.is_positive()
    }
}

fn sq(v: &Q) -> Q {
    v * v
}

/// Squared Euclidean norm of the spatial part of `x - y`.
pub fn spatial_dist_sq(x: &Point4, y: &Point4) -> Q {
    sq(&(&x.x1 - &y.x1)) + sq(&(&x.x2 - &y.x2)) + sq(&(&x.x3 - &y.x3))
}

pub fn lorentz_interval(x: &Point4, y: &Point4) -> Interval {
    Interval { value: spatial_dist_sq(x, y) - sq(&(&x.t - &y.t)) }
}

/// `x <=_M y`: y lies in the closed causal future of x.
pub fn leq_m(x: &Point4, y: &Point4) -> bool {
    x.t <= y.t && !lorentz_interval(x, y).value.is_positive()
}

/// Strict Minkowski order.
pub fn lt_m(x: &Point4, y: &Point4) -> bool {
    x != y && leq_m(x, y)
}

pub fn slr_m(x: &Point4, y: &Point4) -> bool {
    !leq_m(x, y) && !leq_m(y, x)
}

/// Squared Euclidean distance over all four coordinates.
pub fn euclid_dist_sq(x: &Point4, y: &Point4) -> Q {
    sq(&(&x.t - &y.t)) + spatial_dist_sq(x, y)
}

/// Integer square root (floor).
pub fn isqrt(n: &BigInt) -> BigInt {
    if n.sign() != Sign::Plus {
        return BigInt::zero();
    }
    n.sqrt()
}

/// Exact square root of a rational when it is a perfect square.
pub fn exact_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let (n, d) = (v.numer(), v.denom());
    let (rn, rd) = (isqrt(n), isqrt(d));
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

/// Bits of precision used by `sqrt_upper` / `sqrt_lower`.
pub const SQRT_BITS: usize = 32;

/// Rational r with r >= sqrt(v) and r - sqrt(v) < 2^-32 (exact for perfect squares).
pub fn sqrt_upper(v: &Q) -> Q {
    if let Some(r) = exact_sqrt(v) {
        return r;
    }
    let scale = BigInt::one() << (2 * SQRT_BITS);
    let (n, d) = (v.numer(), v.denom());
    let target = n * &scale;
    let mut k = isqrt(&target.div_floor(d));
    while &k * &k * d < target {
        k += 1;
    }
    Q::new(k, BigInt::one() << SQRT_BITS)
}

/// Rational r with r <= sqrt(v) and sqrt(v) - r < 2^-32 (exact for perfect squares).
pub fn sqrt_lower(v: &Q) -> Q {
    if let Some(r) = exact_sqrt(v) {
        return r;
    }
    let scale = BigInt::one() << (2 * SQRT_BITS);
    let (n, d) = (v.numer(), v.denom());
    let target = n * &scale;
    let mut k = isqrt(&target.div_floor(d));
    while &k * &k * d > target {
        k -= 1;
    }
    Q::new(k, BigInt::one() << SQRT_BITS)
}

/// `<a^0 + r, a^1, a^2, a^3>` with r a rational upper bound of the spatial distance of a and b.
pub fn up(a: &Point4, b: &Point4) -> Result<Point4> {
    if a.t < b.t {
        return Err(Error::Domain(format!(
            "up(a, b) needs a.t >= b.t, got a = {a}, b = {b}"
        )));
    }
    let r = sqrt_upper(&spatial_dist_sq(a, b));
    Ok(a.shifted(&r))
}

/// A real number of the form `a + sqrt(b)` with rational a and b >= 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    pub a: Q,
    pub b: Q,
}

impl Surd {
    pub fn rational(a: Q) -> Self {
        Surd { a, b: Q::zero() }
    }

    /// The rational value when sqrt(b) is rational.
    pub fn as_rational(&self) -> Option<Q> {
        exact_sqrt(&self.b).map(|r| &self.a + r)
    }

    pub fn lower(&self) -> Q {
        &self.a + sqrt_lower(&self.b)
    }

    pub fn upper(&self) -> Q {
        &self.a + sqrt_upper(&self.b)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn render(&self) -> String {
        match self.as_rational() {
            Some(r) => fmt_q(&r),
            None => format!("{} + sqrt({})", fmt_q(&self.a), fmt_q(&self.b)),
        }
    }

    pub fn cmp_q(&self, v: &Q) -> Ordering {
        self.cmp(&Surd::rational(v.clone()))
    }
}

/// Sign of `c + sqrt(p) - sqrt(r)` for rational c and p, r >= 0.
fn sign_surd_diff(c: &Q, p: &Q, r: &Q) -> Ordering {
    let s = p.cmp(r); // sign of sqrt(p) - sqrt(r)
    let cs = c.cmp(&Q::zero());
    if s == Ordering::Equal {
        return cs;
    }
    if cs == Ordering::Equal || cs == s {
        return s;
    }
    // Opposite signs: compare c^2 with (sqrt p - sqrt r)^2 = p + r - 2 sqrt(pr).
    // c^2 > s^2  <=>  w + 2 sqrt(pr) > 0 where w = c^2 - p - r.
    let w = c * c - p - r;
    let pr4 = p * r * qi(4);
    let mag = if !w.is_negative() {
        if w.is_zero() && pr4.is_zero() {
            Ordering::Equal
        } else {
            Ordering::Greater
        }
    } else {
        pr4.cmp(&(&w * &w))
    };
    match mag {
        Ordering::Greater => cs,
        Ordering::Less => s,
        Ordering::Equal => Ordering::Equal,
    }
}

impl Ord for Surd {
    fn cmp(&self, o: &Self) -> Ordering {
        sign_surd_diff(&(&self.a - &o.a), &self.b, &o.b)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Time at which `e` enters the closed causal past of the vertical line through `line`:
/// `e <=_M (tau, line spatial)` iff `tau >= threshold`.
pub fn vertical_threshold(e: &Point4, line: &Point4) -> Surd {
    Surd { a: e.t.clone(), b: spatial_dist_sq(e, line) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(t: i64, a: i64, b: i64, c: i64) -> Point4 {
        Point4::int(t, a, b, c)
    }

    #[test]
    fn interval_examples() {
        assert_eq!(lorentz_interval(&p(0, 0, 0, 0), &p(1, 0, 0, 0)).value, qi(-1));
        assert_eq!(lorentz_interval(&p(0, 0, 0, 0), &p(0, 1, 0, 0)).value, qi(1));
        assert_eq!(lorentz_interval(&p(0, 0, 0, 0), &p(2, 1, 1, 1)).value, qi(-1));
    }

    #[test]
    fn order_examples() {
        let o = p(0, 0, 0, 0);
        assert!(leq_m(&o, &o));
        assert!(leq_m(&o, &p(1, 1, 0, 0)));
        assert!(!leq_m(&o, &p(1, 2, 0, 0)));
        assert!(slr_m(&p(0, 1, 0, 0), &p(0, -1, 0, 0)));
        assert!(!slr_m(&o, &o));
        assert!(!slr_m(&o, &p(1, 0, 0, 0)));
    }

    #[test]
    fn up_examples() {
        assert_eq!(up(&p(0, 0, 0, 0), &p(0, 3, 4, 0)).unwrap(), p(5, 0, 0, 0));
        let a = p(3, 1, 2, 3);
        assert_eq!(up(&a, &a).unwrap(), a);
        let r = up(&p(2, 0, 0, 0), &p(1, 1, 0, 0)).unwrap();
        assert_eq!(r, p(3, 0, 0, 0));
        assert!(leq_m(&p(1, 1, 0, 0), &r));
        assert!(matches!(up(&p(0, 0, 0, 0), &p(1, 0, 0, 0)), Err(Error::Domain(_))));
    }

    #[test]
    fn up_irrational_bound() {
        let a = p(0, 0, 0, 0);
        let b = p(0, 1, 1, 0);
        let r = up(&a, &b).unwrap().t;
        assert!(&r * &r >= qi(2));
        let lo = &r - Q::new(BigInt::one(), BigInt::one() << 32);
        assert!(&lo * &lo < qi(2));
    }

    #[test]
    fn euclid_examples() {
        assert_eq!(euclid_dist_sq(&p(1, 2, 3, 4), &p(1, 2, 3, 4)), qi(0));
        assert_eq!(euclid_dist_sq(&p(0, 0, 0, 0), &p(0, 1, 1, 0)), qi(2));
    }

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(parse_q("-3/6").unwrap(), q(-1, 2));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert_eq!(fmt_q(&qi(7)), "7/1");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("0.5").is_err());
    }

    #[test]
    fn surd_ordering() {
        let s = |a: i64, b: i64| Surd { a: qi(a), b: qi(b) };
        assert_eq!(s(0, 2).cmp(&s(1, 0)), Ordering::Greater);
        assert_eq!(s(1, 2).cmp(&s(0, 8)), Ordering::Less); // 2.414 < 2.828
        assert_eq!(s(1, 1).cmp(&s(0, 4)), Ordering::Equal);
        assert_eq!(s(3, 0).cmp(&s(0, 9)), Ordering::Equal);
        assert_eq!(s(-1, 5).cmp(&s(0, 1)), Ordering::Greater); // 1.236 > 1
    }

    fn small() -> impl Strategy<Value = Q> {
        (-6i64..=6, 1i64..=3).prop_map(|(n, d)| q(n, d))
    }

    fn pt() -> impl Strategy<Value = Point4> {
        (small(), small(), small(), small()).prop_map(|(t, a, b, c)| Point4::new(t, a, b, c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn order_laws(x in pt(), y in pt(), z in pt()) {
            prop_assert!(leq_m(&x, &x));
            if leq_m(&x, &y) && leq_m(&y, &x) { prop_assert_eq!(&x, &y); }
            if leq_m(&x, &y) && leq_m(&y, &z) { prop_assert!(leq_m(&x, &z)); }
        }
    }

    proptest! {
        #[test]
        fn trichotomy(x in pt(), y in pt()) {
            prop_assert_eq!(slr_m(&x, &y), slr_m(&y, &x));
            let cases = [lt_m(&x, &y), lt_m(&y, &x), x == y, slr_m(&x, &y)];
            prop_assert_eq!(cases.iter().filter(|c| **c).count(), 1);
        }

        #[test]
        fn up_dominates(a in pt(), b in pt()) {
            let (a, b) = if a.t >= b.t { (a, b) } else { (b, a) };
            let u = up(&a, &b).unwrap();
            prop_assert!(leq_m(&b, &u));
            prop_assert_eq!(u.spatial(), a.spatial());
        }

        #[test]
        fn interval_matches_float(x in pt(), y in pt()) {
            use num_traits::ToPrimitive;
            let v = lorentz_interval(&x, &y).value;
            prop_assert_eq!(&v, &lorentz_interval(&y, &x).value);
            if !v.is_zero() {
                let f = |a: &Q| a.to_f64().unwrap();
                let d = [f(&x.t) - f(&y.t), f(&x.x1) - f(&y.x1), f(&x.x2) - f(&y.x2), f(&x.x3) - f(&y.x3)];
                let fv = -d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
                prop_assert_eq!(fv > 0.0, v.is_positive());
            }
        }

        #[test]
        fn surd_cmp_matches_float(a1 in -20i64..20, b1 in 0i64..50, a2 in -20i64..20, b2 in 0i64..50) {
            let s1 = Surd { a: qi(a1), b: qi(b1) };
            let s2 = Surd { a: qi(a2), b: qi(b2) };
            let (f1, f2) = (s1.to_f64(), s2.to_f64());
            if (f1 - f2).abs() > 1e-9 {
                prop_assert_eq!(s1.cmp(&s2), f1.partial_cmp(&f2).unwrap());
            }
            prop_assert_eq!(s1.cmp(&s2), s2.cmp(&s1).reverse());
        }

        #[test]
        fn sqrt_bounds(n in 0i64..10_000, d in 1i64..100) {
            let v = q(n, d);
            let (lo, hi) = (sqrt_lower(&v), sqrt_upper(&v));
            prop_assert!(&lo * &lo <= v);
            prop_assert!(&hi * &hi >= v);
            prop_assert!(&hi - &lo <= Q::new(BigInt::from(2), BigInt::one() << 32));
        }
    }
}
