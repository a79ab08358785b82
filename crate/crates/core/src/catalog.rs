//! Generators for the concrete structures: each returns a model document with its expected
//! verdict table. Irrational coordinates are replaced by rational points that keep the
//! properties the arguments use (see each entry's note).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{BinaryKind, Constraints, Label};
use crate::format::{
    ChainSpec, DocKind, Document, EventSpec, Expectation, FamilySpec, HistSpec, PointSpec, SymbolicSpec, XSetSpec,
};
use crate::geometry::{euclid_dist_sq, fmt_q, lorentz_interval, q, qi, slr_m, Point4, Q};
use crate::histories::{ChainDescriptor, ChainLabels};
use crate::indexset::IndexSet;
use crate::model::PairSites;
use crate::sites::{SiteFamily, SiteSequence};

/// A catalog name with its parameters and their defaults.
#[derive(Clone, Debug, Serialize)]
pub struct EntryInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: Vec<(&'static str, &'static str)>,
}

pub fn list() -> Vec<EntryInfo> {
    let e = |name, summary, params: &[(&'static str, &'static str)]| EntryInfo { name, summary, params: params.to_vec() };
    vec![
        e("epr-bohm", "two space-like binary measurements whose equal outcomes share no history", &[]),
        e("eps2d", "2D sites accumulating at (0, 1/2) from below, outcome 0 below 1/2", &[("n", "6")]),
        e("imptop", "sites (0, k) with a vertical chain whose labels force the all-zeros sequence", &[
            ("n", "4"),
            ("family", "finitely-many-zeros"),
        ]),
        e("lattice", "sites (0, n, 0, 0) over all binary sequences", &[("n", "8")]),
        e("lw1", "two scenarios splitting at (0, +-1/k), accumulating at the origin", &[("n", "5")]),
        e("m2", "countably many binary choice points with the set X above one outcome of each", &[
            ("n", "8"),
            ("family", "finitely-many-zeros"),
            ("k", "2"),
        ]),
        e("planted", "three scenarios with a planted two-point FINFB", &[("seed", "0")]),
        e("random", "random valid model: scenarios as bit labels over SLR sites", &[
            ("seed", "0"),
            ("scenarios", "4"),
            ("sites", "5"),
            ("grid", "8"),
        ]),
        e("random-structure", "random finite transition structure", &[
            ("seed", "0"),
            ("points", "4"),
            ("outcomes", "3"),
            ("histories", "16"),
        ]),
        e("wrapped", "binary choice points on the past light cone of the origin", &[("n", "16")]),
    ]
}

/// Generates an entry, filling in defaults for missing parameters.
pub fn generate(name: &str, params: &BTreeMap<String, String>) -> Result<Document> {
    let info = list().into_iter().find(|e| e.name == name).ok_or_else(|| {
        let known: Vec<&str> = list().iter().map(|e| e.name).collect();
        Error::lookup_among("catalog entry", name, &known)
    })?;
    for k in params.keys() {
        if !info.params.iter().any(|(p, _)| p == k) {
            let known: Vec<&str> = info.params.iter().map(|(p, _)| *p).collect();
            return Err(Error::lookup_among("parameter", format!("{k} of {name}"), &known));
        }
    }
    let get = |k: &str| -> String {
        params
            .get(k)
            .cloned()
            .unwrap_or_else(|| info.params.iter().find(|(p, _)| *p == k).map(|(_, d)| d.to_string()).unwrap_or_default())
    };
    let num = |k: &str| -> Result<u64> {
        get(k).parse::<u64>().map_err(|_| Error::Parse(format!("parameter {k} of {name} must be a natural number")))
    };
    match name {
        "epr-bohm" => Ok(gen_epr_bohm()),
        "eps2d" => gen_eps2d(num("n")?),
        "imptop" => gen_imptop(num("n")?, &get("family")),
        "lattice" => gen_lattice(num("n")?),
        "lw1" => gen_lw1(num("n")?),
        "m2" => {
            let n = num("n")?;
            let kind = match get("family").as_str() {
                "all-strings" => BinaryKind::AllStrings(n),
                "at-most-k-zeros" => BinaryKind::AtMostKZeros(num("k")?),
                other => BinaryKind::parse(other)?,
            };
            gen_m2(n, kind)
        }
        "planted" => gen_planted(num("seed")?),
        "random" => gen_random_model(num("seed")?, num("scenarios")? as usize, num("sites")? as usize, num("grid")? as usize),
        "random-structure" => gen_random_structure(
            num("seed")?,
            num("points")? as usize,
            num("outcomes")? as usize,
            num("histories")? as usize,
        ),
        "wrapped" => gen_wrapped(num("n")?),
        _ => unreachable!("listed entry without a generator"),
    }
}

fn blank(name: &str, kind: DocKind, family: FamilySpec) -> Document {
    Document {
        name: name.into(),
        kind,
        note: String::new(),
        transitions: Vec::new(),
        order: Vec::new(),
        family,
        pairs: Vec::new(),
        sites: None,
        annotations: Vec::new(),
        symbolic: None,
        points: Vec::new(),
        events: Vec::new(),
        chains: Vec::new(),
        xsets: Vec::new(),
        expect: Vec::new(),
    }
}

fn named(v: &[&str]) -> FamilySpec {
    FamilySpec { scenarios: Some(v.iter().map(|s| s.to_string()).collect()), binary: None }
}

fn binary(k: BinaryKind) -> FamilySpec {
    FamilySpec { scenarios: None, binary: Some(k.id()) }
}

fn ex(verb: &str, args: &[&str], verdict: &str) -> Expectation {
    Expectation { verb: verb.into(), args: args.iter().map(|s| s.to_string()).collect(), verdict: verdict.into() }
}

fn point(id: &str, at: Point4, scenario: &str, outcomes: &[(&str, &str)]) -> PointSpec {
    PointSpec {
        id: id.into(),
        at,
        scenario: scenario.into(),
        outcomes: outcomes.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
    }
}

fn pair(a: &str, b: &str, sites: SiteFamily) -> PairSites {
    PairSites { a: a.into(), b: b.into(), sites }
}

fn point_arg(p: &Point4) -> String {
    p.to_strings().join(",")
}

fn p2i(t: i64, x: i64) -> Point4 {
    Point4::int(t, x, 0, 0)
}

/// Two scenarios: (+ on the left, - on the right) and the reverse.
pub fn gen_epr_bohm() -> Document {
    let mut d = blank("epr-bohm", DocKind::Mbs, named(&["pm", "mp"]));
    let (l, r) = (p2i(0, -1), p2i(0, 1));
    d.note = "left and right measurements at (0, -1) and (0, 1); pm has + left and - right".into();
    d.pairs.push(pair("pm", "mp", SiteFamily::finite(vec![l.clone(), r.clone()])));
    d.points = vec![
        point("source", p2i(-2, 0), "pm", &[]),
        point("left", l, "pm", &[("+", "pm"), ("-", "mp")]),
        point("right", r, "pm", &[("+", "mp"), ("-", "pm")]),
        point("left-out", p2i(1, -1), "pm", &[]),
        point("right-out", p2i(1, 1), "pm", &[]),
    ];
    d.transitions = vec!["left".into(), "right".into()];
    d.xsets.push(XSetSpec {
        name: "outs".into(),
        points: vec!["left-out".into(), "right-out".into()],
        indices: None,
        rule: None,
        scale: None,
    });
    d.expect = vec![
        ex("validate", &[], "valid"),
        ex("finfb", &["--f", "+,+"], "FINFB"),
        ex("finfb", &["--f", "-,-"], "FINFB"),
        ex("finfb", &["--f", "+,-"], "NONE"),
        ex("finfb", &["--f", "-,+"], "NONE"),
        ex("cfb", &["--f", "+,+"], "CFB"),
        ex("cfb", &["--f", "+,-"], "NONE"),
        ex("inffb", &["--f", "+,+"], "NONE"),
        ex("epsfb", &["--f", "+,+"], "NONE"),
        ex("postulate-a", &["--f", "+,+"], "false"),
        ex("postulate-b", &["--xset", "outs"], "false"),
        ex("locate", &["--f", "+,+", "--at", "0,-1,0,0"], "CONE"),
        ex("locate", &["--f", "+,-", "--at", "0,-1,0,0"], "NO_FB"),
        ex("fin2inf", &["--f", "+,+", "--history", "pm"], "INFFB"),
        ex("loci", &["--point", "left-out"], "FINFB"),
        ex("loci", &["--point", "source"], "empty"),
    ];
    d
}

/// Three scenarios s1 = (+,-), s2 = (-,+), s3 = (-,-) splitting at p1 (left) and p2 (right);
/// f = (+,+) is jointly impossible. Seed 0 uses (0, -1) and (0, 1); other seeds draw random
/// space-like pairs.
pub fn gen_planted(seed: u64) -> Result<Document> {
    let (p1, p2) = if seed == 0 {
        (p2i(0, -1), p2i(0, 1))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = |rng: &mut ChaCha8Rng, lo: i64, hi: i64| q(rng.gen_range(lo..=hi), rng.gen_range(1..=4));
        let p1 = Point4::new(r(&mut rng, -4, 4), r(&mut rng, -4, 4), r(&mut rng, -4, 4), r(&mut rng, -4, 4));
        loop {
            let off = Point4::new(r(&mut rng, -4, 4), r(&mut rng, -8, 8), r(&mut rng, -8, 8), r(&mut rng, -8, 8));
            let p2 = p1.add(&off);
            if slr_m(&p1, &p2) {
                break (p1, p2);
            }
        }
    };
    let mut d = blank(&format!("planted-{seed}"), DocKind::Mbs, named(&["s1", "s2", "s3"]));
    d.note = "s1 = (+,-), s2 = (-,+), s3 = (-,-) at (p1, p2)".into();
    d.pairs = vec![
        pair("s1", "s2", SiteFamily::finite(vec![p1.clone(), p2.clone()])),
        pair("s1", "s3", SiteFamily::finite(vec![p1.clone()])),
        pair("s2", "s3", SiteFamily::finite(vec![p2.clone()])),
    ];
    d.points = vec![
        point("p1", p1.clone(), "s1", &[("+", "s1"), ("-", "s2")]),
        point("p2", p2.clone(), "s1", &[("+", "s2"), ("-", "s1")]),
    ];
    d.expect = vec![
        ex("validate", &[], "valid"),
        ex("finfb", &["--f", "+,+"], "FINFB"),
        ex("finfb", &["--f", "-,-"], "NONE"),
        ex("fin2inf", &["--f", "+,+", "--history", "s3"], "INFFB"),
        ex("fin2inf", &["--f", "+,+", "--history", "s1"], "INFFB"),
    ];
    Ok(d)
}

fn bit_cell(n: u64, b: u8) -> HistSpec {
    HistSpec::Bits(Constraints::bit(n, b))
}

/// Skeleton of countably many binary choice points c_k (histories split by g(k)) with x_k above
/// the 0-outcome of c_k; the first `n` are listed as events.
pub fn gen_m2(n: u64, kind: BinaryKind) -> Result<Document> {
    if n == 0 {
        return Err(Error::Domain("m2 needs n >= 1".into()));
    }
    if let Some(w) = kind.width() {
        if w < n {
            return Err(Error::Domain(format!("{} has fewer than {n} indices", kind.id())));
        }
    }
    let mut d = blank("m2", DocKind::Structure, binary(kind));
    d.note = format!("order skeleton: c_k = <1, k> choice points, x_k = <3/2, k, 0> above g(k) = 0; {} listed", n);
    for k in 0..n {
        d.events.push(EventSpec {
            id: format!("c{k}"),
            at: None,
            histories: HistSpec::Word("all".into()),
            cells: vec![bit_cell(k, 0), bit_cell(k, 1)],
            outcomes: BTreeMap::new(),
        });
    }
    for k in 0..n {
        d.events.push(EventSpec {
            id: format!("x{k}"),
            at: None,
            histories: bit_cell(k, 0),
            cells: vec![bit_cell(k, 0)],
            outcomes: BTreeMap::new(),
        });
        d.order.push((format!("c{k}"), format!("x{k}")));
    }
    d.transitions = (0..n).map(|k| format!("c{k}")).collect();
    d.symbolic = Some(SymbolicSpec { indices: IndexSet::all(), skeleton: true });
    d.xsets = vec![
        XSetSpec { name: "X".into(), points: Vec::new(), indices: Some(IndexSet::all()), rule: Some("zeros".into()), scale: None },
        XSetSpec {
            name: "X-prefix".into(),
            points: (0..n.min(2)).map(|k| format!("x{k}")).collect(),
            indices: None,
            rule: None,
            scale: None,
        },
    ];
    d.expect = vec![ex("validate", &[], "valid"), ex("postulate-b", &["--xset", "X-prefix"], "false")];
    match kind {
        BinaryKind::FinitelyManyZeros => d.expect.extend([
            ex("inffb", &["--f", "zeros"], "INFFB"),
            ex("inffb", &["--f", "ones"], "NONE"),
            ex("cfb", &["--f", "zeros"], "CFB"),
            ex("finfb", &["--f", "zeros"], "NONE"),
            ex("finfb", &["--scan"], "NONE"),
            ex("postulate-b", &["--xset", "X"], "true"),
        ]),
        BinaryKind::AllStrings(_) => d.expect.extend([
            ex("finfb", &["--scan"], "NONE"),
            ex("inffb", &["--f", "zeros"], "NONE"),
            ex("postulate-b", &["--xset", "X"], "false"),
        ]),
        BinaryKind::AtMostKZeros(k) => {
            d.expect.push(ex("inffb", &["--f", "zeros"], "NONE"));
            if n > k {
                d.expect.push(ex("finfb", &["--f", "zeros", "--finite"], "FINFB"));
            }
        }
        BinaryKind::AllSequences => d.expect.push(ex("inffb", &["--f", "zeros"], "NONE")),
    }
    Ok(d)
}

/// Sites (0, k) with the vertical chain z_i = (i - 1/2, 0) whose i-th label has zeros on [0, i).
/// `family` is finitely-many-zeros (infinitely many sites) or all-strings (the first n only).
pub fn gen_imptop(n: u64, family: &str) -> Result<Document> {
    if n < 2 {
        return Err(Error::Domain("imptop needs n >= 2".into()));
    }
    let samples: Vec<Point4> = (0..n as i64).map(|k| p2i(0, k)).collect();
    let finite = match family {
        "finitely-many-zeros" => false,
        "all-strings" => true,
        other => return Err(Error::Parse(format!("imptop family must be finitely-many-zeros or all-strings, not {other}"))),
    };
    let kind = if finite { BinaryKind::AllStrings(n) } else { BinaryKind::FinitelyManyZeros };
    let mut d = blank("imptop", DocKind::Mbs, binary(kind));
    d.symbolic = Some(SymbolicSpec { indices: IndexSet::all(), skeleton: false });
    if finite {
        d.note = format!("all-strings variant: sites (0, k), k < {n}; the chain is cut at z_{n}");
        d.sites = Some(SiteFamily::finite(samples));
        let elements = (1..=n)
            .map(|i| (Point4::p2(q(2 * i as i64 - 1, 2), Q::zero()), Label::zeros_at(0..i).to_string()))
            .collect();
        d.chains.push(ChainSpec { name: "z".into(), descriptor: ChainDescriptor::Finite { elements } });
        d.expect = vec![ex("validate", &[], "valid"), ex("chain", &["--chain", "z"], "witness")];
    } else {
        d.note = format!("sites (0, k): {n} listed samples, then the sequence (0, {n} + k)");
        d.sites = Some(SiteFamily::with_sequence(
            samples,
            SiteSequence::Arithmetic { base: p2i(0, n as i64), step: p2i(0, 1) },
        ));
        d.chains.push(ChainSpec {
            name: "z".into(),
            descriptor: ChainDescriptor::Vertical {
                base: Point4::p2(q(1, 2), Q::zero()),
                step: Q::one(),
                start: 1,
                labels: ChainLabels::PrefixZeros { offset: 0 },
                extra: Vec::new(),
            },
        });
        d.expect = vec![ex("validate", &[], "valid"), ex("chain", &["--chain", "z"], "empty")];
    }
    Ok(d)
}

/// Two scenarios splitting at (0, +-1/k); the samples k <= n and two sequences for k > n, both
/// converging to the origin.
pub fn gen_lw1(n: u64) -> Result<Document> {
    if n < 2 {
        return Err(Error::Domain("lw1 needs n >= 2".into()));
    }
    let mut samples = Vec::new();
    for k in 1..=n as i64 {
        samples.push(Point4::p2(Q::zero(), q(1, k)));
        samples.push(Point4::p2(Q::zero(), q(-1, k)));
    }
    let seq = |s: i64| SiteSequence::Harmonic { limit: Point4::origin(), dir: p2i(0, s), start: n + 1 };
    let mut d = blank("lw1", DocKind::Mbs, named(&["s", "e"]));
    d.note = format!("samples (0, +-1/k), k <= {n}; sequences (0, +-1/k), k > {n}, limit (0, 0)");
    d.pairs.push(pair("s", "e", SiteFamily { samples, sequences: vec![seq(1), seq(-1)] }));
    d.points = vec![point("origin", Point4::origin(), "s", &[])];
    d.expect = vec![
        ex("validate", &[], "valid"),
        ex("choice-points", &["--at", "0,0,0,0", "--pair", "s,e"], "yes"),
        ex("choice-points", &["--at", "-1,0,0,0", "--pair", "s,e"], "no"),
    ];
    Ok(d)
}

/// Squared-gap and light-cone facts about the wrapped sites e_1..e_n.
#[derive(Clone, Debug, Serialize)]
pub struct WrappedGeometry {
    pub n: u64,
    pub on_cone: bool,
    pub pairwise_slr: bool,
    pub min_gap_sq: String,
    pub gap_at_least_2: bool,
}

pub fn wrapped_geometry(n: u64) -> Result<WrappedGeometry> {
    let seq = SiteSequence::ConeWrap;
    let pts: Vec<Point4> = (1..=n).map(|k| seq.member(k)).collect::<Result<_>>()?;
    let o = Point4::origin();
    let on_cone = pts.iter().all(|p| lorentz_interval(p, &o).value.is_zero() && p.t < Q::zero());
    let mut slr = true;
    let mut gap: Option<Q> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            slr &= slr_m(&pts[i], &pts[j]);
            let d = euclid_dist_sq(&pts[i], &pts[j]);
            gap = Some(match gap {
                Some(g) if g <= d => g,
                _ => d,
            });
        }
    }
    let g = gap.unwrap_or_else(|| qi(2));
    Ok(WrappedGeometry { n, on_cone, pairwise_slr: slr, gap_at_least_2: g >= qi(2), min_gap_sq: fmt_q(&g) })
}

/// Binary choice points e_k = (-k, k c_k, k s_k, 0) on the past light cone of the origin; (c_k, s_k)
/// is a rational unit-circle point close to angle pi (2^k - 1) / 2^k.
pub fn gen_wrapped(n: u64) -> Result<Document> {
    if n < 2 {
        return Err(Error::Domain("wrapped needs n >= 2".into()));
    }
    let g = wrapped_geometry(n)?;
    if !(g.on_cone && g.pairwise_slr && g.gap_at_least_2) {
        return Err(Error::Domain(format!("rational cone points fail the geometry checks at n = {n}: {g:?}")));
    }
    let mut d = blank("wrapped", DocKind::Mbs, binary(BinaryKind::FinitelyManyZeros));
    d.note = format!(
        "circle points from the parameters t_1 = 1, t_(k+1) = t_k + sqrt(1 + t_k^2) rounded up; \
         cone membership, pairwise SLR and squared gaps >= 2 checked exactly for k <= {n} (min {})",
        g.min_gap_sq
    );
    d.sites = Some(SiteFamily { samples: Vec::new(), sequences: vec![SiteSequence::ConeWrap] });
    d.symbolic = Some(SymbolicSpec { indices: IndexSet::all(), skeleton: false });
    d.xsets.push(XSetSpec {
        name: "X".into(),
        points: Vec::new(),
        indices: Some(IndexSet::all()),
        rule: Some("zeros".into()),
        scale: Some("1/2".into()),
    });
    let e1 = SiteSequence::ConeWrap.member(1)?;
    d.points = vec![
        point("e1", e1.clone(), "zeros[]", &[]),
        point("e2", SiteSequence::ConeWrap.member(2)?, "zeros[]", &[]),
        point("origin", Point4::origin(), "zeros[]", &[]),
    ];
    let below: Vec<(Point4, String)> = (0..4).map(|k| (Point4::int(k - 4, 0, 0, 0), "zeros[]".to_string())).collect();
    let mut elements = below;
    elements.push((Point4::origin(), "zeros[]".into()));
    d.chains.push(ChainSpec { name: "to-origin".into(), descriptor: ChainDescriptor::Finite { elements } });
    let at = point_arg(&e1);
    d.expect = vec![
        ex("validate", &[], "valid"),
        ex("inffb", &["--f", "zeros"], "INFFB"),
        ex("epsfb", &["--f", "zeros"], "NONE"),
        ex("postulate-a", &["--f", "zeros"], "false"),
        ex("postulate-b", &["--xset", "X"], "true"),
        ex("mingap", &["--f", "zeros", "--delta", "1/2"], "posC-fails"),
        ex("locate", &["--f", "zeros", "--at", &at], "OUTER_LINING"),
        ex("chain", &["--chain", "to-origin"], "witness"),
    ];
    Ok(d)
}

/// 2D sites (0, q): samples at 1/2, 1/10 and 1/2 + 2^-(j+1), plus (0, 1/2 - 1/(4k)) converging to
/// (0, 1/2) from below. Rule: outcome 0 below 1/2, 1 at or above.
pub fn gen_eps2d(n: u64) -> Result<Document> {
    if n < 2 {
        return Err(Error::Domain("eps2d needs n >= 2".into()));
    }
    let mut samples = vec![Point4::p2(Q::zero(), q(1, 2)), Point4::p2(Q::zero(), q(1, 10))];
    for j in 1..n.saturating_sub(1) {
        samples.push(Point4::p2(Q::zero(), q(1, 2) + Q::new(1.into(), num_bigint::BigInt::from(2u8).pow(j as u32 + 1))));
    }
    let mut ones = vec![0u64];
    ones.extend(2..samples.len() as u64);
    let rule = Label { default: 0, exceptions: ones.into_iter().collect() }.to_string();
    let mut d = blank("eps2d", DocKind::Mbs, binary(BinaryKind::FinitelyManyZeros));
    d.note = format!("{} samples; sequence (0, 1/2 - 1/(4k)), k >= 1, limit (0, 1/2); rule {rule}", samples.len());
    d.sites = Some(SiteFamily::with_sequence(
        samples,
        SiteSequence::Harmonic { limit: Point4::p2(Q::zero(), q(1, 2)), dir: Point4::p2(Q::zero(), q(-1, 4)), start: 1 },
    ));
    d.symbolic = Some(SymbolicSpec { indices: IndexSet::all(), skeleton: false });
    d.expect = vec![
        ex("validate", &[], "valid"),
        ex("epsfb", &["--f", &rule], "EPSFB"),
        ex("postulate-a", &["--f", &rule], "true"),
        ex("finfb", &["--f", &rule], "NONE"),
        ex("inffb", &["--f", &rule], "INFFB"),
        ex("epsfb", &["--f", "ones"], "NONE"),
        ex("postulate-a", &["--f", "ones"], "false"),
    ];
    Ok(d)
}

/// Sites e_k = (0, k, 0, 0) over all binary sequences.
pub fn gen_lattice(n: u64) -> Result<Document> {
    let mut d = blank("lattice", DocKind::Mbs, binary(BinaryKind::AllSequences));
    d.note = format!("sites (0, k, 0, 0), k >= 0; {n} shown as points");
    d.sites = Some(SiteFamily::with_sequence(Vec::new(), SiteSequence::Arithmetic { base: Point4::origin(), step: p2i(0, 1) }));
    d.symbolic = Some(SymbolicSpec { indices: IndexSet::all(), skeleton: false });
    d.points = (0..n as i64).map(|k| point(&format!("e{k}"), p2i(0, k), "zeros[]", &[])).collect();
    d.expect = vec![
        ex("validate", &[], "valid"),
        ex("mingap", &["--f", "zeros", "--delta", "1/2"], "NONE"),
        ex("inffb", &["--f", "zeros"], "NONE"),
    ];
    Ok(d)
}

/// Pairwise SLR random points with small rational coordinates.
pub fn random_slr_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<Point4> {
    let mut out: Vec<Point4> = Vec::new();
    let mut tries = 0;
    while out.len() < n {
        tries += 1;
        let spread = 4 + (tries / 50) as i64;
        let mut c = || q(rng.gen_range(-4 * spread..=4 * spread), 2);
        let p = Point4::new(c(), c(), c(), c());
        if out.iter().all(|o| slr_m(o, &p)) {
            out.push(p);
        }
    }
    out
}

/// Scenarios are distinct bit labels over pairwise SLR sites; C(a, b) holds the sites where the
/// labels differ, which makes every such model valid. Grid points are random.
pub fn gen_random_model(seed: u64, scenarios: usize, sites: usize, grid: usize) -> Result<Document> {
    if scenarios < 2 || sites == 0 || (sites < 64 && (1u64 << sites) < scenarios as u64) {
        return Err(Error::Domain(format!("cannot label {scenarios} scenarios with {sites} sites")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = random_slr_points(&mut rng, sites);
    let mut labels: Vec<u64> = Vec::new();
    while labels.len() < scenarios {
        let l = rng.gen_range(0..(1u64 << sites.min(20)));
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    let names: Vec<String> = (0..scenarios).map(|i| format!("s{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut d = blank(&format!("random-{seed}"), DocKind::Mbs, named(&refs));
    d.note = format!("labels {labels:?} over {sites} sites");
    for i in 0..scenarios {
        for j in i + 1..scenarios {
            let diff: Vec<Point4> = (0..sites).filter(|&b| (labels[i] ^ labels[j]) >> b & 1 == 1).map(|b| pts[b].clone()).collect();
            d.pairs.push(pair(&names[i], &names[j], SiteFamily::finite(diff)));
        }
    }
    for g in 0..grid {
        let mut c = || q(rng.gen_range(-12..=12), 2);
        let at = Point4::new(c(), c(), c(), c());
        let s = &names[rng.gen_range(0..scenarios)];
        d.points.push(point(&format!("g{g}"), at, s, &[]));
    }
    d.expect = vec![ex("validate", &[], "valid")];
    Ok(d)
}

/// A random finite structure over `histories` named histories: events in a random order where
/// every event's histories lie in one outcome of each earlier comparable event.
pub fn gen_random_structure(seed: u64, points: usize, outcomes: usize, histories: usize) -> Result<Document> {
    if points == 0 || outcomes == 0 || histories == 0 || histories > 64 {
        return Err(Error::Domain("random structures need 1..64 histories and at least one point".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..histories).map(|i| format!("h{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut d = blank(&format!("random-structure-{seed}"), DocKind::Structure, named(&refs));
    let mut cells_of: Vec<Vec<Vec<usize>>> = Vec::new();
    for j in 0..points {
        let mut allowed: Vec<usize> = (0..histories).collect();
        let mut preds = Vec::new();
        for (i, cells) in cells_of.iter().enumerate() {
            if rng.gen_bool(0.4) {
                let c = &cells[rng.gen_range(0..cells.len())];
                let next: Vec<usize> = allowed.iter().copied().filter(|h| c.contains(h)).collect();
                if !next.is_empty() {
                    allowed = next;
                    preds.push(i);
                }
            }
        }
        let mut hs: Vec<usize> = allowed.iter().copied().filter(|_| rng.gen_bool(0.7)).collect();
        if hs.is_empty() {
            hs.push(allowed[rng.gen_range(0..allowed.len())]);
        }
        let k = rng.gen_range(1..=outcomes.min(hs.len()));
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (n, &h) in hs.iter().enumerate() {
            // first k histories seed the cells so none stays empty
            let c = if n < k { n } else { rng.gen_range(0..k) };
            cells[c].push(h);
        }
        for c in &mut cells {
            c.sort_unstable();
        }
        hs.sort_unstable();
        let spec = |v: &[usize]| HistSpec::Names(v.iter().map(|&h| names[h].clone()).collect());
        d.events.push(EventSpec {
            id: format!("p{j}"),
            at: None,
            histories: spec(&hs),
            cells: cells.iter().map(|c| spec(c)).collect(),
            outcomes: BTreeMap::new(),
        });
        for i in preds {
            d.order.push((format!("p{i}"), format!("p{j}")));
        }
        cells_of.push(cells);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_loads_with_defaults() {
        for e in list() {
            let d = generate(e.name, &BTreeMap::new()).unwrap();
            let l = d.load().unwrap();
            if let Some(m) = &l.model {
                let r = m.validate().unwrap();
                assert!(r.is_valid(), "{}: {:?}", e.name, r.violations);
            }
        }
    }

    #[test]
    fn unknown_names_list_alternatives() {
        let e = generate("epr", &BTreeMap::new()).unwrap_err().to_string();
        assert!(e.contains("epr-bohm") && e.contains("wrapped"), "{e}");
        let mut p = BTreeMap::new();
        p.insert("size".to_string(), "3".to_string());
        assert!(generate("lw1", &p).is_err());
    }

    #[test]
    fn wrapped_geometry_holds_exactly() {
        let g = wrapped_geometry(16).unwrap();
        assert!(g.on_cone && g.pairwise_slr && g.gap_at_least_2, "{g:?}");
    }

    #[test]
    fn random_models_are_valid() {
        for seed in 0..20 {
            let d = gen_random_model(seed, 2 + (seed % 4) as usize, 3 + (seed % 4) as usize, 8).unwrap();
            let m = d.model().unwrap().unwrap();
            assert!(m.validate().unwrap().is_valid(), "seed {seed}");
        }
    }

    #[test]
    fn random_structures_build() {
        for seed in 0..50 {
            gen_random_structure(seed, 4, 3, 16).unwrap().load().unwrap();
        }
    }
}
