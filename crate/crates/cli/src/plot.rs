//! SVG drawing of a 1+1 dimensional model: time upward, x1 to the right.

use std::fmt::Write as _;

use mbs_core::format::Loaded;
use mbs_core::geometry::{Point4, Q};
use mbs_core::histories::ChainDescriptor;
use mbs_core::model::Splitting;
use mbs_core::sites::{SiteFamily, SiteSequence};
use mbs_core::{Error, Result};
use num_traits::ToPrimitive;

const SIZE: f64 = 480.0;
const MARGIN: f64 = 30.0;
const TAIL: u64 = 12;

fn f(q: &Q) -> f64 {
    q.to_f64().unwrap_or(0.0)
}

fn xy(p: &Point4) -> (f64, f64) {
    (f(&p.x1), f(&p.t))
}

struct Frame {
    x0: f64,
    t0: f64,
    scale: f64,
}

impl Frame {
    fn fit(pts: &[(f64, f64)]) -> Frame {
        let (mut lo_x, mut hi_x, mut lo_t, mut hi_t) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
        for &(x, t) in pts {
            lo_x = lo_x.min(x);
            hi_x = hi_x.max(x);
            lo_t = lo_t.min(t);
            hi_t = hi_t.max(t);
        }
        let span = (hi_x - lo_x).max(hi_t - lo_t) * 1.1;
        Frame { x0: (lo_x + hi_x - span) / 2.0, t0: (lo_t + hi_t + span) / 2.0, scale: (SIZE - 2.0 * MARGIN) / span }
    }

    fn px(&self, (x, t): (f64, f64)) -> (f64, f64) {
        (MARGIN + (x - self.x0) * self.scale, MARGIN + (self.t0 - t) * self.scale)
    }

    fn world_top(&self) -> f64 {
        self.t0
    }
}

fn site_families(l: &Loaded) -> Vec<&SiteFamily> {
    match l.model.as_ref().map(|m| &m.splitting) {
        Some(Splitting::Explicit(pairs)) => pairs.iter().map(|p| &p.sites).collect(),
        Some(Splitting::Indexed(s)) => vec![s],
        None => Vec::new(),
    }
}

fn tail(seq: &SiteSequence) -> Result<Vec<Point4>> {
    let first = seq.first_param();
    (first..first + TAIL).map(|k| seq.member(k)).collect()
}

fn chain_points(c: &ChainDescriptor) -> Vec<Point4> {
    match c {
        ChainDescriptor::Finite { elements } => elements.iter().map(|(p, _)| p.clone()).collect(),
        ChainDescriptor::Vertical { base, step, extra, .. } => {
            let mut v: Vec<Point4> = (0..6i64).map(|i| base.shifted(&(step * Q::from_integer(i.into())))).collect();
            v.extend(extra.iter().map(|(p, _)| p.clone()));
            v
        }
    }
}

fn n(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Renders the model. Fails with Unsupported for models using the x2 or x3 axes.
pub fn plot(l: &Loaded) -> Result<String> {
    if let Some(m) = &l.model {
        if !m.is_2d() {
            return Err(Error::Unsupported(format!("{} is not 1+1 dimensional", l.name())));
        }
    }
    let mut sites: Vec<Point4> = Vec::new();
    let mut tails: Vec<Vec<Point4>> = Vec::new();
    let mut limits: Vec<Point4> = Vec::new();
    for fam in site_families(l) {
        for p in &fam.samples {
            if !sites.contains(p) {
                sites.push(p.clone());
            }
        }
        for seq in &fam.sequences {
            tails.push(tail(seq)?);
            if let Some(p) = seq.limit() {
                if !limits.contains(p) {
                    limits.push(p.clone());
                }
            }
        }
    }
    let points: Vec<(String, Point4)> = l
        .structure
        .events
        .iter()
        .filter_map(|e| e.location.clone().map(|p| (e.id.clone(), p)))
        .collect();
    let chains: Vec<(String, Vec<Point4>)> =
        l.doc.chains.iter().map(|c| (c.name.clone(), chain_points(&c.descriptor))).collect();

    let mut all: Vec<(f64, f64)> = Vec::new();
    all.extend(sites.iter().map(xy));
    all.extend(tails.iter().flatten().map(xy));
    all.extend(limits.iter().map(xy));
    all.extend(points.iter().map(|(_, p)| xy(p)));
    all.extend(chains.iter().flat_map(|(_, c)| c.iter().map(xy)));
    let fr = Frame::fit(&all);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(l.name()));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ax, at) = fr.px((0.0, 0.0));
    let _ = writeln!(
        s,
        r##"<g class="axes" stroke="#999" stroke-width="1"><line x1="{m}" y1="{y}" x2="{e}" y2="{y}"/><line x1="{x}" y1="{m}" x2="{x}" y2="{e}"/></g>"##,
        m = n(MARGIN),
        e = n(SIZE - MARGIN),
        x = n(ax.clamp(MARGIN, SIZE - MARGIN)),
        y = n(at.clamp(MARGIN, SIZE - MARGIN)),
    );
    let _ = writeln!(s, r#"<text class="label" x="{}" y="{}" font-size="10">x</text>"#, n(SIZE - MARGIN + 4.0), n(at.clamp(MARGIN, SIZE - MARGIN)));
    let _ = writeln!(s, r#"<text class="label" x="{}" y="{}" font-size="10">t</text>"#, n(ax.clamp(MARGIN, SIZE - MARGIN)), n(MARGIN - 6.0));

    // future light cones of the declared points
    let top = fr.world_top();
    for (_, p) in &points {
        let (x, t) = xy(p);
        let h = top - t;
        if h <= 0.0 {
            continue;
        }
        let (a, b) = fr.px((x, t));
        let (l1, l2) = fr.px((x - h, top));
        let (r1, r2) = fr.px((x + h, top));
        let _ = writeln!(
            s,
            r##"<path class="cone" d="M{} {} L{} {} M{} {} L{} {}" stroke="#cdd" fill="none"/>"##,
            n(l1),
            n(l2),
            n(a),
            n(b),
            n(a),
            n(b),
            n(r1),
            n(r2)
        );
    }
    for (name, c) in &chains {
        let d: Vec<String> = c.iter().map(|p| fr.px(xy(p))).map(|(a, b)| format!("{} {}", n(a), n(b))).collect();
        if d.is_empty() {
            continue;
        }
        let _ = writeln!(
            s,
            r##"<polyline class="chain" data-name="{}" points="{}" stroke="#36c" stroke-dasharray="4 2" fill="none"/>"##,
            escape(name),
            d.join(" ")
        );
    }
    for t in &tails {
        for p in t {
            let (a, b) = fr.px(xy(p));
            let _ = writeln!(s, r##"<circle class="tail" cx="{}" cy="{}" r="1.5" fill="#c63"/>"##, n(a), n(b));
        }
    }
    for p in &sites {
        let (a, b) = fr.px(xy(p));
        let _ = writeln!(s, r##"<circle class="site" cx="{}" cy="{}" r="3" fill="#c30"/>"##, n(a), n(b));
    }
    for p in &limits {
        let (a, b) = fr.px(xy(p));
        let _ = writeln!(
            s,
            r##"<circle class="limit" cx="{}" cy="{}" r="4" stroke="#c30" fill="none"/><text class="label" x="{}" y="{}" font-size="9">lim {}</text>"##,
            n(a),
            n(b),
            n(a + 5.0),
            n(b - 5.0),
            escape(&p.to_string())
        );
    }
    for (id, p) in &points {
        let (a, b) = fr.px(xy(p));
        let _ = writeln!(
            s,
            r#"<rect class="point" x="{}" y="{}" width="5" height="5" fill="black"/><text class="label" x="{}" y="{}" font-size="10">{}</text>"#,
            n(a - 2.5),
            n(b - 2.5),
            n(a + 5.0),
            n(b + 12.0),
            escape(id)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
