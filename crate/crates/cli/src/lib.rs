//! The `mbs` command line: load a model file or catalog entry, run one detector, print the
//! certificate as JSON followed by a short summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use mbs_core::catalog;
use mbs_core::family::{Family, Label, Scenario};
use mbs_core::format::{self, parse_point, parse_rule, Document, Loaded, XSet};
use mbs_core::funny_business as fb;
use mbs_core::geometry::{parse_q, Point4, Q};
use mbs_core::histories::{chain_compactness_witness, elementary_possibilities, ChainVerdict};
use mbs_core::model::Decision;
use mbs_core::{Error, Result};

pub mod plot;

#[derive(Parser, Debug)]
#[command(name = "mbs", version, about = "Minkowskian branching structures: validation and funny-business detection")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone, Default)]
struct Src {
    /// Model file (TOML)
    model: Option<String>,
    /// Use a catalog entry instead of a file
    #[arg(long)]
    catalog: Option<String>,
    /// Catalog parameter k=v (repeatable)
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Shorthand for --param family=...
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct Rule {
    /// Product function: one outcome token per transition point ("+,-"), or a binary rule
    /// ("zeros", "ones", "zeros[0..3]", "ones[2]")
    #[arg(long = "f", allow_hyphen_values = true)]
    f: Option<String>,
    /// Use the finite transition points even when a symbolic family is declared
    #[arg(long)]
    finite: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check the splitting-site conditions
    Validate(Src),
    /// The order among the listed points
    Order(Src),
    /// Space-like related pairs among the listed points
    Slr(Src),
    /// Generated and limit choice points, or a decision at one point
    ChoicePoints {
        #[command(flatten)]
        src: Src,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Scenario pair "a,b" (binary labels are separated by ';')
        #[arg(long, allow_hyphen_values = true)]
        pair: Option<String>,
    },
    /// Elementary possibilities at each listed point
    Possibilities(Src),
    /// Finitary funny business
    Finfb {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
        /// Scan every product function over the transition points
        #[arg(long)]
        scan: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Infinitary funny business
    Inffb {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
    },
    /// Combinatorial funny business
    Cfb {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
    },
    /// ε-funny business
    Epsfb {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
        /// Extra sampled radius p/q (repeatable)
        #[arg(long, allow_hyphen_values = true)]
        delta: Vec<String>,
    },
    /// Postulate A
    PostulateA {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
        #[arg(long, allow_hyphen_values = true)]
        delta: Vec<String>,
    },
    /// Postulate B for a declared point set
    PostulateB {
        #[command(flatten)]
        src: Src,
        #[arg(long)]
        xset: String,
    },
    /// Cone localization above a point a*
    Locate {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Extra outer-lining width p/q (repeatable)
        #[arg(long, allow_hyphen_values = true)]
        delta: Vec<String>,
    },
    /// Condition posC and the chain construction
    Mingap {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        delta: String,
    },
    /// Extend a FINFB witness inside one history to INFFB
    Fin2inf {
        #[command(flatten)]
        src: Src,
        #[command(flatten)]
        rule: Rule,
        #[arg(long)]
        history: Option<String>,
    },
    /// Cause-like loci of a point
    Loci {
        #[command(flatten)]
        src: Src,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Compactness along a declared chain
    Chain {
        #[command(flatten)]
        src: Src,
        #[arg(long)]
        chain: String,
    },
    /// Run the expected-verdict table of a model
    Expect {
        #[command(flatten)]
        src: Src,
    },
    /// SVG drawing of a 2D model
    Plot {
        #[command(flatten)]
        src: Src,
        #[arg(long)]
        out: Option<String>,
    },
    /// Catalog entries
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCmd,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    List,
    /// Print (or write) an entry as a model file
    Gen {
        name: String,
        #[arg(long = "param", value_name = "K=V")]
        params: Vec<String>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    verb: &'static str,
    model: String,
    verdict: String,
    certificate: Value,
    summary: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Unsupported(_) => 2,
        _ => 1,
    }
}

/// Runs one command line (without the program name).
pub fn run<S: AsRef<str>>(args: &[S]) -> Outcome {
    let argv: Vec<String> = std::iter::once("mbs".to_string()).chain(args.iter().map(|s| s.as_ref().to_string())).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(cli.cmd) {
        Ok(Output::Report(r)) => Outcome { code: 0, stdout: render(&r), stderr: String::new() },
        Ok(Output::Text(t)) => Outcome { code: 0, stdout: t, stderr: String::new() },
        Err(e) => Outcome { code: code_of(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

fn render(r: &Report) -> String {
    let block = json!({
        "command": r.verb,
        "model": r.model,
        "verdict": r.verdict,
        "certificate": r.certificate,
    });
    let mut s = serde_json::to_string_pretty(&block).expect("json");
    s.push_str("\n\n");
    let _ = writeln!(s, "{} on {}: {}", r.verb, r.model, r.verdict);
    for line in &r.summary {
        let _ = writeln!(s, "  {line}");
    }
    s
}

enum Output {
    Report(Report),
    Text(String),
}

fn parse_params(params: &[String], family: &Option<String>) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| Error::Parse(format!("--param '{p}' is not k=v")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(f) = family {
        out.insert("family".into(), f.clone());
    }
    Ok(out)
}

fn document(src: &Src) -> Result<Document> {
    match (&src.model, &src.catalog) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {path}: {e}")))?;
            format::parse(&text).map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
                other => other,
            })
        }
        (None, Some(name)) => catalog::generate(name, &parse_params(&src.params, &src.family)?),
        (Some(_), Some(_)) => Err(Error::Parse("give a model file or --catalog, not both".into())),
        (None, None) => Err(Error::Parse("no model: give a file or --catalog NAME".into())),
    }
}

fn load(src: &Src) -> Result<Loaded> {
    document(src)?.load()
}

fn need_f(rule: &Rule) -> Result<&str> {
    rule.f.as_deref().ok_or_else(|| Error::Parse("missing --f".into()))
}

fn deltas(v: &[String]) -> Result<Vec<Q>> {
    v.iter().map(|d| parse_q(d)).collect()
}

fn symbolic(l: &Loaded, rule: &Rule) -> bool {
    l.doc.symbolic.is_some() && !rule.finite
}

fn report(verb: &'static str, l: &Loaded, verdict: impl ToString, certificate: Value, summary: Vec<String>) -> Output {
    Output::Report(Report { verb, model: l.name().to_string(), verdict: verdict.to_string(), certificate, summary })
}

fn dispatch(cmd: Cmd) -> Result<Output> {
    match cmd {
        Cmd::Validate(src) => validate(&load(&src)?),
        Cmd::Order(src) => order(&load(&src)?),
        Cmd::Slr(src) => slr(&load(&src)?),
        Cmd::ChoicePoints { src, at, pair } => choice_points(&load(&src)?, at.as_deref(), pair.as_deref()),
        Cmd::Possibilities(src) => possibilities(&load(&src)?),
        Cmd::Finfb { src, rule, scan, jobs } => finfb(&load(&src)?, &rule, scan, jobs),
        Cmd::Inffb { src, rule } => inffb(&load(&src)?, &rule),
        Cmd::Cfb { src, rule } => cfb(&load(&src)?, &rule),
        Cmd::Epsfb { src, rule, delta } => epsfb(&load(&src)?, &rule, &deltas(&delta)?),
        Cmd::PostulateA { src, rule, delta } => postulate_a(&load(&src)?, &rule, &deltas(&delta)?),
        Cmd::PostulateB { src, xset } => postulate_b(&load(&src)?, &xset),
        Cmd::Locate { src, rule, at, delta } => locate(&load(&src)?, &rule, &parse_point(&at)?, &deltas(&delta)?),
        Cmd::Mingap { src, rule, delta } => mingap(&load(&src)?, &rule, &parse_q(&delta)?),
        Cmd::Fin2inf { src, rule, history } => fin2inf(&load(&src)?, &rule, history.as_deref()),
        Cmd::Loci { src, point, jobs } => loci(&load(&src)?, &point, jobs),
        Cmd::Chain { src, chain } => chain_cmd(&load(&src)?, &chain),
        Cmd::Expect { src } => expect(&src),
        Cmd::Plot { src, out } => {
            let l = load(&src)?;
            let svg = plot::plot(&l)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &svg).map_err(|e| Error::Parse(format!("cannot write {path}: {e}")))?;
                    Ok(report("plot", &l, "written", json!({ "path": path, "bytes": svg.len() }), vec![format!("wrote {path}")]))
                }
                None => Ok(Output::Text(svg)),
            }
        }
        Cmd::Catalog { cmd: CatalogCmd::List } => {
            let entries = catalog::list();
            let mut s = serde_json::to_string_pretty(&json!({ "command": "catalog", "verdict": "listed", "entries": entries }))
                .expect("json");
            s.push_str("\n\n");
            for e in &entries {
                let params: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(s, "{:<18} {}  [{}]", e.name, e.summary, params.join(" "));
            }
            Ok(Output::Text(s))
        }
        Cmd::Catalog { cmd: CatalogCmd::Gen { name, params, family, out } } => {
            let doc = catalog::generate(&name, &parse_params(&params, &family)?)?;
            let text = format::to_toml(&doc)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, &text).map_err(|e| Error::Parse(format!("cannot write {path}: {e}")))?;
                    Ok(Output::Text(format!("wrote {path}\n")))
                }
                None => Ok(Output::Text(text)),
            }
        }
    }
}

fn validate(l: &Loaded) -> Result<Output> {
    match &l.model {
        Some(m) => {
            let r = m.validate()?;
            let v: Vec<String> = r.violations.iter().map(|v| v.to_string()).collect();
            let mut summary = if v.is_empty() { vec!["no violations".to_string()] } else { v.clone() };
            summary.extend(r.notes.iter().map(|n| format!("note: {n}")));
            let verdict = if r.is_valid() { "valid" } else { "invalid" };
            Ok(report("validate", l, verdict, json!({ "violations": v, "notes": r.notes }), summary))
        }
        None => {
            let n = l.structure.len();
            Ok(report(
                "validate",
                l,
                "valid",
                json!({ "violations": [], "notes": [format!("{n} events; possibilities partition their histories")] }),
                vec![format!("{n} events, order acyclic, possibilities partition their histories")],
            ))
        }
    }
}

fn event_ids(l: &Loaded) -> Vec<String> {
    l.structure.events.iter().map(|e| e.id.clone()).collect()
}

fn order(l: &Loaded) -> Result<Output> {
    let st = &l.structure;
    let ids = event_ids(l);
    let mut less = Vec::new();
    for i in 0..st.len() {
        for j in 0..st.len() {
            if st.lt(i, j) {
                less.push(format!("{} < {}", ids[i], ids[j]));
            }
        }
    }
    let merged: Vec<String> = l
        .index
        .iter()
        .filter(|(id, &k)| **id != ids[k])
        .map(|(id, &k)| format!("{id} = {}", ids[k]))
        .collect();
    let mut summary = less.clone();
    summary.extend(merged.iter().cloned());
    Ok(report("order", l, "reported", json!({ "less": less, "same_event": merged }), summary))
}

fn slr(l: &Loaded) -> Result<Output> {
    let st = &l.structure;
    let ids = event_ids(l);
    let mut pairs = Vec::new();
    for i in 0..st.len() {
        for j in i + 1..st.len() {
            if st.slr(i, j) {
                pairs.push(format!("{} ~ {}", ids[i], ids[j]));
            }
        }
    }
    Ok(report("slr", l, "reported", json!({ "slr": pairs }), pairs.clone()))
}

fn scenario_pair(l: &Loaded, pair: &str) -> Result<(Scenario, Scenario)> {
    let sep = if pair.contains(';') { ';' } else { ',' };
    let (a, b) = pair.split_once(sep).ok_or_else(|| Error::Parse(format!("--pair '{pair}' needs two scenarios")))?;
    Ok((l.family.scenario(a.trim())?, l.family.scenario(b.trim())?))
}

fn choice_points(l: &Loaded, at: Option<&str>, pair: Option<&str>) -> Result<Output> {
    let m = l.model()?;
    if let Some(at) = at {
        let x = parse_point(at)?;
        let (s, e) = scenario_pair(l, pair.ok_or_else(|| Error::Parse("--at needs --pair".into()))?)?;
        let ev = m.event_class(&x, &s)?;
        let d = m.is_choice_point(&ev, &s, &e)?;
        let generated = m.generated_choice_points(&s, &e);
        let in_generated = match &generated {
            Ok(g) => Some(g.iter().any(|c| m.same_event(c, &ev))),
            Err(_) => None,
        };
        let verdict = match d {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Undecided => "undecided",
        };
        let summary = vec![
            format!("[{x}_{s}] is a choice point of {s}, {e}: {verdict}"),
            match in_generated {
                Some(b) => format!("in the generated set: {b}"),
                None => "generated set not enumerable".into(),
            },
        ];
        return Ok(report(
            "choice-points",
            l,
            verdict,
            json!({ "at": x, "pair": [s.to_string(), e.to_string()], "decision": verdict, "in_generated_set": in_generated }),
            summary,
        ));
    }
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    match &l.family {
        Family::Explicit(names) => {
            for (i, a) in names.iter().enumerate() {
                for b in &names[i + 1..] {
                    let (s, e) = (Scenario::Named(a.clone()), Scenario::Named(b.clone()));
                    let gen: Vec<Point4> = m.generated_choice_points(&s, &e)?.into_iter().map(|c| c.location).collect();
                    let mut limits = Vec::new();
                    if let Some(f) = m.pair_sites(a, b) {
                        for p in f.limits() {
                            let ev = m.event_class(&p, &s)?;
                            let d = m.is_choice_point(&ev, &s, &e)?;
                            limits.push(json!({ "at": p, "decision": format!("{d:?}") }));
                            summary.push(format!("{a}, {b}: limit {p} choice point: {d:?}"));
                        }
                    }
                    summary.push(format!("{a}, {b}: {} generated", gen.len()));
                    rows.push(json!({ "pair": [a, b], "generated": gen, "limits": limits }));
                }
            }
        }
        Family::Binary(_) => {
            let sites = m.indexed_sites().ok_or_else(|| Error::Unsupported("binary model without sites".into()))?;
            let shown = sites.count().unwrap_or(16).min(16);
            let pts: Vec<Point4> = (0..shown).map(|i| sites.point(i)).collect::<Result<_>>()?;
            summary.push(format!("site n generates the choice points of every pair differing at n; first {shown} listed"));
            for p in sites.limits() {
                summary.push(format!("declared limit {p}"));
            }
            rows.push(json!({ "sites": pts, "limits": sites.limits(), "infinite": sites.count().is_none() }));
        }
    }
    Ok(report("choice-points", l, "reported", json!({ "pairs": rows }), summary))
}

fn possibilities(l: &Loaded) -> Result<Output> {
    let st = &l.structure;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (k, e) in st.events.iter().enumerate() {
        let cells: Vec<String> = match (&l.model, l.classes.get(k)) {
            (Some(m), Some(c)) => elementary_possibilities(c, m)?.iter().map(|p| l.family.render(&p.members)).collect(),
            _ => e.cells.iter().map(|c| l.family.render(c)).collect(),
        };
        summary.push(format!("{}: {}", e.id, cells.join(" | ")));
        rows.push(json!({ "point": e.id, "histories": l.family.render(&e.histories), "cells": cells }));
    }
    Ok(report("possibilities", l, "reported", json!({ "points": rows }), summary))
}

fn finfb(l: &Loaded, rule: &Rule, scan: bool, jobs: usize) -> Result<Output> {
    if scan {
        let pts = l.transition_points();
        let r = fb::scan_product_functions(&l.structure, &pts, jobs.max(1))?;
        let verdict = if r.with_finfb > 0 { fb::FbKind::FINFB } else { fb::FbKind::NONE };
        let summary = vec![format!(
            "{} product functions over {} points, {} with FINFB",
            r.product_functions,
            r.points.len(),
            r.with_finfb
        )];
        return Ok(report("finfb", l, verdict, to_value(&r), summary));
    }
    let f = need_f(rule)?;
    if symbolic(l, rule) {
        let sp = l.symbolic_points()?;
        let r = fb::check_finfb_symbolic(&sp, &parse_rule(f)?)?;
        let summary = vec![r.argument.clone()];
        return Ok(report("finfb", l, r.verdict, to_value(&r), summary));
    }
    let ts = l.transition_set(f)?;
    let r = fb::check_finfb(&ts)?;
    let belnap = fb::belnap_witness(&ts)?;
    let mut summary = Vec::new();
    if let Some(w) = &r.witness {
        fb::verify_finfb(&ts, w).map_err(|e| Error::Domain(format!("witness fails recheck: {e}")))?;
        summary.push(format!("A1 = {{{}}} possible in {}", w.a1_points.join(", "), w.h_a1));
        summary.push(format!("A2 = {{{}}} possible in {}", w.a2_points.join(", "), w.h_a2));
        summary.push(format!("A1 u A2: {}", w.union_empty));
    } else {
        summary.push(format!("every pair of SLR parts of the {} transitions is jointly possible", ts.len()));
    }
    let transitions: Vec<Value> = ts
        .transitions
        .iter()
        .map(|t| json!({ "point": ts.structure.events[t.event].id, "outcome": set_json(&l.family, &t.outcome) }))
        .collect();
    let slr: Vec<[usize; 2]> =
        (0..ts.len()).flat_map(|i| (i + 1..ts.len()).map(move |j| [i, j])).filter(|&[i, j]| ts.slr(i, j)).collect();
    let cert = json!({ "report": r, "belnap": belnap, "transitions": transitions, "slr": slr });
    Ok(report("finfb", l, r.verdict, cert, summary))
}

/// Explicit sets as member lists, binary sets as their constraints.
fn set_json(family: &Family, h: &mbs_core::family::HistSet) -> Value {
    match family {
        Family::Explicit(names) => {
            let members: Vec<&String> =
                names.iter().filter(|n| family.member(h, &Scenario::Named(n.to_string()))).collect();
            json!(members)
        }
        Family::Binary(_) => to_value(&format::hist_spec(family, h)),
    }
}

fn clause_lines(c: &fb::InffbCertificate) -> Vec<String> {
    let mark = |h: bool| if h { "holds" } else { "fails" };
    vec![
        format!("(1) {}: {}", mark(c.clause_1.holds), c.clause_1.detail),
        format!("(2) {}: {}", mark(c.clause_2.holds), c.clause_2.detail),
        format!("(3) {}: {}", mark(c.clause_3.holds), c.clause_3.detail),
        format!("(4) {}: {}", mark(c.clause_4.holds), c.clause_4.detail),
    ]
}

fn inffb(l: &Loaded, rule: &Rule) -> Result<Output> {
    let f = need_f(rule)?;
    if symbolic(l, rule) {
        let sp = l.symbolic_points()?;
        let g = parse_rule(f)?;
        let c = fb::check_inffb(&sp, &g)?;
        if !fb::verify_inffb(&sp, &g, &c)? {
            return Err(Error::Domain("INFFB certificate fails recheck".into()));
        }
        let summary = clause_lines(&c);
        return Ok(report("inffb", l, c.verdict, json!({ "points": sp, "rule": g, "clauses": c }), summary));
    }
    let ts = l.transition_set(f)?;
    let c = fb::check_inffb_finite(&ts)?;
    let summary = clause_lines(&c);
    Ok(report("inffb", l, c.verdict, json!({ "clauses": c }), summary))
}

fn cfb(l: &Loaded, rule: &Rule) -> Result<Output> {
    let f = need_f(rule)?;
    let r = if symbolic(l, rule) {
        fb::check_cfb_symbolic(&l.symbolic_points()?, &parse_rule(f)?)
    } else {
        fb::check_cfb(&l.transition_set(f)?)
    };
    let summary = vec![
        format!("combinatorially consistent: {}", r.combinatorially_consistent),
        match &r.failed_condition {
            Some(c) => format!("failed: {c}"),
            None => format!("H_T = {}", r.h_t),
        },
    ];
    Ok(report("cfb", l, r.verdict, to_value(&r), summary))
}

fn indexed(l: &Loaded, rule: &Rule) -> Result<bool> {
    if !symbolic(l, rule) {
        return Ok(false);
    }
    match &l.doc.symbolic {
        Some(s) if s.skeleton => Err(Error::Unsupported(format!("{} has no geometry for its choice points", l.name()))),
        _ => Ok(true),
    }
}

fn epsfb(l: &Loaded, rule: &Rule, extra: &[Q]) -> Result<Output> {
    let f = need_f(rule)?;
    let r = if indexed(l, rule)? {
        fb::check_eps_fb(l.model()?, &l.indices()?, &parse_rule(f)?, extra)?
    } else {
        fb::check_eps_fb_finite(&l.transition_set(f)?)?
    };
    let mut summary = vec![r.argument.clone()];
    if let Some(p) = &r.e_star_point {
        summary.push(format!("e* = {p}"));
    }
    summary.extend(r.trace.iter().map(|c| format!("{}: empty = {}", c.radius, c.empty)));
    Ok(report("epsfb", l, r.verdict, to_value(&r), summary))
}

fn postulate_a(l: &Loaded, rule: &Rule, extra: &[Q]) -> Result<Output> {
    let f = need_f(rule)?;
    let r = if indexed(l, rule)? {
        fb::check_postulate_a(l.model()?, &l.indices()?, &parse_rule(f)?, extra)?
    } else {
        fb::check_postulate_a_finite(&l.transition_set(f)?)?
    };
    let summary = vec![
        format!("route: {}", r.route),
        format!("scope: {}", r.scope),
        format!("direct evaluation holds: {}, agrees: {}", r.direct_holds, r.direct_agrees),
    ];
    Ok(report("postulate-a", l, r.holds, to_value(&r), summary))
}

/// Checks that x_n = scale * site_n lies in exactly the histories with g(n) = rule(n).
fn lifted_geometry(l: &Loaded, points: &fb::SymbolicPoints, rule: &Label, scale: &Q) -> Result<Vec<String>> {
    let m = l.model()?;
    let sites = m.indexed_sites().ok_or_else(|| Error::Unsupported("scaled point sets need indexed sites".into()))?;
    let mut notes = Vec::new();
    for n in points.indices.first_n(8) {
        let x = sites.point(n)?.scale(scale);
        let b = rule.bit(n);
        let g = if b == 0 { Label::zeros_at([n]) } else { Label::constant(1) };
        let c = m.event_class(&x, &Scenario::Seq(g))?;
        let want = mbs_core::family::HistSet::Binary(mbs_core::family::Constraints::bit(n, b));
        if !l.family.same(&c.members, &want) {
            return Err(Error::Domain(format!("x_{n} = {x} lies in {}, not g({n}) = {b}", l.family.render(&c.members))));
        }
        notes.push(format!("x_{n} = {x}: histories g({n}) = {b}"));
    }
    Ok(notes)
}

fn postulate_b(l: &Loaded, name: &str) -> Result<Output> {
    let (r, notes) = match l.xset(name)? {
        XSet::Symbolic { points, rule, scale } => {
            let notes = match &scale {
                Some(s) => lifted_geometry(l, &points, &rule, s)?,
                None => Vec::new(),
            };
            (fb::check_postulate_b(&points, &rule)?, notes)
        }
        XSet::Finite { ids, sets } => {
            let r = fb::check_postulate_b_finite(&l.family, &sets);
            (r, vec![format!("X = {{{}}}", ids.join(", "))])
        }
    };
    let mut summary = vec![
        format!("(a) finite parts in some history: {}", r.clause_a.detail),
        format!("(b) no history holds all of X: {}", r.clause_b.detail),
    ];
    summary.extend(notes.iter().cloned());
    Ok(report("postulate-b", l, r.holds, json!({ "report": r, "geometry": notes }), summary))
}

fn locate(l: &Loaded, rule: &Rule, a_star: &Point4, extra: &[Q]) -> Result<Output> {
    let f = need_f(rule)?;
    let r = if indexed(l, rule)? {
        fb::locate_cone_boundary_indexed(l.model()?, &l.indices()?, &parse_rule(f)?, a_star, extra)?
    } else {
        fb::locate_cone_boundary(&l.transition_set(f)?, a_star)?
    };
    let mut summary = vec![r.argument.clone()];
    if let Some(x) = &r.x_star {
        summary.push(format!("x* = {x}"));
    }
    Ok(report("locate", l, format!("{:?}", r.case), to_value(&r), summary))
}

fn mingap(l: &Loaded, rule: &Rule, delta: &Q) -> Result<Output> {
    let f = need_f(rule)?;
    let r = fb::check_min_gap_no_inffb(l.model()?, &l.indices()?, &parse_rule(f)?, delta)?;
    let verdict = r.verdict.map_or("posC-fails".to_string(), |v| v.to_string());
    let mut summary = vec![format!("posC: {}", r.posc.detail), r.argument.clone()];
    if let Some(h) = &r.final_history {
        summary.push(format!("containing history: {h}"));
    }
    Ok(report("mingap", l, verdict, to_value(&r), summary))
}

fn fin2inf(l: &Loaded, rule: &Rule, history: Option<&str>) -> Result<Output> {
    let f = need_f(rule)?;
    if symbolic(l, rule) {
        let sp = l.symbolic_points()?;
        if sp.is_infinite() {
            let c = fb::inffb_passthrough(&sp, &parse_rule(f)?)?;
            let summary = vec![format!("S' = A u B: {}", c.region)];
            return Ok(report("fin2inf", l, c.verdict, to_value(&c), summary));
        }
    }
    let ts = l.transition_set(f)?;
    let r = fb::check_finfb(&ts)?;
    let Some(w) = r.witness else {
        return Ok(report("fin2inf", l, "NONE", json!({ "finfb": r }), vec!["no FINFB witness to extend".into()]));
    };
    let m = l.model()?;
    let h = match history {
        Some(h) => m.scenario(h)?,
        None => l
            .family
            .witness(&l.family.universe())
            .ok_or_else(|| Error::Domain("empty family".into()))?,
    };
    let c = fb::construct_inffb_from_finfb(m, &ts, &w, &h)?;
    let mark = |b: bool| if b { "holds" } else { "fails" };
    let summary = vec![
        format!("S' = {}", c.region),
        format!("(1) {}: {}", mark(c.clause_1.holds), c.clause_1.detail),
        format!("(2) {}: {}", mark(c.clause_2.holds), c.clause_2.detail),
        format!("(3) {}: {}", mark(c.clause_3.holds), c.clause_3.detail),
        format!("(4) {}: {}", mark(c.clause_4.holds), c.clause_4.detail),
    ];
    Ok(report("fin2inf", l, c.verdict, json!({ "witness": w, "construction": c }), summary))
}

fn loci(l: &Loaded, point: &str, jobs: usize) -> Result<Output> {
    let x = *l.index.get(point).ok_or_else(|| Error::lookup("point", point))?;
    let r = fb::cause_like_loci(&l.structure, x, jobs.max(1))?;
    let verdict = if r.finfb.is_some() {
        "FINFB"
    } else if r.loci.is_empty() {
        "empty"
    } else if r.all_below == Some(true) {
        "below"
    } else {
        "not-below"
    };
    let summary = vec![format!("C({point}) = {{{}}}", r.loci.join(", "))];
    Ok(report("loci", l, verdict, to_value(&r), summary))
}

fn chain_cmd(l: &Loaded, name: &str) -> Result<Output> {
    let r = chain_compactness_witness(l.model()?, l.chain(name)?)?;
    let (verdict, summary) = match &r {
        ChainVerdict::Witness { scenario, .. } => ("witness", vec![format!("{scenario} lies in every Sigma_h along {name}")]),
        ChainVerdict::Empty { reason, required, .. } => ("empty", vec![format!("{required} required: {reason}")]),
    };
    Ok(report("chain", l, verdict, to_value(&r), summary))
}

/// One row of an expected-verdict check.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ExpectRow {
    pub verb: String,
    pub args: Vec<String>,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

/// Runs the expected-verdict table of a document through the command line, with the model read
/// from `model_args` (e.g. `["--catalog", "m2"]` or `["path.toml"]`).
pub fn check_expectations(doc: &Document, model_args: &[String]) -> Vec<ExpectRow> {
    doc.expect
        .iter()
        .map(|e| {
            let mut argv = vec![e.verb.clone()];
            argv.extend(model_args.iter().cloned());
            argv.extend(e.args.iter().cloned());
            let o = run(&argv);
            let actual = if o.code == 0 { verdict_of(&o.stdout).unwrap_or_default() } else { format!("exit {}: {}", o.code, o.stderr.trim()) };
            ExpectRow { verb: e.verb.clone(), args: e.args.clone(), expected: e.verdict.clone(), pass: actual == e.verdict, actual }
        })
        .collect()
}

/// The verdict field of a report's JSON block.
pub fn verdict_of(stdout: &str) -> Option<String> {
    let end = stdout.find("\n\n")?;
    let v: Value = serde_json::from_str(&stdout[..end]).ok()?;
    match &v["verdict"] {
        Value::String(s) => Some(s.clone()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn expect(src: &Src) -> Result<Output> {
    let doc = document(src)?;
    let mut model_args = Vec::new();
    if let Some(p) = &src.model {
        model_args.push(p.clone());
    }
    if let Some(c) = &src.catalog {
        model_args.push("--catalog".into());
        model_args.push(c.clone());
        for p in &src.params {
            model_args.push("--param".into());
            model_args.push(p.clone());
        }
        if let Some(f) = &src.family {
            model_args.push("--family".into());
            model_args.push(f.clone());
        }
    }
    let rows = check_expectations(&doc, &model_args);
    let passed = rows.iter().filter(|r| r.pass).count();
    let verdict = if passed == rows.len() { "pass" } else { "fail" };
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "{} {} {}: expected {}, got {}",
                if r.pass { "ok  " } else { "FAIL" },
                r.verb,
                r.args.join(" "),
                r.expected,
                r.actual
            )
        })
        .collect();
    Ok(Output::Report(Report {
        verb: "expect",
        model: doc.name.clone(),
        verdict: verdict.into(),
        certificate: json!({ "rows": rows, "passed": passed, "total": rows.len() }),
        summary,
    }))
}
