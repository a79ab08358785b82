use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use mbs_cli::{check_expectations, run, verdict_of, Outcome};
use mbs_core::catalog;
use mbs_core::format;
use serde_json::Value;

const COMPARABLE_SITES: &str = r#"
name = "bad"
kind = "mbs"

[family]
scenarios = ["a", "b"]

[[pair]]
a = "a"
b = "b"

[pair.sites]
samples = [["0", "0", "0", "0"], ["1", "0", "0", "0"]]
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json_block(o: &Outcome) -> Value {
    let end = o.stdout.find("\n\n").expect("report has a JSON block and a summary");
    serde_json::from_str(&o.stdout[..end]).unwrap()
}

#[test]
fn epr_finfb_report_layout() {
    let o = run(&["finfb", "--catalog", "epr-bohm", "--f", "+,+"]);
    assert_eq!(o.code, 0);
    let v = json_block(&o);
    assert_eq!(v["command"], "finfb");
    assert_eq!(v["model"], "epr-bohm");
    assert_eq!(v["verdict"], "FINFB");
    assert!(o.stdout.contains("finfb on epr-bohm: FINFB"));
    assert!(o.stdout.contains("A1 = {left}"));
}

#[test]
fn validate_reports_comparable_sites_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.toml", COMPARABLE_SITES);
    let o = run(&["validate", &path]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(verdict_of(&o.stdout).unwrap(), "invalid");
    assert!(!json_block(&o)["certificate"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_files_give_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let broken = COMPARABLE_SITES.replace(r#"["1", "0", "0", "0"]"#, r#"["1/0", "0", "0", "0"]"#);
    let path = write(dir.path(), "broken.toml", &broken);
    let o = run(&["validate", &path]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("line 13, column"), "{}", o.stderr);
    let path = write(dir.path(), "syntax.toml", "name = \"x\"\nkind = \n");
    let o = run(&["validate", &path]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("line 2"), "{}", o.stderr);
}

#[test]
fn unknown_names_list_alternatives() {
    let o = run(&["finfb", "--catalog", "nope", "--f", "+"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("known: epr-bohm"), "{}", o.stderr);
    let o = run(&["finfb", "--catalog", "m2", "--param", "x=1", "--f", "zeros"]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("known: n, family, k"), "{}", o.stderr);
    let o = run(&["loci", "--catalog", "epr-bohm", "--point", "nowhere"]);
    assert_eq!(o.code, 1);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["epsfb", "--catalog", "m2", "--f", "zeros"]).code, 2);
    assert_eq!(run(&["plot", "--catalog", "wrapped"]).code, 2);
    assert_eq!(run(&["finfb", "--catalog", "epr-bohm"]).code, 1);
    assert_eq!(run(&["finfb", "--catalog", "epr-bohm", "--f", "+"]).code, 1);
    assert_eq!(run(&["frobnicate"]).code, 1);
    assert_eq!(run(&["validate"]).code, 1);
    let none = run(&["finfb", "--catalog", "epr-bohm", "--f", "+,-"]);
    assert_eq!(none.code, 0);
    assert_eq!(verdict_of(&none.stdout).unwrap(), "NONE");
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn m2_inffb_certificate() {
    let o = run(&["inffb", "--catalog", "m2", "--family", "finitely-many-zeros", "--f", "zeros"]);
    assert_eq!(o.code, 0);
    let v = json_block(&o);
    assert_eq!(v["verdict"], "INFFB");
    for c in ["clause_1", "clause_2", "clause_3", "clause_4"] {
        assert_eq!(v["certificate"]["clauses"][c]["holds"], true, "{c}");
    }
    assert!(o.stdout.contains("(4) holds"));
}

/// Re-derives a FINFB verdict from the report alone: the listed outcomes, SLR pairs and witness.
fn finfb_from_report(v: &Value) -> bool {
    let c = &v["certificate"];
    let outcomes: Vec<BTreeSet<String>> = c["transitions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["outcome"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect())
        .collect();
    let slr: BTreeSet<(u64, u64)> =
        c["slr"].as_array().unwrap().iter().map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap())).collect();
    let w = &c["report"]["witness"];
    if w.is_null() {
        return false;
    }
    let idx = |k: &str| -> Vec<u64> { w[k].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect() };
    let (a1, a2) = (idx("a1"), idx("a2"));
    let meet = |ix: &[u64]| -> BTreeSet<String> {
        let mut it = ix.iter().map(|&i| outcomes[i as usize].clone());
        let first = it.next().unwrap();
        it.fold(first, |acc, s| acc.intersection(&s).cloned().collect())
    };
    let all: Vec<u64> = a1.iter().chain(&a2).copied().collect();
    let slr_ok = a1.iter().all(|&i| a2.iter().all(|&j| slr.contains(&(i.min(j), i.max(j)))));
    slr_ok && !meet(&a1).is_empty() && !meet(&a2).is_empty() && meet(&all).is_empty()
}

#[test]
fn finfb_reports_carry_their_own_proof() {
    for f in ["+,+", "-,-", "+,-", "-,+"] {
        let o = run(&["finfb", "--catalog", "epr-bohm", "--f", f]);
        let v = json_block(&o);
        assert_eq!(finfb_from_report(&v), v["verdict"] == "FINFB", "{f}");
    }
    for n in 0..40 {
        let seed = format!("seed={n}");
        let l = catalog::generate("random-structure", &params_of(&["--param".into(), seed.clone()])).unwrap().load().unwrap();
        let f: Vec<String> = l.transition_points().iter().map(|&p| (p % l.structure.events[p].cells.len()).to_string()).collect();
        let f = f.join(",");
        let o = run(&["finfb", "--catalog", "random-structure", "--param", &seed, "--f", &f]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v = json_block(&o);
        assert_eq!(finfb_from_report(&v), v["verdict"] == "FINFB", "{seed}");
    }
}

fn entries() -> Vec<(String, Vec<String>)> {
    let mut out: Vec<(String, Vec<String>)> = catalog::list().iter().map(|e| (e.name.to_string(), Vec::new())).collect();
    out.push(("m2".into(), vec!["--family".into(), "all-strings".into()]));
    out.push(("m2".into(), vec!["--family".into(), "at-most-k-zeros".into()]));
    out.push(("imptop".into(), vec!["--family".into(), "all-strings".into()]));
    out.push(("planted".into(), vec!["--param".into(), "seed=11".into()]));
    out.push(("lw1".into(), vec!["--param".into(), "n=7".into()]));
    out
}

fn params_of(extra: &[String]) -> BTreeMap<String, String> {
    let mut p = BTreeMap::new();
    for w in extra.chunks(2) {
        match w[0].as_str() {
            "--family" => {
                p.insert("family".to_string(), w[1].clone());
            }
            _ => {
                let (k, v) = w[1].split_once('=').unwrap();
                p.insert(k.to_string(), v.to_string());
            }
        }
    }
    p
}

#[test]
fn catalog_expectations_hold_and_survive_export() {
    let dir = tempfile::tempdir().unwrap();
    for (name, extra) in entries() {
        let doc = catalog::generate(&name, &params_of(&extra)).unwrap();
        let mut via_catalog = vec!["--catalog".to_string(), name.clone()];
        via_catalog.extend(extra.iter().cloned());
        let rows = check_expectations(&doc, &via_catalog);
        for r in &rows {
            assert!(r.pass, "{name} {extra:?}: {} {:?} expected {}, got {}", r.verb, r.args, r.expected, r.actual);
        }

        let path = dir.path().join(format!("{name}-{}.toml", extra.join("-").replace('=', "_")));
        let path = path.to_string_lossy().into_owned();
        let mut gen = vec!["catalog".to_string(), "gen".into(), name.clone(), "--out".into(), path.clone()];
        gen.extend(extra.iter().cloned());
        assert_eq!(run(&gen).code, 0);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(format::parse(&text).unwrap(), doc, "{name}: document changes on export");
        let from_file = check_expectations(&doc, std::slice::from_ref(&path));
        let a: Vec<&String> = rows.iter().map(|r| &r.actual).collect();
        let b: Vec<&String> = from_file.iter().map(|r| &r.actual).collect();
        assert_eq!(a, b, "{name}: verdicts differ after export");
    }
}

#[test]
fn expect_verb_summarizes() {
    let o = run(&["expect", "--catalog", "epr-bohm"]);
    assert_eq!(o.code, 0);
    assert_eq!(verdict_of(&o.stdout).unwrap(), "pass");
}

#[test]
fn catalog_list_names_every_entry() {
    let o = run(&["catalog", "list"]);
    assert_eq!(o.code, 0);
    for e in catalog::list() {
        assert!(o.stdout.contains(e.name));
    }
}

fn attr(line: &str, name: &str) -> f64 {
    let key = format!(" {name}=\"");
    let start = line.find(&key).unwrap() + key.len();
    line[start..].split('"').next().unwrap().parse().unwrap()
}

#[test]
fn plot_lw1_marks_converge_to_an_annotated_limit() {
    let o = run(&["plot", "--catalog", "lw1"]);
    assert_eq!(o.code, 0);
    let sites: Vec<&str> = o.stdout.lines().filter(|l| l.contains(r#"class="site""#)).collect();
    assert_eq!(sites.len(), 10);
    let limit = o.stdout.lines().find(|l| l.contains(r#"class="limit""#)).expect("limit mark");
    assert!(limit.contains("lim (0, 0, 0, 0)"));
    let (lx, ly) = (attr(limit, "cx"), attr(limit, "cy"));
    // the sites sit at t = 0 on both sides of the limit
    assert!(sites.iter().all(|s| (attr(s, "cy") - ly).abs() < 1e-9));
    assert_eq!(sites.iter().filter(|s| attr(s, "cx") < lx).count(), 5);
    let n = run(&["plot", "--catalog", "lw1", "--param", "n=8"]);
    assert_eq!(n.stdout.lines().filter(|l| l.contains(r#"class="site""#)).count(), 16);
}

#[test]
fn plot_imptop_marks_and_chain() {
    let o = run(&["plot", "--catalog", "imptop"]);
    assert_eq!(o.code, 0);
    let sites: Vec<(f64, f64)> = o
        .stdout
        .lines()
        .filter(|l| l.contains(r#"class="site""#))
        .map(|l| (attr(l, "cx"), attr(l, "cy")))
        .collect();
    assert_eq!(sites.len(), 4);
    assert!(sites.iter().all(|s| (s.1 - sites[0].1).abs() < 1e-9), "marks share t = 0");
    let gaps: Vec<f64> = sites.windows(2).map(|w| w[1].0 - w[0].0).collect();
    assert!(gaps.iter().all(|g| (g - gaps[0]).abs() < 0.02 && *g > 0.0), "equally spaced in x");
    assert!(o.stdout.contains(r#"class="chain""#));
}

#[test]
fn plot_empty_model_is_axes_only_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "empty.toml", "name = \"empty\"\nkind = \"mbs\"\n\n[family]\nscenarios = [\"a\"]\n");
    let out = dir.path().join("empty.svg").to_string_lossy().into_owned();
    let o = run(&["plot", &path, "--out", &out]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.contains(r#"class="axes""#));
    for mark in ["site", "tail", "limit", "point", "cone", "chain"] {
        assert!(!svg.contains(&format!(r#"class="{mark}""#)), "{mark}");
    }
    let again = run(&["plot", &path]);
    assert_eq!(again.stdout, svg);
}
