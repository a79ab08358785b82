use std::collections::BTreeMap;

use mbs_core::catalog::{self, wrapped_geometry};
use mbs_core::family::Label;
use mbs_core::format::{parse_rule, Loaded};
use mbs_core::funny_business::{self as fb, FbKind};
use mbs_core::oracle::{brute_cfb, brute_finfb};
use mbs_core::structure::TransitionSet;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn load(name: &str, kv: &[(&str, String)]) -> Loaded {
    let p: BTreeMap<String, String> = kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    catalog::generate(name, &p).unwrap().load().unwrap()
}

fn structure(seed: u64, points: usize, outcomes: usize, histories: usize) -> Loaded {
    load(
        "random-structure",
        &[
            ("seed", seed.to_string()),
            ("points", points.to_string()),
            ("outcomes", outcomes.to_string()),
            ("histories", histories.to_string()),
        ],
    )
}

fn random_product(l: &Loaded, seed: u64) -> TransitionSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = l.transition_points();
    let choice: Vec<usize> = pts.iter().map(|&p| rng.gen_range(0..l.structure.events[p].cells.len())).collect();
    TransitionSet::product(l.structure.clone(), &pts, &choice).unwrap()
}

fn small_structures() -> impl Strategy<Value = TransitionSet> {
    (any::<u64>(), 1usize..=4, 1usize..=3, 1usize..=64, any::<u64>())
        .prop_map(|(seed, p, o, h, c)| random_product(&structure(seed, p, o, h), c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn finfb_iff_belnap_and_cfb_lemmas(ts in small_structures()) {
        let f = fb::check_finfb(&ts).unwrap();
        let b = fb::belnap_witness(&ts).unwrap();
        let c = fb::check_cfb(&ts);
        let i = fb::check_inffb_finite(&ts).unwrap();
        prop_assert_eq!(f.verdict == FbKind::FINFB, b.is_some());
        prop_assert_eq!(f.verdict == FbKind::FINFB, brute_finfb(&ts).is_some());
        prop_assert_eq!(c.verdict == FbKind::CFB, brute_cfb(&ts));
        if i.verdict == FbKind::INFFB {
            prop_assert_eq!(c.verdict, FbKind::CFB);
        }
        if c.verdict == FbKind::CFB && f.verdict == FbKind::NONE {
            prop_assert_eq!(i.verdict, FbKind::INFFB);
        }
    }

    #[test]
    fn witnesses_reverify(ts in small_structures()) {
        if let Some(w) = fb::check_finfb(&ts).unwrap().witness {
            prop_assert!(fb::verify_finfb(&ts, &w).is_ok());
            let fam = ts.family();
            let all: Vec<usize> = w.a1.iter().chain(&w.a2).copied().collect();
            prop_assert!(!fam.is_empty(&ts.meet_of(&w.a1)));
            prop_assert!(!fam.is_empty(&ts.meet_of(&w.a2)));
            prop_assert!(fam.is_empty(&ts.meet_of(&all)));
            prop_assert!(w.a1.iter().all(|&i| w.a2.iter().all(|&j| ts.slr(i, j))));
        }
        if let Some(b) = fb::belnap_witness(&ts).unwrap() {
            let fam = ts.family();
            prop_assert!(!fam.is_empty(&ts.meet_of(&b.a)));
            prop_assert!(!fam.is_empty(&ts.meet_of(&b.b)));
            let all: Vec<usize> = b.a.iter().chain(&b.b).copied().collect();
            prop_assert!(fam.is_empty(&ts.meet_of(&all)));
        }
    }

    #[test]
    fn pruning_never_changes_verdicts(seed in any::<u64>(), p in 1usize..=8, o in 1usize..=3, h in 1usize..=24, c in any::<u64>()) {
        let ts = random_product(&structure(seed, p, o, h), c);
        let pruned = fb::check_finfb(&ts).unwrap().verdict == FbKind::FINFB;
        prop_assert_eq!(pruned, fb::check_finfb_unpruned(&ts).unwrap().is_some());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn loci_lie_below_without_finfb(seed in any::<u64>()) {
        let l = structure(seed, 5, 2, 10);
        let st = &l.structure;
        let all: Vec<usize> = (0..st.len()).collect();
        let scan = fb::scan_product_functions(st, &all, 1).unwrap();
        for x in 0..st.len() {
            let r = fb::cause_like_loci(st, x, 1).unwrap();
            if scan.with_finfb == 0 {
                prop_assert!(r.finfb.is_none());
                for c in &r.loci {
                    prop_assert!(st.lt(st.index_of(c).unwrap(), x), "{} not below {}", c, st.events[x].id);
                }
            }
        }
    }

    #[test]
    fn planted_finfb_extends_to_inffb(seed in 1u64..1_000_000, h in 0usize..3) {
        let l = load("planted", &[("seed", seed.to_string())]);
        let m = l.model().unwrap();
        let ts = l.transition_set("+,+").unwrap();
        let w = fb::check_finfb(&ts).unwrap().witness.expect("planted witness");
        prop_assert!(fb::verify_finfb(&ts, &w).is_ok());
        let c = fb::construct_inffb_from_finfb(m, &ts, &w, &m.scenario(["s1", "s2", "s3"][h]).unwrap()).unwrap();
        prop_assert!(c.clause_1.holds && c.clause_2.holds && c.clause_3.holds && c.clause_4.holds, "{:?}", c);
        prop_assert_eq!(c.verdict, FbKind::INFFB);
    }

    #[test]
    fn symbolic_inffb_implies_cfb(kind in 0usize..3, zeros in prop::collection::btree_set(0u64..10, 0..4), default in 0u8..2) {
        let (family, extra) = match kind {
            0 => ("finitely-many-zeros", vec![]),
            1 => ("all-strings", vec![]),
            _ => ("at-most-k-zeros", vec![("k", "2".to_string())]),
        };
        let mut kv = vec![("family", family.to_string())];
        kv.extend(extra);
        let l = load("m2", &kv);
        let sp = l.symbolic_points().unwrap();
        let rule = Label { default, exceptions: zeros };
        let i = fb::check_inffb(&sp, &rule).unwrap();
        prop_assert!(fb::verify_inffb(&sp, &rule, &i).unwrap());
        let c = fb::check_cfb_symbolic(&sp, &rule);
        if i.verdict == FbKind::INFFB {
            prop_assert_eq!(c.verdict, FbKind::CFB);
        }
        let f = fb::check_finfb_symbolic(&sp, &rule).unwrap();
        if c.verdict == FbKind::CFB && f.verdict == FbKind::NONE {
            prop_assert_eq!(i.verdict, FbKind::INFFB);
        }
    }
}

fn eps_and_a_agree_finite(l: &Loaded, f: &str) {
    let ts = l.transition_set(f).unwrap();
    let e = fb::check_eps_fb_finite(&ts).unwrap();
    let a = fb::check_postulate_a_finite(&ts).unwrap();
    assert_eq!(e.verdict == FbKind::EPSFB, a.holds, "{} f = {f}", l.name());
}

fn eps_and_a_agree_indexed(l: &Loaded, f: &str) -> bool {
    let m = l.model().unwrap();
    let rule = parse_rule(f).unwrap();
    let idx = l.indices().unwrap();
    let e = fb::check_eps_fb(m, &idx, &rule, &[]).unwrap();
    let a = fb::check_postulate_a(m, &idx, &rule, &[]).unwrap();
    assert_eq!(e.verdict == FbKind::EPSFB, a.holds, "{} f = {f}", l.name());
    a.holds
}

#[test]
fn eps_fb_matches_postulate_a_on_catalog_models() {
    let epr = load("epr-bohm", &[]);
    for f in ["+,+", "-,-", "+,-", "-,+"] {
        eps_and_a_agree_finite(&epr, f);
    }
    for seed in 0..5 {
        let p = load("planted", &[("seed", seed.to_string())]);
        eps_and_a_agree_finite(&p, "+,+");
        eps_and_a_agree_finite(&p, "-,-");
    }
    let eps2d = load("eps2d", &[]);
    assert!(eps_and_a_agree_indexed(&eps2d, "ones[0,2..5]"));
    assert!(!eps_and_a_agree_indexed(&eps2d, "ones"));
    let wrapped = load("wrapped", &[]);
    assert!(!eps_and_a_agree_indexed(&wrapped, "zeros"));
    let lattice = load("lattice", &[]);
    assert!(!eps_and_a_agree_indexed(&lattice, "zeros"));
}

#[test]
fn wrapped_geometry_is_exact_up_to_64() {
    for n in [1, 2, 3, 5, 8, 16, 33, 64] {
        let g = wrapped_geometry(n).unwrap();
        assert!(g.on_cone && g.pairwise_slr, "n = {n}");
        if n >= 2 {
            assert!(g.gap_at_least_2, "n = {n}");
        }
    }
}

#[test]
fn every_generator_validates() {
    for e in catalog::list() {
        let l = catalog::generate(e.name, &BTreeMap::new()).unwrap().load().unwrap();
        if let Some(m) = &l.model {
            let r = m.validate().unwrap();
            assert!(r.is_valid(), "{}: {:?}", e.name, r.violations);
        }
    }
}

#[test]
fn epr_outcome_tables() {
    let l = load("epr-bohm", &[]);
    for (f, fin, cfb) in [("+,+", true, true), ("-,-", true, true), ("+,-", false, false), ("-,+", false, false)] {
        let ts = l.transition_set(f).unwrap();
        assert_eq!(fb::check_finfb(&ts).unwrap().verdict == FbKind::FINFB, fin, "{f}");
        assert_eq!(fb::check_cfb(&ts).verdict == FbKind::CFB, cfb, "{f}");
        assert_eq!(fb::check_inffb_finite(&ts).unwrap().verdict, FbKind::NONE, "{f}");
    }
}

#[test]
fn m2_scan_finds_no_finfb() {
    for n in [4, 8, 12] {
        let l = load("m2", &[("n", n.to_string())]);
        let r = fb::scan_product_functions(&l.structure, &l.transition_points(), 2).unwrap();
        assert_eq!(r.product_functions, 1 << n);
        assert_eq!(r.with_finfb, 0);
    }
    let k = load("m2", &[("family", "at-most-k-zeros".into()), ("n", "4".into()), ("k", "2".into())]);
    let r = fb::scan_product_functions(&k.structure, &k.transition_points(), 2).unwrap();
    assert!(r.with_finfb > 0);
}

#[test]
fn lattice_min_gap_certifies_no_inffb() {
    let l = load("lattice", &[]);
    let r = fb::check_min_gap_no_inffb(l.model().unwrap(), &l.indices().unwrap(), &parse_rule("zeros").unwrap(), &mbs_core::geometry::q(1, 2)).unwrap();
    assert!(r.posc.holds);
    assert_eq!(r.verdict, Some(FbKind::NONE));
    assert!(r.final_history.is_some());
    assert!(!r.chain.is_empty());
}

#[test]
fn posc_fails_on_wrapped_sites() {
    let w = load("wrapped", &[]);
    let r = fb::check_min_gap_no_inffb(w.model().unwrap(), &w.indices().unwrap(), &parse_rule("zeros").unwrap(), &mbs_core::geometry::q(1, 2)).unwrap();
    assert!(!r.posc.holds);
    assert_eq!(r.verdict, None);
}
