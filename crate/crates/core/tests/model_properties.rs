use std::collections::{BTreeMap, BTreeSet};

use mbs_core::catalog;
use mbs_core::family::Scenario;
use mbs_core::format::Loaded;
use mbs_core::geometry::{q, Point4};
use mbs_core::histories::{chain_compactness_witness, elementary_possibilities, ChainDescriptor, ChainVerdict};
use mbs_core::model::{Decision, MbsModel};
use mbs_core::oracle::FiniteWorld;
use proptest::prelude::*;

fn random_model(seed: u64, scenarios: usize, sites: usize, grid: usize) -> Loaded {
    let p: BTreeMap<String, String> = [
        ("seed", seed.to_string()),
        ("scenarios", scenarios.to_string()),
        ("sites", sites.to_string()),
        ("grid", grid.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    catalog::generate("random", &p).unwrap().load().unwrap()
}

fn model_strategy() -> impl Strategy<Value = Loaded> {
    (any::<u64>(), 2usize..=5, 3usize..=6, 1usize..=8).prop_map(|(seed, s, c, g)| random_model(seed, s, c, g))
}

fn named(m: &MbsModel) -> Vec<Scenario> {
    m.enumerate_scenarios().unwrap()
}

fn all_sites(m: &MbsModel) -> Vec<Point4> {
    let names = m.scenario_names().unwrap();
    let mut out = Vec::new();
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            if let Some(f) = m.pair_sites(a, b) {
                out.extend(f.samples.iter().cloned());
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn same_event_and_order_laws(l in model_strategy()) {
        let m = l.model().unwrap();
        let mut ev = Vec::new();
        for p in &l.doc.points {
            for s in named(m) {
                ev.push(m.event_class(&p.at, &s).unwrap());
            }
        }
        for a in &ev {
            prop_assert!(m.same_event(a, a));
            prop_assert!(m.leq_s(a, a).unwrap());
            for b in &ev {
                prop_assert_eq!(m.same_event(a, b), m.same_event(b, a));
                if m.leq_s(a, b).unwrap() && m.leq_s(b, a).unwrap() {
                    prop_assert!(m.same_event(a, b));
                }
                for c in &ev {
                    if m.same_event(a, b) && m.same_event(b, c) {
                        prop_assert!(m.same_event(a, c));
                    }
                    if m.leq_s(a, b).unwrap() && m.leq_s(b, c).unwrap() {
                        prop_assert!(m.leq_s(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn generated_choice_points_are_all_choice_points(l in model_strategy()) {
        let m = l.model().unwrap();
        let names = m.scenario_names().unwrap().to_vec();
        let mut probes: Vec<Point4> = l.doc.points.iter().map(|p| p.at.clone()).collect();
        probes.extend(all_sites(m));
        for (i, a) in names.iter().enumerate() {
            for b in &names[i + 1..] {
                let (s, e) = (Scenario::Named(a.clone()), Scenario::Named(b.clone()));
                let gen = m.generated_choice_points(&s, &e).unwrap();
                for g in &gen {
                    prop_assert_eq!(m.is_choice_point(g, &s, &e).unwrap(), Decision::Yes);
                }
                for x in probes.iter().filter(|x| m.in_overlap(x, &s, &e).unwrap()) {
                    let ev = m.event_class(x, &s).unwrap();
                    if m.is_choice_point(&ev, &s, &e).unwrap() == Decision::Yes {
                        prop_assert!(gen.iter().any(|g| m.same_event(g, &ev)), "{} missing from generated set", x);
                    }
                }
                for c in &m.pair_sites(a, b).unwrap().samples {
                    prop_assert!(m.in_overlap(c, &s, &e).unwrap());
                }
            }
        }
    }

    #[test]
    fn elementary_possibilities_partition(l in model_strategy()) {
        let m = l.model().unwrap();
        let scen = named(m);
        for p in &l.doc.points {
            for s in &scen {
                let ev = m.event_class(&p.at, s).unwrap();
                let cells = elementary_possibilities(&ev, m).unwrap();
                let mut seen = BTreeSet::new();
                for c in &cells {
                    let members: Vec<&Scenario> = scen.iter().filter(|h| m.family.member(&c.members, h)).collect();
                    prop_assert!(!members.is_empty());
                    for h in members {
                        prop_assert!(seen.insert(h.clone()), "{} in two cells", h);
                    }
                }
                let through: BTreeSet<Scenario> = scen.iter().filter(|h| m.family.member(&ev.members, h)).cloned().collect();
                prop_assert_eq!(seen, through);
            }
        }
    }

    #[test]
    fn undividedness_is_an_equivalence(l in model_strategy()) {
        let m = l.model().unwrap();
        let scen = named(m);
        for p in &l.doc.points {
            let ev = m.event_class(&p.at, &scen[0]).unwrap();
            let through: Vec<&Scenario> = scen.iter().filter(|h| m.family.member(&ev.members, h)).collect();
            let u = |a: &Scenario, b: &Scenario| m.undivided(a, b, &ev).unwrap();
            for a in &through {
                prop_assert!(u(a, a));
                for b in &through {
                    prop_assert_eq!(u(a, b), u(b, a));
                    for c in &through {
                        if u(a, b) && u(b, c) {
                            prop_assert!(u(a, c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn histories_are_scenario_shaped(l in model_strategy()) {
        let m = l.model().unwrap();
        let names = m.scenario_names().unwrap().to_vec();
        let mut grid: Vec<Point4> = l.doc.points.iter().map(|p| p.at.clone()).collect();
        grid.push(Point4::new(q(1000, 1), q(0, 1), q(0, 1), q(0, 1)));
        let w = FiniteWorld::new(m, &names, &grid);
        let brute: BTreeSet<BTreeSet<usize>> = w.histories(12).into_iter().collect();
        let shaped: BTreeSet<BTreeSet<usize>> = (0..names.len()).map(|j| w.scenario_history(j)).collect();
        prop_assert_eq!(brute.len(), names.len());
        prop_assert_eq!(brute, shaped);
    }

    #[test]
    fn finite_families_have_chain_witnesses(l in model_strategy(), pick in any::<prop::sample::Index>()) {
        let m = l.model().unwrap();
        let names = m.scenario_names().unwrap();
        let s = pick.get(names).clone();
        let base = &l.doc.points[0].at;
        let elements = (0..4).map(|k| (base.shifted(&q(k, 1)), s.clone())).collect();
        let v = chain_compactness_witness(m, &ChainDescriptor::Finite { elements }).unwrap();
        prop_assert!(matches!(v, ChainVerdict::Witness { .. }), "{:?}", v);
    }
}

#[test]
fn equal_locations_with_distinct_classes_are_not_ordered() {
    // EPR: the two copies of a point above the left site are distinct and incomparable
    let l = catalog::generate("epr-bohm", &BTreeMap::new()).unwrap().load().unwrap();
    let m = l.model().unwrap();
    let x = Point4::new(q(1, 1), q(-1, 1), q(0, 1), q(0, 1));
    let a = m.event_class(&x, &m.scenario("pm").unwrap()).unwrap();
    let b = m.event_class(&x, &m.scenario("mp").unwrap()).unwrap();
    assert!(!m.same_event(&a, &b));
    assert!(!m.leq_s(&a, &b).unwrap());
    assert!(!m.leq_s(&b, &a).unwrap());
}
