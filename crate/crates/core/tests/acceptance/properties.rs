//! Generated-case invariants, run through a deterministic proptest runner.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering};

use mealy_core::automaton::encode_block;
use mealy_core::classify::{activity_class, cycle_structure, normal_form, Activity, ComponentKind};
use mealy_core::element::{Element, Generator, IdentityVerdict};
use mealy_core::exec::Execution;
use mealy_core::experiments::{run, trial_budget, ExperimentConfig, ExperimentKind, Mode};
use mealy_core::order::{analyze, cert_reset, orbit, orbit_signalizer, OrderBudget, OrderVerdict, Witness};
use mealy_core::sample::{
    sample_invertible_reversible, sample_reset, sample_reset_minimal, sample_skeleton, trial_rng, DegreeTarget,
    SamplerClass, SamplerSpec,
};
use mealy_core::{fixtures, MealyAutomaton};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::oracles::{bounded_by_paths, lcm, power_fixes_all, run_states, words};

pub const CASES: u32 = 1000;

pub struct PropertyResult {
    pub name: &'static str,
    pub cases: u32,
    pub outcome: Result<(), String>,
    pub seconds: f64,
}

fn check<S: Strategy>(
    name: &'static str,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> PropertyResult {
    let config = Config {
        cases: CASES,
        failure_persistence: None,
        max_global_rejects: 100_000,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    PropertyResult {
        name,
        cases: CASES,
        outcome: runner.run(&strategy, test).map_err(|e| e.to_string()),
        seconds: 0.0,
    }
}

fn statistical(name: &'static str, cases: u32, outcome: Result<(), String>) -> PropertyResult {
    PropertyResult {
        name,
        cases,
        outcome,
        seconds: 0.0,
    }
}

fn perm(k: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..k).collect::<Vec<_>>()).prop_shuffle()
}

/// Invertible automaton; with `id`, state 0 is made the identity state.
fn invertible(max_n: usize, max_k: usize, id: bool) -> BoxedStrategy<MealyAutomaton> {
    let min_n = if id { 2 } else { 1 };
    (min_n..=max_n, 1..=max_k)
        .prop_flat_map(|(n, k)| (vec(vec(0..n, n), k), vec(perm(k), n)))
        .prop_map(move |(mut delta, mut rho)| {
            if id {
                for col in delta.iter_mut() {
                    col[0] = 0;
                }
                rho[0] = (0..rho[0].len()).collect();
            }
            MealyAutomaton::from_tables(delta, rho, id.then_some(0)).unwrap()
        })
        .boxed()
}

fn any_automaton(max_n: usize, max_k: usize) -> BoxedStrategy<MealyAutomaton> {
    (1..=max_n, 1..=max_k)
        .prop_flat_map(|(n, k)| (vec(vec(0..n, n), k), vec(vec(0..k, k), n)))
        .prop_map(|(delta, rho)| MealyAutomaton::from_tables(delta, rho, None).unwrap())
        .boxed()
}

fn element(n: usize, max_len: usize, signed: bool) -> BoxedStrategy<Element> {
    vec((0..n, any::<bool>()), 0..=max_len)
        .prop_map(move |gs| {
            Element::from_generators(
                gs.into_iter()
                    .map(|(q, inv)| {
                        if inv && signed {
                            Generator::inv(q)
                        } else {
                            Generator::new(q)
                        }
                    })
                    .collect(),
            )
        })
        .boxed()
}

fn word(k: usize, max_len: usize) -> BoxedStrategy<Vec<usize>> {
    vec(0..k, 0..=max_len).boxed()
}

fn with_element_and_word(
    a: BoxedStrategy<MealyAutomaton>,
    max_len: usize,
    max_word: usize,
) -> BoxedStrategy<(MealyAutomaton, Element, Element, Vec<usize>)> {
    a.prop_flat_map(move |a| {
        let (n, k) = (a.num_states(), a.num_letters());
        (
            Just(a),
            element(n, max_len, true),
            element(n, max_len, true),
            word(k, max_word),
        )
    })
    .boxed()
}

fn dual_involution() -> PropertyResult {
    check("dual is an involution", any_automaton(4, 4), |a| {
        let d = a.dual();
        prop_assert_eq!((d.num_states(), d.num_letters()), (a.num_letters(), a.num_states()));
        prop_assert_eq!(d.dual(), a);
        Ok(())
    })
}

fn inverse_involution() -> PropertyResult {
    let s = invertible(4, 4, false).prop_flat_map(|a| {
        let k = a.num_letters();
        (Just(a), word(k, 6))
    });
    check("inverse is an involution", s, |(a, w)| {
        let inv = a.inverse().unwrap();
        prop_assert_eq!(inv.inverse().unwrap(), a.clone());
        for q in 0..a.num_states() {
            let image = Element::generator(q).act(&a, &w).unwrap();
            prop_assert_eq!(Element::generator(q).act(&inv, &image).unwrap(), w.clone());
        }
        Ok(())
    })
}

fn act_composition() -> PropertyResult {
    check(
        "act respects products and inverses",
        with_element_and_word(invertible(4, 3, false), 4, 6),
        |(a, u, v, s)| {
            let us = u.act(&a, &s).unwrap();
            prop_assert_eq!(u.then(&v).act(&a, &s).unwrap(), v.act(&a, &us).unwrap());
            prop_assert_eq!(u.inverse().act(&a, &us).unwrap(), s.clone());
            prop_assert_eq!(us.len(), s.len());
            Ok(())
        },
    )
}

fn act_prefixes() -> PropertyResult {
    check(
        "act preserves prefixes",
        with_element_and_word(invertible(4, 3, false), 4, 8),
        |(a, u, _, s)| {
            let full = u.act(&a, &s).unwrap();
            for i in 0..=s.len() {
                prop_assert_eq!(&full[..i], &u.act(&a, &s[..i]).unwrap()[..]);
            }
            Ok(())
        },
    )
}

fn wop_action() -> PropertyResult {
    let s = any_automaton(3, 3).prop_flat_map(|a| {
        let k = a.num_letters();
        (Just(a), 1..=3usize).prop_flat_map(move |(a, l)| (Just(a), Just(l), vec(vec(0..k, l), 0..=3)))
    });
    check("wop preserves the action", s, |(a, l, blocks)| {
        let w = a.wop(l, 1_000_000).unwrap();
        let k = a.num_letters();
        let flat: Vec<usize> = blocks.concat();
        let encoded: Vec<usize> = blocks.iter().map(|b| encode_block(b, k)).collect();
        for q in 0..a.num_states() {
            let direct = run_states(&a, &[q], &flat);
            let grouped = run_states(&w, &[q], &encoded);
            let expected: Vec<usize> = direct.chunks(l).map(|c| encode_block(c, k)).collect();
            prop_assert_eq!(grouped, expected);
        }
        Ok(())
    })
}

fn wreath_identity() -> PropertyResult {
    check(
        "wreath recursion reproduces the action",
        with_element_and_word(invertible(4, 3, false), 4, 6).prop_filter("nonempty word", |t| !t.3.is_empty()),
        |(a, u, _, s)| {
            let wr = u.wreath_recursion(&a);
            let x = s[0];
            let mut expected = vec![wr.root_permutation[x]];
            expected.extend(wr.sections[x].act(&a, &s[1..]).unwrap());
            prop_assert_eq!(u.act(&a, &s).unwrap(), expected);
            Ok(())
        },
    )
}

fn identity_vs_exhaustive() -> PropertyResult {
    check(
        "identity test agrees with exhaustive action",
        with_element_and_word(invertible(3, 2, false), 5, 0),
        |(a, u, v, _)| {
            // u v u^-1 is often trivial when u, v come from small automata
            let g = u.then(&v).then(&u.inverse()).then(&v.inverse());
            let k = a.num_letters();
            match g.is_identity(&a, 100_000) {
                IdentityVerdict::Identity => {
                    for l in 0..=7 {
                        for w in words(k, l) {
                            prop_assert_eq!(g.act(&a, &w).unwrap(), w);
                        }
                    }
                }
                IdentityVerdict::Moves(w) => {
                    prop_assert_ne!(g.act(&a, &w).unwrap(), w.clone());
                    if w.len() <= 7 {
                        for l in 0..w.len() {
                            for x in words(k, l) {
                                prop_assert_eq!(g.act(&a, &x).unwrap(), x, "shorter word moved");
                            }
                        }
                    }
                }
                IdentityVerdict::Inconclusive => {}
            }
            Ok(())
        },
    )
}

fn orbit_divisibility() -> PropertyResult {
    let budget = OrderBudget::default();
    let s = invertible(4, 3, false).prop_flat_map(|a| {
        let (n, k) = (a.num_states(), a.num_letters());
        (Just(a), element(n, 3, true), word(k, 5), 0..k)
    });
    check(
        "orbit of a prefix divides orbit of an extension",
        s,
        move |(a, t, x, y)| {
            let short = orbit(&a, &t, &x, &budget).unwrap();
            let mut longer = x.clone();
            longer.push(y);
            let long = orbit(&a, &t, &longer, &budget).unwrap();
            prop_assert_eq!(long % short, 0, "{} does not divide {}", short, long);
            Ok(())
        },
    )
}

fn certificate_soundness() -> PropertyResult {
    let budget = trial_budget();
    let s = prop_oneof![invertible(4, 3, true), invertible(3, 3, false)];
    check("certificates are sound", s, move |a| {
        for (q, sc) in analyze(&a, &budget).unwrap().iter().enumerate() {
            let t = Element::generator(q);
            match sc.certificate.verdict {
                OrderVerdict::Infinite => {
                    for m in 1..=32 {
                        prop_assert_ne!(
                            t.pow(m).is_identity(&a, 2_000),
                            IdentityVerdict::Identity,
                            "state {} certified infinite by {:?} but has order dividing {}",
                            q,
                            sc.certificate.rule,
                            m
                        );
                    }
                }
                OrderVerdict::Finite { order } => {
                    let m = order as usize;
                    prop_assert!(power_fixes_all(&a, q, m, 5));
                    for l in 0..=3 {
                        for x in words(a.num_letters(), l) {
                            let o = orbit(&a, &t, &x, &OrderBudget::default()).unwrap();
                            prop_assert_eq!(order % o, 0);
                        }
                    }
                }
                OrderVerdict::Inconclusive => {}
            }
        }
        Ok(())
    })
}

fn reset_witness() -> PropertyResult {
    let s = (2..=4usize).prop_flat_map(|k| vec(perm(k), k));
    check("reset witness words shift under powers", s, |rows| {
        let k = rows.len();
        let names: Vec<String> = (0..k).map(|x| x.to_string()).collect();
        let delta = (0..k).map(|x| vec![x; k]).collect();
        let a = MealyAutomaton::new(names.clone(), names, delta, rows, None).unwrap();
        let cert = cert_reset(&a).unwrap();
        let Witness::ResetPi { x0, cycle, .. } = cert.witness else {
            return Ok(());
        };
        let l = cycle.len();
        for alpha in 1..=4 {
            let mut w = vec![x0];
            for _ in 0..alpha {
                w.extend_from_slice(&cycle);
            }
            for i in 0..=alpha {
                let mut tail = vec![x0];
                for _ in 0..alpha - i {
                    tail.extend_from_slice(&cycle);
                }
                for q in 0..k {
                    let image = run_states(&a, &vec![q; l * i], &w);
                    prop_assert!(image.ends_with(&tail), "q{} alpha {} i {}", q, alpha, i);
                }
            }
        }
        Ok(())
    })
}

fn brute_orbit(a: &MealyAutomaton, t: &Element, x: &[usize]) -> u64 {
    let mut y = t.act(a, x).unwrap();
    let mut count = 1;
    while y != x {
        y = t.act(a, &y).unwrap();
        count += 1;
    }
    count
}

fn signalizer_consistency() -> PropertyResult {
    let budget = OrderBudget {
        signalizer_vertices: 2_000,
        ..trial_budget()
    };
    let s = invertible(3, 3, false).prop_flat_map(|a| {
        let n = a.num_states();
        (Just(a), element(n, 2, true))
    });
    let completed = AtomicU32::new(0);
    let counter = &completed;
    let mut result = check("signalizer level orders match orbits", s, move |(a, t)| {
        let sig = orbit_signalizer(&a, &t, &budget).unwrap();
        if !sig.complete {
            return Ok(());
        }
        counter.fetch_add(1, Ordering::Relaxed);
        for l in 0..=4 {
            let expected = words(a.num_letters(), l)
                .iter()
                .fold(1, |acc, x| lcm(acc, brute_orbit(&a, &t, x)));
            prop_assert_eq!(sig.level_order(l), expected, "depth {}", l);
        }
        Ok(())
    });
    // the property is vacuous on truncated signalizers
    let completed = completed.into_inner();
    if result.outcome.is_ok() && completed < CASES / 4 {
        result.outcome = Err(format!("only {completed} complete signalizers"));
    }
    result
}

fn signalizer_fixtures() -> PropertyResult {
    let mut outcome = Ok(());
    let cases = [
        (fixtures::grigorchuk(), vec!["a", "b", "c", "d", "a b", "a c a d"]),
        (fixtures::adding_machine(), vec!["p", "p p^-1 p"]),
    ];
    let mut count = 0;
    'all: for (a, elems) in &cases {
        for e in elems {
            let t = Element::parse(a, e).unwrap();
            let sig = orbit_signalizer(a, &t, &OrderBudget::default()).unwrap();
            for l in 0..=5 {
                count += 1;
                let expected = words(a.num_letters(), l)
                    .iter()
                    .fold(1, |acc, x| lcm(acc, brute_orbit(a, &t, x)));
                if sig.level_order(l) != expected {
                    outcome = Err(format!("{e} at depth {l}: {} vs {expected}", sig.level_order(l)));
                    break 'all;
                }
            }
        }
    }
    statistical("signalizer level orders on fixtures", count, outcome)
}

fn sampler_determinism() -> PropertyResult {
    let class = prop_oneof![
        Just(SamplerClass::InvertibleReversible),
        Just(SamplerClass::ResetUnfolded),
        Just(SamplerClass::ResetMinimal),
        Just(SamplerClass::Pol(DegreeTarget::at_most(0))),
        Just(SamplerClass::Pol(DegreeTarget::exactly(0))),
        Just(SamplerClass::Pol0Conditional),
    ];
    let s = (class, 2..=4usize, 2..=4usize, any::<u64>(), 0..1_000_000u64);
    check(
        "samplers are deterministic and in class",
        s,
        |(class, n, k, seed, trial)| {
            let spec = SamplerSpec {
                max_rejects: 100_000,
                ..SamplerSpec::new(class, n, k, seed).with_trial(trial)
            };
            let a = spec.sample().unwrap();
            prop_assert_eq!(&spec.sample().unwrap(), &a);
            prop_assert!(a.is_invertible());
            match class {
                SamplerClass::InvertibleReversible => prop_assert!(a.is_reversible()),
                SamplerClass::ResetUnfolded | SamplerClass::ResetMinimal => {
                    prop_assert!((0..k).all(|x| a.delta_table()[x].iter().all(|&q| q == x)));
                    if class == SamplerClass::ResetMinimal {
                        let rows = a.rho_table();
                        prop_assert!((0..k).all(|p| (p + 1..k).all(|q| rows[p] != rows[q])));
                    }
                }
                SamplerClass::Pol(target) => prop_assert!(target.accepts(activity_class(&a).unwrap())),
                SamplerClass::Pol0Conditional => {
                    prop_assert_eq!(activity_class(&a).unwrap(), Activity::Polynomial(0))
                }
            }
            Ok(())
        },
    )
}

fn activity_vs_paths() -> PropertyResult {
    let s = (2..=4usize, 1..=3usize).prop_flat_map(|(n, k)| vec(vec(0..n, n), k));
    check("activity class matches path growth", s, |mut delta| {
        for col in delta.iter_mut() {
            col[0] = 0;
        }
        let n = delta[0].len();
        let k = delta.len();
        let a = MealyAutomaton::from_tables(delta.clone(), vec![(0..k).collect(); n], Some(0)).unwrap();
        let (finitary, bounded) = bounded_by_paths(&delta, 0);
        let act = activity_class(&a).unwrap();
        prop_assert_eq!(act == Activity::Finitary, finitary, "{:?}", delta);
        prop_assert_eq!(act == Activity::Polynomial(0), bounded, "{:?}", delta);
        Ok(())
    })
}

fn normal_form_shape() -> PropertyResult {
    let s = invertible(4, 2, true).prop_filter("polynomial", |a| activity_class(a).unwrap().is_polynomial());
    check("normal form is a wop with only self-loop cycles", s, |a| {
        let nf = normal_form(&a, 1_000_000).unwrap();
        prop_assert_eq!(&nf.automaton, &a.wop(nf.block_length(), 1_000_000).unwrap());
        let cs = cycle_structure(&nf.automaton).unwrap();
        for c in &cs.components {
            if c.kind != ComponentKind::Trivial {
                prop_assert_eq!(c.states.len(), 1);
            }
        }
        prop_assert_eq!(activity_class(&nf.automaton).unwrap(), activity_class(&a).unwrap());
        Ok(())
    })
}

fn chi_square(counts: &[u64], expected: f64) -> f64 {
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    ChiSquared::new((counts.len() - 1) as f64).unwrap().sf(stat)
}

fn uniform(name: &'static str, counts: HashMap<Vec<usize>, u64>, classes: usize, draws: u64) -> PropertyResult {
    let mut c: Vec<u64> = counts.values().copied().collect();
    c.resize(classes, 0);
    let p = chi_square(&c, draws as f64 / classes as f64);
    let outcome = if counts.len() == classes && p > 0.001 {
        Ok(())
    } else {
        Err(format!("{} classes seen, p = {p:.2e}", counts.len()))
    };
    statistical(name, draws as u32, outcome)
}

fn delta_uniformity() -> PropertyResult {
    let mut counts = HashMap::new();
    for t in 0..6_000 {
        let a = sample_invertible_reversible(3, 2, &mut trial_rng(0xC0FFEE, t)).unwrap();
        *counts.entry(a.delta_table()[0].clone()).or_insert(0) += 1;
    }
    uniform("transition permutations uniform at (3,2)", counts, 6, 6_000)
}

fn shuffle_uniformity() -> PropertyResult {
    let mut counts = HashMap::new();
    let mut rng = trial_rng(0xBEEF, 0);
    for _ in 0..24_000 {
        let mut p = vec![0, 1, 2, 3];
        p.shuffle(&mut rng);
        *counts.entry(p).or_insert(0) += 1;
    }
    uniform("shuffle uniform on 4 elements", counts, 24, 24_000)
}

fn reset_uniformity() -> PropertyResult {
    let mut counts = HashMap::new();
    for t in 0..4_000 {
        let a = sample_reset(2, &mut trial_rng(0xFACE, t)).unwrap();
        *counts.entry(a.rho_table().concat()).or_insert(0) += 1;
    }
    uniform("reset automata uniform at k = 2", counts, 4, 4_000)
}

/// Acceptance frequency inside the 99.9% normal band around `p`.
fn rate_matches(accepted: u64, draws: u64, p: f64) -> Result<(), String> {
    let sd = (p * (1.0 - p) / draws as f64).sqrt();
    let f = accepted as f64 / draws as f64;
    if (f - p).abs() <= 3.3 * sd {
        Ok(())
    } else {
        Err(format!("rate {f:.4}, expected {p:.4}"))
    }
}

fn reset_minimal_rates() -> PropertyResult {
    let draws = 4_000u64;
    let mut outcome = Ok(());
    for (k, p) in [(2usize, 0.5), (3, 120.0 / 216.0)] {
        // count rejections by drawing single candidates
        let accepted = (0..draws)
            .filter(|&t| sample_reset_minimal(k, &mut trial_rng(0xABC, t), 0).is_ok())
            .count() as u64;
        outcome = outcome.and(rate_matches(accepted, draws, p).map_err(|e| format!("k = {k}: {e}")));
    }
    statistical("reset-minimal acceptance rates", 2 * draws as u32, outcome)
}

fn pol_rate() -> PropertyResult {
    // exhaustive count of degree-0 skeletons at (3,2) by path growth
    let mut qualifying = 0;
    for idx in 0..81u32 {
        let mut digits = idx;
        let delta: Vec<Vec<usize>> = (0..2)
            .map(|_| {
                let mut col = vec![0];
                for _ in 1..3 {
                    col.push((digits % 3) as usize);
                    digits /= 3;
                }
                col
            })
            .collect();
        qualifying += bounded_by_paths(&delta, 0).1 as u32;
    }
    let p = qualifying as f64 / 81.0;
    let draws = 6_000u64;
    let accepted = (0..draws)
        .filter(|&t| {
            let s = sample_skeleton(3, 2, &mut trial_rng(0xD0D0, t)).unwrap();
            DegreeTarget::exactly(0).accepts(activity_class(&s).unwrap())
        })
        .count() as u64;
    statistical(
        "Pol(0) acceptance rate at (3,2) matches enumeration",
        draws as u32,
        rate_matches(accepted, draws, p).map_err(|e| format!("{e} ({qualifying}/81)")),
    )
}

fn schedule_independence() -> PropertyResult {
    let mut outcome = Ok(());
    for kind in [
        ExperimentKind::Bireversible,
        ExperimentKind::Reset,
        ExperimentKind::Bounded,
    ] {
        let config = ExperimentConfig::new(kind, 3, 3, 300, Mode::Sampled, 17);
        let par = run(&config.clone().with_execution(Execution::Parallel)).unwrap();
        let seq = run(&config.with_execution(Execution::Sequential)).unwrap();
        if par.records != seq.records {
            outcome = Err(format!("{} differs across schedules", kind.name()));
        }
    }
    statistical("trial records independent of scheduling", 900, outcome)
}

pub fn run_all() -> Vec<PropertyResult> {
    let suites: [fn() -> PropertyResult; 21] = [
        dual_involution,
        inverse_involution,
        act_composition,
        act_prefixes,
        wop_action,
        wreath_identity,
        identity_vs_exhaustive,
        orbit_divisibility,
        certificate_soundness,
        reset_witness,
        signalizer_consistency,
        signalizer_fixtures,
        activity_vs_paths,
        normal_form_shape,
        sampler_determinism,
        delta_uniformity,
        shuffle_uniformity,
        reset_uniformity,
        reset_minimal_rates,
        pol_rate,
        schedule_independence,
    ];
    suites
        .iter()
        .map(|suite| {
            let started = std::time::Instant::now();
            let mut r = suite();
            r.seconds = started.elapsed().as_secs_f64();
            r
        })
        .collect()
}
