//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

mod oracles;
mod properties;

use std::time::{Duration, Instant};

use mealy_core::classify::{classify, normal_form, output_sets, Activity};
use mealy_core::element::{Element, IdentityVerdict, DEFAULT_IDENTITY_BUDGET};
use mealy_core::experiments::{run, ExperimentConfig, ExperimentKind, Mode};
use mealy_core::fixtures;
use mealy_core::order::{analyze, OrderBudget, OrderVerdict, Rule};
use mealy_core::sample::DEFAULT_SEED;
use mealy_core::stats::Fraction;

use oracles::{bireversible, permutations, power_fixes_all, reset_non_permutation_count, run_states};

struct Outcome {
    pass: bool,
    details: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            details: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.details
            .push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }

    fn note(&mut self, what: impl Into<String>) {
        self.details.push(format!("     {}", what.into()));
    }
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let g = classify(&fixtures::grigorchuk()).unwrap();
    o.require(
        g.invertible && !g.reversible && g.activity == Some(Activity::Polynomial(0)),
        format!(
            "grigorchuk: invertible {}, reversible {}, activity {:?}",
            g.invertible, g.reversible, g.activity
        ),
    );
    let m = classify(&fixtures::adding_machine()).unwrap();
    o.require(
        m.invertible && m.activity == Some(Activity::Polynomial(0)),
        format!("adding machine: invertible {}, activity {:?}", m.invertible, m.activity),
    );
    let f = fixtures::fig2();
    let r = classify(&f).unwrap();
    let ob: Vec<&str> = output_sets(&f)
        .get(f.state_index("b").unwrap())
        .iter()
        .map(|&y| f.letter_name(y))
        .collect();
    o.require(
        r.invertible && r.reversible && !r.bireversible && ob == ["1", "3"],
        format!(
            "fig2: invertible {}, reversible {}, bireversible {}, O_b = {{{}}}",
            r.invertible,
            r.reversible,
            r.bireversible,
            ob.join(",")
        ),
    );
    o
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let nf = normal_form(&fixtures::grigorchuk(), 1_000_000).unwrap();
    o.require(
        nf.block_length() == 3,
        format!(
            "cycle lcm {} x depth {} = {}",
            nf.cycle_lcm,
            nf.depth,
            nf.block_length()
        ),
    );
    let reference = fixtures::grigorchuk_nf3();
    let iso = nf.automaton.state_isomorphism(&reference);
    o.require(
        iso.is_some() && nf.automaton.letter_names() == reference.letter_names(),
        "isomorphic to the three-letter-block fixture",
    );
    o
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let budget = OrderBudget::default();

    let m = fixtures::adding_machine();
    let certs = analyze(&m, &budget).unwrap();
    let p = &certs[m.state_index("p").unwrap()].certificate;
    o.require(
        p.verdict == OrderVerdict::Infinite && p.rule == Some(Rule::BoundedSelfloop),
        format!("adding machine p: {:?} via {:?}", p.verdict, p.rule),
    );

    let g = fixtures::grigorchuk();
    let certs = analyze(&g, &budget).unwrap();
    for name in ["a", "b", "c", "d"] {
        let q = g.state_index(name).unwrap();
        let c = &certs[q].certificate;
        let by_rule = matches!(c.rule, Some(Rule::OrbitSignalizer | Rule::BruteForce));
        let square = Element::generator(q).pow(2).is_identity(&g, DEFAULT_IDENTITY_BUDGET);
        // oracle: g^2 fixes every word up to length 10, g does not
        let oracle = power_fixes_all(&g, q, 2, 10) && !power_fixes_all(&g, q, 1, 10);
        o.require(
            c.verdict == (OrderVerdict::Finite { order: 2 }) && by_rule && square.is_identity() && oracle,
            format!(
                "grigorchuk {name}: {:?} via {:?}, square is identity: {}",
                c.verdict,
                c.rule,
                square.is_identity()
            ),
        );
    }

    let f = fixtures::fig2();
    let certs = analyze(&f, &budget).unwrap();
    for (q, sc) in certs.iter().enumerate() {
        let c = &sc.certificate;
        let mut moved = 0;
        let mut identity = 0;
        for m in 1..=32 {
            match Element::generator(q).pow(m).is_identity(&f, DEFAULT_IDENTITY_BUDGET) {
                IdentityVerdict::Moves(w) => {
                    // confirm the witness independently
                    moved += (run_states(&f, &vec![q; m], &w) != w) as u32;
                }
                IdentityVerdict::Identity => identity += 1,
                IdentityVerdict::Inconclusive => {}
            }
        }
        o.require(
            c.verdict == OrderVerdict::Infinite
                && c.rule == Some(Rule::ReversibleNonbireversible)
                && identity == 0
                && moved == 32,
            format!(
                "fig2 {}: {:?} via {:?}, powers 1..=32 moved: {moved}/32",
                sc.state, c.verdict, c.rule
            ),
        );
    }
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    for (k, law) in [(2usize, Fraction::new(1, 2)), (3, Fraction::new(7, 9))] {
        let report = run(&ExperimentConfig::new(
            ExperimentKind::Reset,
            k,
            k,
            0,
            Mode::Exact,
            DEFAULT_SEED,
        ))
        .unwrap();
        let (hits, total) = reset_non_permutation_count(k);
        let kk = (k as u128).pow(k as u32);
        let closed = Fraction::new(kk - (1..=k as u128).product::<u128>(), kk);
        o.require(
            report.exact == Some(law)
                && closed == law
                && Fraction::new(hits as u128, total as u128) == law
                && report.trials == total,
            format!(
                "k = {k}: exact {} over {} automata, enumeration oracle {hits}/{total}, 1 - k!/k^k = {closed}",
                report.exact.map(|f| f.to_string()).unwrap_or_default(),
                report.trials
            ),
        );
    }
    o
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let report = run(&ExperimentConfig::new(
        ExperimentKind::Reset,
        8,
        8,
        50_000,
        Mode::Sampled,
        DEFAULT_SEED,
    ))
    .unwrap();
    let law = 1.0 - 40_320.0 / 8f64.powi(8);
    let weak = 1.0 - std::f64::consts::E * 8f64.sqrt() * (-8f64).exp();
    o.note(format!(
        "frequency {:.6} ({} / {}), 99% CI [{:.6}, {:.6}], seed {DEFAULT_SEED}",
        report.frequency, report.successes, report.trials, report.ci.lower, report.ci.upper
    ));
    o.require(report.ci.contains(law), format!("CI contains 1 - 8!/8^8 = {law:.6}"));
    o.require(
        report.ci.lower > weak,
        format!("CI lower edge exceeds 1 - e sqrt(8) e^-8 = {weak:.6}"),
    );
    o.require(
        report.checks.iter().all(|c| c.pass),
        "certificate agreement and soundness sweep",
    );
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let report = run(&ExperimentConfig::new(
        ExperimentKind::Bireversible,
        3,
        3,
        0,
        Mode::Exact,
        DEFAULT_SEED,
    ))
    .unwrap();
    // oracle: enumerate all (delta, rho) tables and test the definition directly
    let perms = permutations(3);
    let mut bir = 0u128;
    let mut total = 0u128;
    for d in 0..216 {
        let delta: Vec<Vec<usize>> = (0..3).map(|x| perms[(d / 6usize.pow(x)) % 6].clone()).collect();
        for r in 0..216 {
            let rho: Vec<Vec<usize>> = (0..3).map(|q| perms[(r / 6usize.pow(q)) % 6].clone()).collect();
            bir += bireversible(&delta, &rho) as u128;
            total += 1;
        }
    }
    let oracle = Fraction::new(bir, total);
    let bound = Fraction::new(1, 9).0 + Fraction::new(1, 3).0;
    o.require(
        report.exact == Some(oracle) && oracle.0 <= bound && report.trials == 46_656,
        format!(
            "(3,3) exact {} over {} automata (oracle {oracle}), bound 1/9 + 1/3 = {bound}",
            report.exact.map(|f| f.to_string()).unwrap_or_default(),
            report.trials
        ),
    );
    let sampled = run(&ExperimentConfig::new(
        ExperimentKind::Bireversible,
        5,
        8,
        10_000,
        Mode::Sampled,
        DEFAULT_SEED,
    ))
    .unwrap();
    let bound = 1.0 / 5f64.powi(7) + 1.0 / 8.0;
    o.require(
        sampled.bound_consistent && sampled.ci.lower <= bound,
        format!(
            "(5,8) sampled {:.4}, CI [{:.4}, {:.4}], bound {bound:.4}",
            sampled.frequency, sampled.ci.lower, sampled.ci.upper
        ),
    );
    o.require(sampled.checks.iter().all(|c| c.pass), "soundness sweep");
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let report = run(&ExperimentConfig::new(
        ExperimentKind::Bounded,
        3,
        2,
        5_000,
        Mode::Sampled,
        DEFAULT_SEED,
    ))
    .unwrap();
    o.require(
        report.ci.upper >= 1.0 / 3.0,
        format!(
            "certified-infinite frequency {:.4}, CI [{:.4}, {:.4}], bound 1/3",
            report.frequency, report.ci.lower, report.ci.upper
        ),
    );
    for s in &report.secondary {
        o.note(format!(
            "{}: {:.4} CI [{:.4}, {:.4}]",
            s.name, s.frequency, s.ci.lower, s.ci.upper
        ));
    }
    o.require(report.checks.iter().all(|c| c.pass), "soundness sweep");
    o
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let report = run(&ExperimentConfig::new(
        ExperimentKind::FinitaryFraction,
        3,
        2,
        0,
        Mode::Exact,
        DEFAULT_SEED,
    ))
    .unwrap();
    let injection = report.checks.iter().find(|c| c.name == "injection").unwrap();
    o.require(injection.pass, injection.detail.clone());
    // oracle: rebuild the images from raw tables and count distinct ones
    let mut images = std::collections::HashSet::new();
    let mut finitary = 0;
    for idx in 0..81usize {
        let delta: Vec<Vec<usize>> = (0..2)
            .map(|x| vec![0, (idx / 3usize.pow(2 * x)) % 3, (idx / 3usize.pow(2 * x + 1)) % 3])
            .collect();
        if !oracles::bounded_by_paths(&delta, 0).0 {
            continue;
        }
        finitary += 1;
        let t = (1..3).find(|&t| delta.iter().all(|d| d[t] == 0)).unwrap();
        for i in 0..2 {
            let mut img = delta.clone();
            img[i][t] = t;
            assert!(oracles::bounded_by_paths(&img, 0).1);
            images.insert(img);
        }
    }
    o.require(
        report.successes == finitary && images.len() == 2 * finitary as usize,
        format!(
            "{finitary} finitary skeletons, {} distinct bounded images (oracle)",
            images.len()
        ),
    );
    o.note(format!(
        "finitary / Pol(0) = {}, bound 1/(k+1)",
        report.exact.map(|f| f.to_string()).unwrap_or_default()
    ));
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    for r in properties::run_all() {
        eprintln!("  {} {:.1} s", r.name, r.seconds);
        let detail = match &r.outcome {
            Ok(()) => format!("{} ({} cases, {:.1} s)", r.name, r.cases, r.seconds),
            Err(e) => format!("{} ({} cases, {:.1} s): {e}", r.name, r.cases, r.seconds),
        };
        o.require(r.outcome.is_ok(), detail);
    }
    o
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("fixture classification", Duration::from_secs(1), criterion_1),
        (
            "normal form of the Grigorchuk automaton",
            Duration::from_secs(1),
            criterion_2,
        ),
        ("orders of fixture generators", Duration::from_secs(10), criterion_3),
        ("reset exact law", Duration::from_secs(5), criterion_4),
        ("reset sampled law at k = 8", Duration::from_secs(60), criterion_5),
        ("bireversibility bound", Duration::from_secs(120), criterion_6),
        ("bounded-activity bound", Duration::from_secs(120), criterion_7),
        ("finitary injection check", Duration::from_secs(30), criterion_8),
        ("property suites", Duration::from_secs(120), criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let mut outcome = f();
        let elapsed = started.elapsed();
        outcome.require(
            elapsed <= *limit,
            format!("{:.2} s within {} s", elapsed.as_secs_f64(), limit.as_secs()),
        );
        println!(
            "criterion {}: {} {name} ({:.2} s)",
            i + 1,
            if outcome.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for d in &outcome.details {
            println!("    {d}");
        }
        if !outcome.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
