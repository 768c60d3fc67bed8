//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured numbers. Run with `--nocapture` to see them.

use boxlogic::derivation::{check_derivation, Derivation};
use boxlogic::filter::{build_closure, consistency_report, in_fk, stabilize};
use boxlogic::formula::{parse, Formula, Mover};
use boxlogic::game::extract_defender_strategy;
use boxlogic::game::{certify_play, monotonicity_cert, Arena, Strategy, Term};
use boxlogic::interp::{consistency_transfer_auto, weak_interpret_auto, TheoryPair};
use boxlogic::proofterm::compile;
use boxlogic::random::{
    dominating_strategy, random_derivation, random_formula, random_strategy, rng,
};
use boxlogic::sequent::{check_tree, prove_formula, LogicVariant, ProveResult};
use boxlogic::theory::{parse_theory_file, Theory, Variant};
use rand::Rng;
use std::collections::HashMap;

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn sample_theories(variant: Variant) -> Vec<(&'static str, Theory)> {
    vec![
        ("p1 := ~[]p1", Theory::new(variant, vec![(1, f("~[]p1"))])),
        ("p1 := []~p1", Theory::new(variant, vec![(1, f("[]~p1"))])),
        (
            "p1 := []p2, p2 := ~[]p1",
            Theory::new(variant, vec![(1, f("[]p2")), (2, f("~[]p1"))]),
        ),
    ]
}

fn seeds_for(theory: &Theory) -> Vec<Formula> {
    let mut seeds: Vec<Formula> = theory
        .defining_axioms
        .iter()
        .map(|(i, _)| Formula::var(*i))
        .collect();
    seeds.push(Formula::boxed_n(10, Formula::Bottom));
    seeds
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_1_filter_consistency() {
    let mut reports = 0;
    for variant in [Variant::Standard, Variant::Strengthened] {
        for (name, theory) in sample_theories(variant) {
            assert!(theory.validate().is_empty(), "{name}");
            let closure = build_closure(&theory, &seeds_for(&theory)).unwrap();
            let trace = stabilize(&theory, &closure, closure.default_max_stages()).unwrap();

            assert_eq!(
                trace.entry_stage(&Formula::Bottom),
                Some(Some(1)),
                "{name}: bot enters at stage 1"
            );
            for k in 0..=10u32 {
                assert_eq!(
                    trace.entry_stage(&Formula::boxed_n(k, Formula::Bottom)),
                    Some(Some(k as usize + 1)),
                    "{name} ({variant}): entry of []^{k} bot"
                );
            }

            let report = consistency_report(&theory, &closure, &trace).unwrap();
            assert!(report.passed, "{name} ({variant}): {:?}", report.violations);
            assert!(report.bottom_in_filter);
            reports += 1;
        }
    }
    println!(
        "criterion 1 PASS: filter consistency on {reports} theory/variant combinations, \
         bot at stage 1, []^k bot at stage k+1 for k <= 10, no axiom instance in F"
    );
}

// ---------------------------------------------------------------------------

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn criterion_2_liar_certificates() {
    let theory = parse_theory_file(&fixture("liar_box.thy")).unwrap();
    let cases = [
        ("weakfalse.drv", "p1 -> []bot"),
        ("negfalse.drv", "~p1 -> bot"),
        ("boxbotfalse.drv", "([]bot -> bot) -> bot"),
    ];
    let mut mutations_rejected = 0;
    for (file, conclusion) in cases {
        let derivation: Derivation = serde_json::from_str(&fixture(file)).unwrap();
        check_derivation(&theory, &derivation).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(derivation.conclusion(), Some(&f(conclusion)), "{file}");

        // single-line mutations must be rejected
        for line in 0..derivation.lines.len() {
            let mut mutated = derivation.clone();
            mutated.lines[line].formula = f("p1 & p1");
            assert!(
                check_derivation(&theory, &mutated).is_err(),
                "{file}: formula mutation on line {} was accepted",
                line + 1
            );
            mutations_rejected += 1;
        }
    }
    println!(
        "criterion 2 PASS: three liar-analysis certificates check; \
         {mutations_rejected} single-line mutations all rejected"
    );
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_3_soundness_bridge() {
    let mut checked = 0;
    for (name, theory) in sample_theories(Variant::Standard) {
        let mut r = rng(0xB0B);
        for round in 0..500u32 {
            let steps = 2 + (round % 11);
            let derivation = random_derivation(&mut r, &theory, steps);
            check_derivation(&theory, &derivation)
                .unwrap_or_else(|e| panic!("{name} round {round}: {e}"));
            let conclusion = derivation.conclusion().unwrap().clone();
            let closure = build_closure(&theory, std::slice::from_ref(&conclusion)).unwrap();
            let trace = stabilize(&theory, &closure, closure.default_max_stages()).unwrap();
            assert_eq!(
                trace.entry_stage(&conclusion),
                Some(None),
                "{name} round {round}: checked conclusion `{conclusion}` entered the filter"
            );
            checked += 1;
        }
    }
    println!(
        "criterion 3 PASS: {checked} random checked derivations; \
         every conclusion stays outside the filter"
    );
}

// ---------------------------------------------------------------------------

fn truth_table_tautology(formula: &Formula) -> bool {
    fn eval(f: &Formula, assignment: &HashMap<u32, bool>) -> bool {
        match f {
            Formula::Bottom => false,
            Formula::Var(i) => assignment[i],
            Formula::And(a, b) => eval(a, assignment) && eval(b, assignment),
            Formula::Or(a, b) => eval(a, assignment) || eval(b, assignment),
            Formula::Imp(a, b) => !eval(a, assignment) || eval(b, assignment),
            Formula::Boxed(_) => unreachable!("box-free corpus"),
        }
    }
    let vars = formula.variables();
    let n = vars.len();
    (0..(1u32 << n)).all(|bits| {
        let assignment: HashMap<u32, bool> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, bits & (1 << i) != 0))
            .collect();
        eval(formula, &assignment)
    })
}

#[test]
fn criterion_4_prover_separations() {
    // ex falso separates minimal from intuitionistic
    let efq = f("bot -> p1");
    assert!(matches!(
        prove_formula(&efq, LogicVariant::Minimal).unwrap(),
        ProveResult::Unprovable
    ));
    assert!(prove_formula(&efq, LogicVariant::Intuitionistic)
        .unwrap()
        .is_proved());

    // Peirce's law is provable only classically
    let peirce = f("((p1 -> p2) -> p1) -> p1");
    assert!(matches!(
        prove_formula(&peirce, LogicVariant::Minimal).unwrap(),
        ProveResult::Unprovable
    ));
    assert!(matches!(
        prove_formula(&peirce, LogicVariant::Intuitionistic).unwrap(),
        ProveResult::Unprovable
    ));
    assert!(prove_formula(&peirce, LogicVariant::Classical)
        .unwrap()
        .is_proved());

    // classical verdicts agree exactly with the truth-table oracle
    let mut r = rng(0x7AB1E);
    let mut provable = 0;
    for round in 0..200 {
        let formula = random_formula(&mut r, 7, 3, false);
        let verdict = prove_formula(&formula, LogicVariant::Classical).unwrap();
        if let ProveResult::Proved(tree) = &verdict {
            check_tree(tree, LogicVariant::Classical).unwrap();
        }
        let tautology = truth_table_tautology(&formula);
        assert_eq!(
            verdict.is_proved(),
            tautology,
            "round {round}: `{formula}` prover vs truth table"
        );
        // the hierarchy: minimal implies intuitionistic implies classical
        let min = prove_formula(&formula, LogicVariant::Minimal)
            .unwrap()
            .is_proved();
        let int = prove_formula(&formula, LogicVariant::Intuitionistic)
            .unwrap()
            .is_proved();
        assert!(
            !min || int,
            "round {round}: minimal not within intuitionistic"
        );
        assert!(
            !int || tautology,
            "round {round}: intuitionistic not within classical"
        );
        if tautology {
            provable += 1;
        }
    }
    println!(
        "criterion 4 PASS: separations hold; classical verdicts match the \
         truth-table oracle on 200 random formulas ({provable} tautologies)"
    );
}

// ---------------------------------------------------------------------------

// Minimal theorems whose extracted strategies live inside the term
// language: every implication hypothesis is applied to material that
// appears to its left in the schedule.
fn theorem_corpus() -> Vec<Formula> {
    [
        "p1 -> p1",
        "bot -> bot",
        "p1 -> p2 -> p1",
        "p1 -> p2 -> p2",
        "p1 & p2 -> p1",
        "p1 & p2 -> p2",
        "p1 -> p2 -> p1 & p2",
        "p1 & p2 -> p2 & p1",
        "p1 & p2 & p3 -> p2",
        "p1 & p2 & p3 -> p3 & p1",
        "p1 -> p1 | p2",
        "p2 -> p1 | p2",
        "p1 | p2 -> p2 | p1",
        "p1 -> p1 | p2 | p3",
        "p1 & p2 -> p1 | p2",
        "(p1 | p2) & p3 -> p1 & p3 | p2 & p3",
        "p1 & p3 | p2 & p3 -> (p1 | p2) & p3",
        "p1 & (p2 | p3) -> p1 & p2 | p1 & p3",
        "p1 & p2 | p1 & p3 -> p1 & (p2 | p3)",
        "p1 | p1 -> p1",
        "p1 -> p1 & p1",
        "p1 & (p1 -> p2) -> p2",
        "p1 & (p1 -> p2) -> p1 & p2",
        "p1 & (p1 -> p2) & (p2 -> p3) -> p3",
        "p1 & (p1 -> bot) -> bot",
        "p1 & ~p1 -> ~p2",
        "(p1 | p2) & ~p1 & ~p2 -> bot",
        "p1 & (p1 -> p2) -> p2 | p3",
        "p2 & (p2 -> p1 & p3) -> p3",
        "p1 & p2 & (p1 -> p2 -> p3) -> p3",
        "bot -> bot | p1",
        "bot & p1 -> p1 & bot",
        "p1 | bot -> bot | p1",
        "p1 & (p2 & (p2 -> p3)) -> p1 & p3",
        "(p1 -> p2) -> p3 -> p3",
    ]
    .iter()
    .map(|s| f(s))
    .collect()
}

fn constant_attacker(arena: &Arena, values: &[u32]) -> Strategy {
    Strategy {
        terms: arena
            .slots_of(Mover::Attacker)
            .into_iter()
            .zip(values)
            .map(|(s, v)| (s, Term::constant(*v)))
            .collect(),
    }
}

#[test]
fn criterion_5_defender_wins() {
    let corpus = theorem_corpus();
    assert!(corpus.len() >= 30, "corpus has {} theorems", corpus.len());
    let mut plays = 0u32;
    for theorem in &corpus {
        let ProveResult::Proved(tree) = prove_formula(theorem, LogicVariant::Minimal).unwrap()
        else {
            panic!("`{theorem}` should be minimally provable");
        };
        check_tree(&tree, LogicVariant::Minimal).unwrap();
        let extracted = extract_defender_strategy(&tree, LogicVariant::Minimal)
            .unwrap_or_else(|e| panic!("`{theorem}`: {e}"));
        let attacker_slots = extracted.arena.slots_of(Mover::Attacker).len();

        // exhaustive constant attackers with k <= 3 on up to 4 slots
        if attacker_slots <= 4 {
            let combos = 4u32.pow(attacker_slots as u32);
            for combo in 0..combos {
                let values: Vec<u32> = (0..attacker_slots)
                    .map(|i| (combo / 4u32.pow(i as u32)) % 4)
                    .collect();
                let attacker = constant_attacker(&extracted.arena, &values);
                let result = extracted.play_against(&attacker).unwrap();
                assert!(
                    certify_play(&result, LogicVariant::Minimal, None).unwrap(),
                    "`{theorem}` vs constants {values:?}"
                );
                plays += 1;
            }
        }

        // 100 seeded random term strategies
        let mut r = rng(0xD1CE ^ theorem.atom_count() as u64);
        for round in 0..100 {
            let attacker = random_strategy(&mut r, &extracted.arena, Mover::Attacker, 3);
            let result = extracted.play_against(&attacker).unwrap();
            assert!(
                certify_play(&result, LogicVariant::Minimal, None).unwrap(),
                "`{theorem}` vs random attacker {round}"
            );
            plays += 1;
        }
    }
    println!(
        "criterion 5 PASS: extracted defender certified on {} theorems over {plays} plays \
         (exhaustive constants k <= 3 plus 100 random strategies each)",
        corpus.len()
    );
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_6_strategy_monotonicity() {
    let corpus = theorem_corpus();
    let theory = Theory::empty(Variant::Standard);
    let mut r = rng(0x300D);

    // 50 defender pairs S <= S' against fixed constant attackers
    for round in 0..50 {
        let subject = &corpus[round % corpus.len()];
        let arena = Arena::for_formula(subject);
        let small = random_strategy(&mut r, &arena, Mover::Defender, 3);
        let large = dominating_strategy(&mut r, &small, 3);
        let attacker = Strategy::constant(&arena, Mover::Attacker, r.gen_range(0..4));
        let u = boxlogic::game::play(&arena, &small, &attacker).unwrap();
        let v = boxlogic::game::play(&arena, &large, &attacker).unwrap();
        let cert = monotonicity_cert(subject, &u.transcript, &v.transcript)
            .unwrap_or_else(|e| panic!("defender pair {round}: {e}"));
        assert_eq!(
            cert.conclusion,
            Formula::imp(u.boxed.clone(), v.boxed.clone())
        );
        let d = compile(&cert, &[]).unwrap();
        check_derivation(&theory, &d).unwrap_or_else(|e| panic!("defender pair {round}: {e}"));
    }

    // 50 attacker pairs T <= T', reverse implication
    for round in 0..50 {
        let subject = &corpus[(round * 7 + 3) % corpus.len()];
        let arena = Arena::for_formula(subject);
        let small = random_strategy(&mut r, &arena, Mover::Attacker, 3);
        let large = dominating_strategy(&mut r, &small, 3);
        let defender = Strategy::constant(&arena, Mover::Defender, r.gen_range(0..4));
        let u = boxlogic::game::play(&arena, &defender, &small).unwrap();
        let v = boxlogic::game::play(&arena, &defender, &large).unwrap();
        let cert = monotonicity_cert(subject, &v.transcript, &u.transcript)
            .unwrap_or_else(|e| panic!("attacker pair {round}: {e}"));
        assert_eq!(
            cert.conclusion,
            Formula::imp(v.boxed.clone(), u.boxed.clone())
        );
        let d = compile(&cert, &[]).unwrap();
        check_derivation(&theory, &d).unwrap_or_else(|e| panic!("attacker pair {round}: {e}"));
    }

    println!(
        "criterion 6 PASS: 50 defender pairs and 50 attacker pairs, \
         every monotonicity implication certified"
    );
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_7_weak_interpretation() {
    // lift p2 through {[]p1, [](p1 -> p2)}
    let pair = TheoryPair::new(vec![f("[]p1"), f("[](p1 -> p2)")]).unwrap();
    let lifted = weak_interpret_auto(&pair, &f("p2"), LogicVariant::Minimal).unwrap();
    assert_eq!(lifted.b_boxed.strip_boxes(), f("p2"));
    assert_eq!(lifted.derivation.premises, pair.t2_axioms);
    assert_eq!(lifted.derivation.conclusion(), Some(&lifted.b_boxed));
    check_derivation(&Theory::empty(Variant::Standard), &lifted.derivation).unwrap();
    for cert in &lifted.axiom_certificates {
        check_derivation(&Theory::empty(Variant::Standard), cert).unwrap();
    }

    // consistency transfer through {[]p1, [](p1 -> bot)}
    let pair = TheoryPair::new(vec![f("[]p1"), f("[](p1 -> bot)")]).unwrap();
    let transfer = consistency_transfer_auto(&pair, LogicVariant::Minimal).unwrap();
    assert_eq!(transfer.derivation.conclusion(), Some(&Formula::Bottom));
    let unbox_steps = transfer
        .derivation
        .lines
        .iter()
        .filter(|l| {
            matches!(
                l.justification,
                boxlogic::derivation::Justification::Unbox { .. }
            )
        })
        .count();
    assert!(unbox_steps >= 1, "transfer must end through unbox steps");
    check_derivation(&Theory::empty(Variant::Standard), &transfer.derivation).unwrap();

    println!(
        "criterion 7 PASS: lifted p2 to `{}` with a checked derivation; \
         consistency transfer concludes bot after {unbox_steps} unbox step(s)",
        lifted.b_boxed
    );
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_8_stabilization_bound() {
    let mut traced = 0;
    for variant in [Variant::Standard, Variant::Strengthened] {
        for (name, theory) in sample_theories(variant) {
            let closure = build_closure(&theory, &seeds_for(&theory)).unwrap();
            let trace = stabilize(&theory, &closure, closure.default_max_stages()).unwrap();
            assert!(
                trace.stabilized_at <= closure.len() + 1,
                "{name}: stabilized at {} with closure size {}",
                trace.stabilized_at,
                closure.len()
            );
            // the two confirmation stages beyond the detecting pair exist
            // and agree with the stabilized stage
            assert_eq!(trace.stage_count(), trace.stabilized_at + 3);
            let fixed = trace.stage(trace.stabilized_at).unwrap();
            for extra in 1..=2 {
                assert_eq!(
                    trace.stage(trace.stabilized_at + extra).unwrap(),
                    fixed,
                    "{name}: stage {} regrew",
                    trace.stabilized_at + extra
                );
            }
            // the direct recursion agrees with the trace stage by stage
            for formula in closure.formulas.iter().take(12) {
                for k in 1..=trace.stabilized_at {
                    assert_eq!(
                        in_fk(&theory, formula, k).unwrap(),
                        trace.contains_at(formula, k).unwrap()
                    );
                }
            }
            traced += 1;
        }
    }
    println!(
        "criterion 8 PASS: {traced} traces stabilized within closure size + 1 stages, \
         two extra stages confirm no further growth"
    );
}
