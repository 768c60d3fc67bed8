//! The weak-interpretation pipeline.
//!
//! Deleting every box from the theorems of a theory with increasing
//! axioms yields all theorems of the box-free theory: any box-free
//! theorem lifts back to a boxed theorem of the original theory. The
//! lift plays the box-insertion game on `conj(axioms) -> goal` with the
//! extracted defender strategy on the whole formula and, on each
//! conjunct, an attacker strategy built so that the played conjunct is
//! implied by the corresponding boxed axiom.
//!
//! The implication-free ingredients come from the sandwich lemma: for
//! implication-free `C` and any boxing `C'` of `C`, both `C -> C'` and
//! `C' -> []^j C` are derivable, with `j` read off the boxing.

use crate::derivation::Derivation;
use crate::formula::{Formula, Mover, Step};
use crate::game::{play, Arena, ExtractError, GameError, PlayResult, Strategy, Term};
use crate::proofterm::{
    and_map, app, box_mono, compile, compose, dist_box_imp, fresh_hyp, hyp, identity, lam, or_map,
    premise, raise, schema, ProofTerm,
};
use crate::sequent::{
    check_tree, prove, LogicVariant, ProofTree, ProveResult, RuleLabel, Sequent, SequentError,
    TreeError,
};
use crate::theory::SchemaId;
use serde::Serialize;
use thiserror::Error;

pub use crate::game::extract_defender_strategy;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InterpError {
    #[error("axiom {index} is not increasing: implication inside a premise at path {path:?}")]
    NotIncreasing { index: usize, path: Vec<Step> },
    #[error("`{0}` contains an implication; the sandwich lemma needs implication-free formulas")]
    ContainsImplication(Formula),
    #[error("`{boxing}` is not obtained from `{template}` by inserting boxes")]
    NotABoxing { template: Formula, boxing: Formula },
    #[error("the supplied proof concludes `{found}`, expected `{expected}`")]
    WrongSequent { expected: Sequent, found: Sequent },
    #[error("`{0}` is not derivable from the stripped axioms in this logic")]
    Unprovable(Formula),
    #[error("classical configurations cannot emit checkable modal derivations")]
    ClassicalUnsupported,
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Sequent(#[from] SequentError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// A pair of theories: boxed increasing axioms and their stripped forms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoryPair {
    pub t2_axioms: Vec<Formula>,
    pub t1_axioms: Vec<Formula>,
}

impl TheoryPair {
    pub fn new(t2_axioms: Vec<Formula>) -> Result<TheoryPair, InterpError> {
        let t1_axioms = strip_theory(&t2_axioms)?;
        Ok(TheoryPair {
            t2_axioms,
            t1_axioms,
        })
    }
}

fn increasing_violation(f: &Formula) -> Option<Vec<Step>> {
    fn walk(f: &Formula, inside_premise: bool, path: &mut Vec<Step>) -> Option<Vec<Step>> {
        match f {
            Formula::Bottom | Formula::Var(_) => None,
            Formula::Imp(a, b) => {
                if inside_premise {
                    return Some(path.clone());
                }
                path.push(Step::Left);
                let hit = walk(a, true, path);
                path.pop();
                if hit.is_some() {
                    return hit;
                }
                path.push(Step::Right);
                let hit = walk(b, inside_premise, path);
                path.pop();
                hit
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                path.push(Step::Left);
                let hit = walk(a, inside_premise, path);
                path.pop();
                if hit.is_some() {
                    return hit;
                }
                path.push(Step::Right);
                let hit = walk(b, inside_premise, path);
                path.pop();
                hit
            }
            Formula::Boxed(a) => {
                path.push(Step::Body);
                let hit = walk(a, inside_premise, path);
                path.pop();
                hit
            }
        }
    }
    let mut path = Vec::new();
    walk(f, false, &mut path)
}

/// Strips boxes axiom-wise; rejects non-increasing axioms.
pub fn strip_theory(t2_axioms: &[Formula]) -> Result<Vec<Formula>, InterpError> {
    for (index, axiom) in t2_axioms.iter().enumerate() {
        if let Some(path) = increasing_violation(axiom) {
            return Err(InterpError::NotIncreasing { index, path });
        }
    }
    Ok(t2_axioms.iter().map(|f| f.strip_boxes()).collect())
}

// ---------------------------------------------------------------------------
// The sandwich lemma

/// The exponent and both derivations of the sandwich lemma.
#[derive(Debug, Clone, Serialize)]
pub struct SandwichResult {
    pub j: u32,
    /// `c -> c_boxed`
    pub forward: Derivation,
    /// `c_boxed -> []^j c`
    pub backward: Derivation,
}

fn check_boxing(template: &Formula, boxing: &Formula) -> Result<(), InterpError> {
    let (_, core) = boxing.strip_root_boxes();
    let ok = match (template, core) {
        (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Var(i), Formula::Var(j)) => i == j,
        (Formula::And(a, b), Formula::And(ca, cb))
        | (Formula::Or(a, b), Formula::Or(ca, cb))
        | (Formula::Imp(a, b), Formula::Imp(ca, cb)) => {
            check_boxing(a, ca).is_ok() && check_boxing(b, cb).is_ok()
        }
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(InterpError::NotABoxing {
            template: template.clone(),
            boxing: boxing.clone(),
        })
    }
}

// `c -> c_boxed` for any boxing of an implication-free template.
fn sandwich_forward(c: &Formula, boxed: &Formula) -> ProofTerm {
    let (m, core) = boxed.strip_root_boxes();
    let inner = match (c, core) {
        (Formula::Bottom, Formula::Bottom) | (Formula::Var(_), Formula::Var(_)) => identity(c),
        (Formula::And(a, b), Formula::And(ca, cb)) => {
            and_map(sandwich_forward(a, ca), sandwich_forward(b, cb))
        }
        (Formula::Or(a, b), Formula::Or(ca, cb)) => {
            or_map(sandwich_forward(a, ca), sandwich_forward(b, cb))
        }
        _ => unreachable!("boxing checked"),
    };
    compose(inner, raise(core, 0, m))
}

// `[]^j A & []^j B -> []^j (A & B)`.
fn box_and_collect(j: u32, a: &Formula, b: &Formula) -> ProofTerm {
    if j == 0 {
        identity(&Formula::and(a.clone(), b.clone()))
    } else {
        let step = schema(
            SchemaId::BoxAndBwd,
            &[
                Formula::boxed_n(j - 1, a.clone()),
                Formula::boxed_n(j - 1, b.clone()),
            ],
        );
        compose(step, box_mono(box_and_collect(j - 1, a, b)))
    }
}

fn box_or_collect(j: u32, a: &Formula, b: &Formula) -> ProofTerm {
    if j == 0 {
        identity(&Formula::or(a.clone(), b.clone()))
    } else {
        let step = schema(
            SchemaId::BoxOrBwd,
            &[
                Formula::boxed_n(j - 1, a.clone()),
                Formula::boxed_n(j - 1, b.clone()),
            ],
        );
        compose(step, box_mono(box_or_collect(j - 1, a, b)))
    }
}

// `[]^j (A & B) -> []^j A & []^j B` and the disjunctive twin.
fn box_and_split(j: u32, a: &Formula, b: &Formula) -> ProofTerm {
    if j == 0 {
        identity(&Formula::and(a.clone(), b.clone()))
    } else {
        let step = schema(
            SchemaId::BoxAndFwd,
            &[
                Formula::boxed_n(j - 1, a.clone()),
                Formula::boxed_n(j - 1, b.clone()),
            ],
        );
        compose(box_mono(box_and_split(j - 1, a, b)), step)
    }
}

fn box_or_split(j: u32, a: &Formula, b: &Formula) -> ProofTerm {
    if j == 0 {
        identity(&Formula::or(a.clone(), b.clone()))
    } else {
        let step = schema(
            SchemaId::BoxOrFwd,
            &[
                Formula::boxed_n(j - 1, a.clone()),
                Formula::boxed_n(j - 1, b.clone()),
            ],
        );
        compose(box_mono(box_or_split(j - 1, a, b)), step)
    }
}

// `c_boxed -> []^j c` with the least exponent from the inductive
// construction.
fn sandwich_backward(c: &Formula, boxed: &Formula) -> (u32, ProofTerm) {
    let (m, core) = boxed.strip_root_boxes();
    let (j0, inner) = match (c, core) {
        (Formula::Bottom, Formula::Bottom) | (Formula::Var(_), Formula::Var(_)) => (0, identity(c)),
        (Formula::And(a, b), Formula::And(ca, cb)) => {
            let (ja, ta) = sandwich_backward(a, ca);
            let (jb, tb) = sandwich_backward(b, cb);
            let j = ja.max(jb);
            let ta = compose(ta, raise(a, ja, j));
            let tb = compose(tb, raise(b, jb, j));
            (j, compose(and_map(ta, tb), box_and_collect(j, a, b)))
        }
        (Formula::Or(a, b), Formula::Or(ca, cb)) => {
            let (ja, ta) = sandwich_backward(a, ca);
            let (jb, tb) = sandwich_backward(b, cb);
            let j = ja.max(jb);
            let ta = compose(ta, raise(a, ja, j));
            let tb = compose(tb, raise(b, jb, j));
            (j, compose(or_map(ta, tb), box_or_collect(j, a, b)))
        }
        _ => unreachable!("boxing checked"),
    };
    let mut lifted = inner;
    for _ in 0..m {
        lifted = box_mono(lifted);
    }
    // lifted : []^m core -> []^m []^j0 c = []^(m+j0) c
    (m + j0, lifted)
}

/// The sandwich lemma: least `j` with derivations of `c -> c_boxed` and
/// `c_boxed -> []^j c`.
pub fn sandwich_exponent(c: &Formula, c_boxed: &Formula) -> Result<SandwichResult, InterpError> {
    if c.contains_imp() {
        return Err(InterpError::ContainsImplication(c.clone()));
    }
    check_boxing(c, c_boxed)?;
    let fwd = sandwich_forward(c, c_boxed);
    let (j, bwd) = sandwich_backward(c, c_boxed);
    Ok(SandwichResult {
        j,
        forward: compile(&fwd, &[]).expect("closed"),
        backward: compile(&bwd, &[]).expect("closed"),
    })
}

// `[]^j x -> x` with `[]^j` pushed onto every atom, for implication-free x.
fn distribute(j: u32, x: &Formula) -> ProofTerm {
    match x {
        Formula::Bottom | Formula::Var(_) => identity(&Formula::boxed_n(j, x.clone())),
        Formula::And(a, b) => compose(
            box_and_split(j, a, b),
            and_map(distribute(j, a), distribute(j, b)),
        ),
        Formula::Or(a, b) => compose(
            box_or_split(j, a, b),
            or_map(distribute(j, a), distribute(j, b)),
        ),
        _ => unreachable!("implication-free"),
    }
}

// ---------------------------------------------------------------------------
// The corollary's attacker strategy

// For one conjunct: moves on the slots the original attacker owns inside
// it, plus a certificate `[]^d axiom -> played conjunct` for any realized
// transcript and offset.
// (values, d) -> closed proof of `[]^d boxing -> realized template`
type AxiomCert = Box<dyn Fn(&[u32], u32) -> ProofTerm>;

struct AxiomStrategy {
    terms: Vec<(usize, Term)>,
    cert: AxiomCert,
}

// Maximum of the realized moves over an implication-free subtree, as a
// strategy term over the arena slots `start..`.
fn moves_max_term(template: &Formula, cursor: &mut usize) -> Term {
    match template {
        Formula::Bottom | Formula::Var(_) => {
            let t = Term::move_ref(*cursor);
            *cursor += 1;
            t
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let ta = moves_max_term(a, cursor);
            let tb = moves_max_term(b, cursor);
            Term::max(ta, tb)
        }
        _ => unreachable!("implication-free"),
    }
}

// Builds the role-defender strategy on an increasing template with a
// given boxing, under a symbolic box offset `d`.
fn axiom_strategy(
    template: &Formula,
    boxing: &Formula,
    cursor: &mut usize,
    d_term: Term,
) -> AxiomStrategy {
    if !template.contains_imp() {
        let start = *cursor;
        let count = template.atom_count();
        *cursor += count;
        let s2_j = sandwich_backward(template, boxing).0;
        let terms: Vec<(usize, Term)> = (start..start + count)
            .map(|slot| (slot, Term::plus(d_term.clone(), s2_j)))
            .collect();
        let template = template.clone();
        let boxing = boxing.clone();
        let cert = Box::new(move |_values: &[u32], d: u32| {
            // []^d boxing -> []^(d+j) template -> template[d+j on every atom]
            let (_, bwd) = sandwich_backward(&template, &boxing);
            let mut lifted = bwd;
            for _ in 0..d {
                lifted = box_mono(lifted);
            }
            let k = d + s2_j;
            compose(lifted, distribute(k, &template))
        });
        return AxiomStrategy { terms, cert };
    }

    // conjunctions and disjunctions recurse structurally: distribute the
    // root boxes inward, then handle each side
    match template {
        Formula::And(y, z) | Formula::Or(y, z) => {
            let is_and = matches!(template, Formula::And(_, _));
            let (m, core) = boxing.strip_root_boxes();
            let (y_boxed, z_boxed) = match (is_and, core) {
                (true, Formula::And(yb, zb)) | (false, Formula::Or(yb, zb)) => {
                    (yb.as_ref().clone(), zb.as_ref().clone())
                }
                _ => unreachable!("boxing checked"),
            };
            let shifted = Term::plus(d_term, m);
            let sy = axiom_strategy(y, &y_boxed, cursor, shifted.clone());
            let sz = axiom_strategy(z, &z_boxed, cursor, shifted);
            let mut terms = sy.terms;
            terms.extend(sz.terms);
            let (y_cert, z_cert) = (sy.cert, sz.cert);
            let cert: AxiomCert = Box::new(move |values: &[u32], d: u32| {
                let dm = d + m;
                let split = if is_and {
                    box_and_split(dm, &y_boxed, &z_boxed)
                } else {
                    box_or_split(dm, &y_boxed, &z_boxed)
                };
                let cy = y_cert(values, dm);
                let cz = z_cert(values, dm);
                let mapped = if is_and {
                    and_map(cy, cz)
                } else {
                    or_map(cy, cz)
                };
                compose(split, mapped)
            });
            return AxiomStrategy { terms, cert };
        }
        _ => {}
    }

    let Formula::Imp(x0, x1) = template else {
        unreachable!("increasing formulas decompose into the cases above")
    };
    let (m, core) = boxing.strip_root_boxes();
    let Formula::Imp(x0_boxed, x1_boxed) = core else {
        unreachable!("boxing checked")
    };
    let x0 = x0.as_ref().clone();
    let x1 = x1.as_ref().clone();
    let x0_boxed = x0_boxed.as_ref().clone();
    let x1_boxed = x1_boxed.as_ref().clone();

    let x0_start = *cursor;
    // the opponent owns every slot of the implication-free premise
    let j0_term = moves_max_term(&x0, cursor);
    let d1_term = Term::max(Term::plus(d_term, m), j0_term);
    let inner = axiom_strategy(&x1, &x1_boxed, cursor, d1_term);

    let AxiomStrategy {
        terms: inner_terms,
        cert: inner_cert,
    } = inner;
    let x0_atoms = x0.atom_count();
    let cert = Box::new(move |values: &[u32], d: u32| {
        let x0_counts = &values[x0_start..x0_start + x0_atoms];
        let x0_played = x0.apply_boxes(x0_counts);
        let (j0, x0_to_boxed_template) = sandwich_backward(&x0, &x0_played);
        let j = (d + m).max(j0);

        // x0' -> []^j x0''
        let into_template = compose(x0_to_boxed_template, raise(&x0, j0, j));
        let template_to_boxing = sandwich_forward(&x0, &x0_boxed);
        let mut lifted_fwd = template_to_boxing;
        for _ in 0..j {
            lifted_fwd = box_mono(lifted_fwd);
        }
        let x0_side = compose(into_template, lifted_fwd);

        // []^d boxing = []^(d+m)(x0'' -> x1''): raise to j and distribute
        let w = Formula::imp(x0_boxed.clone(), x1_boxed.clone());
        let h = fresh_hyp();
        let h_formula = Formula::boxed_n(d + m, w.clone());
        let raised = app(raise(&w, d + m, j), hyp(h, h_formula.clone()));
        let dist = app(dist_box_imp(j, &x0_boxed, &x1_boxed), raised);

        let x = fresh_hyp();
        let x1_from = app(dist, app(x0_side, hyp(x, x0_played.clone())));
        let x1_side = (inner_cert)(values, j);
        let body = app(x1_side, x1_from);
        lam(h, h_formula, lam(x, x0_played, body))
    });

    AxiomStrategy {
        terms: inner_terms,
        cert,
    }
}

// ---------------------------------------------------------------------------
// The pipeline

/// Result of lifting one theorem of the stripped theory.
#[derive(Debug, Clone, Serialize)]
pub struct WeakInterpretation {
    pub pair: TheoryPair,
    pub logic: LogicVariant,
    pub goal: Formula,
    /// The boxing of the goal produced by the game.
    pub b_boxed: Formula,
    pub transcript: Vec<u32>,
    /// Derivation of `b_boxed` with the boxed axioms admitted as premises.
    pub derivation: Derivation,
    /// For each axiom, the derivation of `axiom -> played conjunct`.
    pub axiom_certificates: Vec<Derivation>,
}

fn conj(axioms: &[Formula]) -> Formula {
    axioms
        .iter()
        .cloned()
        .reduce(Formula::and)
        .expect("nonempty axiom list")
}

/// The sequent the caller's proof must conclude: `conj(t1) => b`, or
/// `=> b` for the empty theory.
pub fn required_sequent(pair: &TheoryPair, goal: &Formula) -> Sequent {
    if pair.t1_axioms.is_empty() {
        Sequent::goal(goal.clone())
    } else {
        Sequent::new(vec![conj(&pair.t1_axioms)], vec![goal.clone()])
    }
}

/// Lifts a box-free theorem of the stripped theory to a boxed theorem of
/// the boxed theory, given a checked sequent proof `d1` of
/// `conj(t1_axioms) => goal`.
pub fn weak_interpret(
    pair: &TheoryPair,
    goal: &Formula,
    d1: &ProofTree,
    logic: LogicVariant,
) -> Result<WeakInterpretation, InterpError> {
    if logic.certificate_variant().is_none() {
        return Err(InterpError::ClassicalUnsupported);
    }
    check_tree(d1, logic)?;
    let expected = required_sequent(pair, goal);
    if d1.sequent != expected {
        return Err(InterpError::WrongSequent {
            expected,
            found: d1.sequent.clone(),
        });
    }

    // the game subject and its closed proof tree
    let (subject, tree) = if pair.t1_axioms.is_empty() {
        (goal.clone(), d1.clone())
    } else {
        let subject = Formula::imp(conj(&pair.t1_axioms), goal.clone());
        let root = Sequent::goal(subject.clone());
        let tree = ProofTree {
            sequent: root,
            rule: RuleLabel::ImpR,
            position: 0,
            children: vec![d1.clone()],
        };
        (subject, tree)
    };

    let extracted = extract_defender_strategy(&tree, logic)?;
    let arena = Arena::for_formula(&subject);

    // attacker: the corollary strategy on each conjunct
    let mut cursor = 0;
    let mut attacker_terms = Vec::new();
    let mut axiom_strategies = Vec::new();
    for (t2, t1) in pair.t2_axioms.iter().zip(&pair.t1_axioms) {
        let strat = axiom_strategy(t1, t2, &mut cursor, Term::constant(0));
        attacker_terms.extend(strat.terms.iter().cloned());
        axiom_strategies.push(strat);
    }
    let mut attacker = Strategy {
        terms: attacker_terms.into_iter().collect(),
    };
    // attacker slots inside the goal belong to no conjunct; play zero
    for slot in arena.slots_of(Mover::Attacker) {
        attacker.terms.entry(slot).or_insert(Term::constant(0));
    }

    let result: PlayResult = play(&arena, &extracted.strategy, &attacker)?;
    let values = &result.transcript;

    // per-axiom certificates: axiom -> played conjunct
    let mut conjunct_terms = Vec::new();
    let mut axiom_certificates = Vec::new();
    for (i, strat) in axiom_strategies.iter().enumerate() {
        let cert = (strat.cert)(values, 0);
        axiom_certificates.push(compile(&cert, &[]).expect("closed"));
        let ax_premise = premise(i + 1, pair.t2_axioms[i].clone());
        conjunct_terms.push(app(cert, ax_premise));
    }

    // the defender's certificate for the whole play
    let root_term = extracted.certificate_term(values)?;
    let final_term = if conjunct_terms.is_empty() {
        root_term
    } else {
        let conj_term = conjunct_terms
            .into_iter()
            .reduce(crate::proofterm::pair)
            .expect("nonempty");
        app(root_term, conj_term)
    };
    let b_boxed = final_term.conclusion.clone();
    let derivation = compile(&final_term, &pair.t2_axioms).expect("premise-closed");

    Ok(WeakInterpretation {
        pair: pair.clone(),
        logic,
        goal: goal.clone(),
        b_boxed,
        transcript: values.clone(),
        derivation,
        axiom_certificates,
    })
}

/// Convenience wrapper: proves `conj(t1) => goal` first, then lifts.
pub fn weak_interpret_auto(
    pair: &TheoryPair,
    goal: &Formula,
    logic: LogicVariant,
) -> Result<WeakInterpretation, InterpError> {
    let sequent = required_sequent(pair, goal);
    match prove(&sequent, logic)? {
        ProveResult::Proved(tree) => weak_interpret(pair, goal, &tree, logic),
        ProveResult::Unprovable => Err(InterpError::Unprovable(goal.clone())),
    }
}

/// Consistency transfer: from a proof of `bot` in the stripped theory,
/// derives `bot` in the boxed theory by unboxing the lifted conclusion.
pub fn consistency_transfer(
    pair: &TheoryPair,
    d1: &ProofTree,
    logic: LogicVariant,
) -> Result<WeakInterpretation, InterpError> {
    let lifted = weak_interpret(pair, &Formula::Bottom, d1, logic)?;
    Ok(append_unboxing(lifted))
}

/// Convenience wrapper proving the inconsistency of the stripped theory
/// first.
pub fn consistency_transfer_auto(
    pair: &TheoryPair,
    logic: LogicVariant,
) -> Result<WeakInterpretation, InterpError> {
    let lifted = weak_interpret_auto(pair, &Formula::Bottom, logic)?;
    Ok(append_unboxing(lifted))
}

fn append_unboxing(mut lifted: WeakInterpretation) -> WeakInterpretation {
    // b_boxed is []^k bot; k unbox lines conclude bot
    let (k, core) = lifted.b_boxed.strip_root_boxes();
    debug_assert_eq!(core, &Formula::Bottom);
    let mut lines = lifted.derivation.lines.clone();
    let mut current = lines.len();
    for step in (0..k).rev() {
        lines.push(crate::derivation::DerivationLine {
            formula: Formula::boxed_n(step, Formula::Bottom),
            justification: crate::derivation::Justification::Unbox { refs: [current] },
        });
        current = lines.len();
    }
    lifted.derivation.lines = lines;
    lifted.b_boxed = lifted
        .derivation
        .conclusion()
        .cloned()
        .unwrap_or(Formula::Bottom);
    lifted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::formula::parse;
    use crate::theory::{Theory, Variant};

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn axioms(list: &[&str]) -> Vec<Formula> {
        list.iter().map(|s| f(s)).collect()
    }

    #[test]
    fn strip_examples() {
        assert_eq!(
            strip_theory(&axioms(&["[]p1", "[](p1 -> p2)"])).unwrap(),
            axioms(&["p1", "p1 -> p2"])
        );
        assert_eq!(strip_theory(&[]).unwrap(), Vec::<Formula>::new());
        let err = strip_theory(&axioms(&["([]p1 -> bot) -> p2"])).unwrap_err();
        assert!(matches!(err, InterpError::NotIncreasing { index: 0, .. }));
    }

    fn check_closed(d: &Derivation, variant: Variant) {
        check_derivation(&Theory::empty(variant), d).unwrap();
    }

    #[test]
    fn sandwich_examples() {
        let r = sandwich_exponent(&f("p1"), &f("[][][]p1")).unwrap();
        assert_eq!(r.j, 3);
        assert_eq!(r.forward.conclusion(), Some(&f("p1 -> [][][]p1")));
        assert_eq!(r.backward.conclusion(), Some(&f("[][][]p1 -> [][][]p1")));
        check_closed(&r.forward, Variant::Standard);
        check_closed(&r.backward, Variant::Standard);

        let r = sandwich_exponent(&f("p1 & p2"), &f("[]p1 & p2")).unwrap();
        assert_eq!(r.j, 1);
        assert_eq!(r.forward.conclusion(), Some(&f("p1 & p2 -> []p1 & p2")));
        assert_eq!(
            r.backward.conclusion(),
            Some(&f("[]p1 & p2 -> [](p1 & p2)"))
        );
        check_closed(&r.forward, Variant::Standard);
        check_closed(&r.backward, Variant::Standard);

        let c = f("p1 | (p2 & bot)");
        let r = sandwich_exponent(&c, &c).unwrap();
        assert_eq!(r.j, 0);
        assert_eq!(
            r.forward.conclusion(),
            Some(&Formula::imp(c.clone(), c.clone()))
        );
        check_closed(&r.forward, Variant::Standard);
        check_closed(&r.backward, Variant::Standard);
    }

    #[test]
    fn sandwich_rejects_bad_inputs() {
        assert!(matches!(
            sandwich_exponent(&f("p1 -> p2"), &f("p1 -> p2")),
            Err(InterpError::ContainsImplication(_))
        ));
        assert!(matches!(
            sandwich_exponent(&f("p1"), &f("[]p2")),
            Err(InterpError::NotABoxing { .. })
        ));
    }

    #[test]
    fn sandwich_monotone_under_deeper_boxing() {
        let c = f("p1 & (p2 | bot)");
        let shallow = f("[](p1 & (p2 | bot))");
        let deeper = f("[][](p1 & ([]p2 | bot))");
        let j1 = sandwich_exponent(&c, &shallow).unwrap().j;
        let j2 = sandwich_exponent(&c, &deeper).unwrap().j;
        assert!(j2 >= j1);
    }

    #[test]
    fn modus_ponens_lift() {
        let pair = TheoryPair::new(axioms(&["[]p1", "[](p1 -> p2)"])).unwrap();
        assert_eq!(pair.t1_axioms, axioms(&["p1", "p1 -> p2"]));
        let result = weak_interpret_auto(&pair, &f("p2"), LogicVariant::Minimal).unwrap();
        assert_eq!(result.b_boxed.strip_boxes(), f("p2"));
        assert_eq!(result.derivation.premises, pair.t2_axioms);
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
        assert_eq!(result.derivation.conclusion(), Some(&result.b_boxed));
        for cert in &result.axiom_certificates {
            check_closed(cert, Variant::Standard);
        }
    }

    #[test]
    fn single_axiom_lift() {
        let pair = TheoryPair::new(axioms(&["[]p1"])).unwrap();
        let result = weak_interpret_auto(&pair, &f("p1"), LogicVariant::Minimal).unwrap();
        assert_eq!(result.b_boxed.strip_boxes(), f("p1"));
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
    }

    #[test]
    fn transfer_from_inconsistent_axioms() {
        let pair = TheoryPair::new(axioms(&["[]p1", "[](p1 -> bot)"])).unwrap();
        let result = consistency_transfer_auto(&pair, LogicVariant::Minimal).unwrap();
        assert_eq!(result.derivation.conclusion(), Some(&Formula::Bottom));
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
        assert!(result.derivation.lines.iter().any(|l| matches!(
            l.justification,
            crate::derivation::Justification::Unbox { .. }
        )));
    }

    #[test]
    fn transfer_from_boxed_bottom() {
        let pair = TheoryPair::new(axioms(&["[]bot"])).unwrap();
        let result = consistency_transfer_auto(&pair, LogicVariant::Minimal).unwrap();
        assert_eq!(result.derivation.conclusion(), Some(&Formula::Bottom));
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
    }

    #[test]
    fn three_axiom_chain_lift() {
        let pair = TheoryPair::new(axioms(&["[]p1", "[](p1 -> p2)", "[](p2 -> p3)"])).unwrap();
        let result = weak_interpret_auto(&pair, &f("p3"), LogicVariant::Minimal).unwrap();
        assert_eq!(result.b_boxed.strip_boxes(), f("p3"));
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
        for cert in &result.axiom_certificates {
            check_closed(cert, Variant::Standard);
        }
    }

    #[test]
    fn axioms_with_compound_increasing_shapes() {
        // a conjunction containing an implication is increasing; the
        // argument has to precede the implication in the schedule for the
        // strategy to stay within the term language
        let pair = TheoryPair::new(axioms(&["[](p1 & (p1 -> p2))"])).unwrap();
        assert_eq!(pair.t1_axioms, axioms(&["p1 & (p1 -> p2)"]));
        let result = weak_interpret_auto(&pair, &f("p2"), LogicVariant::Minimal).unwrap();
        assert_eq!(result.b_boxed.strip_boxes(), f("p2"));
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
        for cert in &result.axiom_certificates {
            check_closed(cert, Variant::Standard);
        }

        // and a disjunctive one
        let pair = TheoryPair::new(axioms(&["[]p2", "[](p1 | (p2 -> p1))"])).unwrap();
        let result = weak_interpret_auto(&pair, &f("p1"), LogicVariant::Minimal).unwrap();
        assert_eq!(result.b_boxed.strip_boxes(), f("p1"));
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
    }

    #[test]
    fn order_sensitive_strategies_fail_loudly() {
        // with the implication scheduled before its argument, the winning
        // strategy needs the sum of two opponent moves; extraction must
        // report this rather than emit an ill-founded strategy
        let pair = TheoryPair::new(axioms(&["[]((p1 -> p2) & p1)"])).unwrap();
        let err = weak_interpret_auto(&pair, &f("p2"), LogicVariant::Minimal).unwrap_err();
        assert!(matches!(
            err,
            InterpError::Extract(ExtractError::UnorderableMove { .. })
        ));
    }

    #[test]
    fn consistent_theory_has_no_transfer() {
        let pair = TheoryPair::new(axioms(&["[]p1"])).unwrap();
        assert!(matches!(
            consistency_transfer_auto(&pair, LogicVariant::Minimal),
            Err(InterpError::Unprovable(_))
        ));
    }

    #[test]
    fn classical_configuration_is_rejected() {
        let pair = TheoryPair::new(axioms(&["[]p1"])).unwrap();
        assert!(matches!(
            weak_interpret_auto(&pair, &f("p1"), LogicVariant::Classical),
            Err(InterpError::ClassicalUnsupported)
        ));
    }

    #[test]
    fn lifted_axioms_with_inner_boxes() {
        // deeper boxings exercise the sandwich machinery
        let pair =
            TheoryPair::new(axioms(&["[][](p1 & []p2)", "[]([](p1 & p2) -> [][]p3)"])).unwrap();
        assert_eq!(pair.t1_axioms, axioms(&["p1 & p2", "p1 & p2 -> p3"]));
        let result = weak_interpret_auto(&pair, &f("p3"), LogicVariant::Minimal).unwrap();
        assert_eq!(result.b_boxed.strip_boxes(), f("p3"));
        check_derivation(&Theory::empty(Variant::Standard), &result.derivation).unwrap();
        for cert in &result.axiom_certificates {
            check_closed(cert, Variant::Standard);
        }
    }
}
