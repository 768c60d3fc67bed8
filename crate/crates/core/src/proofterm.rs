//! Proof terms and their compilation into checkable derivations.
//!
//! Derivation-producing code (the bounded prover, game certificates, the
//! interpretation pipeline) builds typed proof terms: schema constants,
//! applications (modus ponens), lambda abstractions over hypotheses, and
//! unbox steps. Compilation eliminates lambdas by K/S bracket abstraction
//! and emits deduplicated derivation lines.
//!
//! Unbox has no deduction theorem, so a lambda-bound hypothesis may never
//! occur under an unbox; compilation rejects such terms.

use crate::derivation::{schema_line, Derivation, DerivationLine, Justification};
use crate::formula::Formula;
use crate::theory::{Direction, SchemaId, Theory};
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::atomic::{AtomicU32, Ordering};
use thiserror::Error;

static NEXT_HYP: AtomicU32 = AtomicU32::new(0);

/// Allocates a fresh hypothesis identifier.
pub fn fresh_hyp() -> u32 {
    NEXT_HYP.fetch_add(1, Ordering::Relaxed)
}

/// A typed proof term. `conclusion` is the formula the term proves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTerm {
    pub conclusion: Formula,
    node: Node,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Node {
    Hyp(u32),
    Premise(usize),
    Schema(SchemaId, Vec<Formula>),
    Defining(u32, Direction),
    App(Rc<ProofTerm>, Rc<ProofTerm>),
    Lam(u32, Formula, Rc<ProofTerm>),
    Unbox(Rc<ProofTerm>),
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("applied `{function}` to `{argument}`, which does not match its premise")]
    BadApplication {
        function: Formula,
        argument: Formula,
    },
    #[error("unbox applied to non-boxed `{0}`")]
    BadUnbox(Formula),
    #[error("term still contains hypothesis {0} after abstraction")]
    OpenTerm(u32),
    #[error("hypothesis occurs under an unbox step; the unbox rule admits no deduction theorem")]
    HypUnderUnbox,
}

/// Hypothesis reference.
pub fn hyp(id: u32, formula: Formula) -> ProofTerm {
    ProofTerm {
        conclusion: formula,
        node: Node::Hyp(id),
    }
}

/// Admitted premise, 1-based.
pub fn premise(index: usize, formula: Formula) -> ProofTerm {
    ProofTerm {
        conclusion: formula,
        node: Node::Premise(index),
    }
}

/// Schema instance. Panics on arity mismatch (internal invariant).
pub fn schema(id: SchemaId, args: &[Formula]) -> ProofTerm {
    let conclusion = crate::theory::schema_instance(id, args).expect("schema arity");
    ProofTerm {
        conclusion,
        node: Node::Schema(id, args.to_vec()),
    }
}

/// A direction of the defining axiom for `p<var>` in `theory`.
pub fn defining(theory: &Theory, var: u32, direction: Direction) -> ProofTerm {
    let conclusion = theory
        .defining_direction(var, direction)
        .expect("declared variable");
    ProofTerm {
        conclusion,
        node: Node::Defining(var, direction),
    }
}

/// Modus ponens. Panics if the argument does not match the premise of the
/// function's conclusion (internal invariant; callers construct well-typed
/// terms).
pub fn app(function: ProofTerm, argument: ProofTerm) -> ProofTerm {
    let Formula::Imp(premise, conclusion) = &function.conclusion else {
        panic!(
            "app: function proves `{}`, not an implication",
            function.conclusion
        );
    };
    assert_eq!(
        premise.as_ref(),
        &argument.conclusion,
        "app: argument proves `{}` but the implication needs `{}`",
        argument.conclusion,
        premise
    );
    let conclusion = conclusion.as_ref().clone();
    ProofTerm {
        conclusion,
        node: Node::App(Rc::new(function), Rc::new(argument)),
    }
}

/// Lambda abstraction over hypothesis `id : hyp_formula`.
pub fn lam(id: u32, hyp_formula: Formula, body: ProofTerm) -> ProofTerm {
    let conclusion = Formula::imp(hyp_formula.clone(), body.conclusion.clone());
    ProofTerm {
        conclusion,
        node: Node::Lam(id, hyp_formula, Rc::new(body)),
    }
}

/// The unbox rule: from `[]A` infer `A`.
pub fn unbox(term: ProofTerm) -> ProofTerm {
    let Formula::Boxed(body) = &term.conclusion else {
        panic!(
            "unbox: term proves `{}`, not a boxed formula",
            term.conclusion
        );
    };
    let conclusion = body.as_ref().clone();
    ProofTerm {
        conclusion,
        node: Node::Unbox(Rc::new(term)),
    }
}

impl ProofTerm {
    fn contains_hyp(&self, id: u32) -> bool {
        match &self.node {
            Node::Hyp(h) => *h == id,
            Node::Premise(_) | Node::Schema(_, _) | Node::Defining(_, _) => false,
            Node::App(f, a) => f.contains_hyp(id) || a.contains_hyp(id),
            Node::Lam(bound, _, body) => *bound != id && body.contains_hyp(id),
            Node::Unbox(t) => t.contains_hyp(id),
        }
    }
}

// ---------------------------------------------------------------------------
// Derived combinators

/// `A -> A` as S K K.
pub fn identity(a: &Formula) -> ProofTerm {
    let aa = Formula::imp(a.clone(), a.clone());
    app(
        app(
            schema(SchemaId::ImpS, &[a.clone(), aa.clone(), a.clone()]),
            schema(SchemaId::ImpK, &[a.clone(), aa]),
        ),
        schema(SchemaId::ImpK, &[a.clone(), a.clone()]),
    )
}

/// From `A -> B` and `B -> C`, builds `A -> C`.
pub fn compose(ab: ProofTerm, bc: ProofTerm) -> ProofTerm {
    let Formula::Imp(a, _) = ab.conclusion.clone() else {
        panic!("compose: `{}` is not an implication", ab.conclusion);
    };
    let x = fresh_hyp();
    lam(
        x,
        a.as_ref().clone(),
        app(bc, app(ab, hyp(x, a.as_ref().clone()))),
    )
}

/// `[]^from A -> []^to A` for `to >= from`, by chained `A -> []A` steps.
pub fn raise(a: &Formula, from: u32, to: u32) -> ProofTerm {
    assert!(to >= from, "raise only adds boxes");
    let mut term = identity(&Formula::boxed_n(from, a.clone()));
    for k in from..to {
        term = compose(
            term,
            schema(SchemaId::BoxIntro, &[Formula::boxed_n(k, a.clone())]),
        );
    }
    term
}

/// From a proof of `A -> B`, builds `[]A -> []B`.
pub fn box_mono(ab: ProofTerm) -> ProofTerm {
    let Formula::Imp(a, b) = ab.conclusion.clone() else {
        panic!("box_mono: `{}` is not an implication", ab.conclusion);
    };
    let boxed_imp = app(
        schema(SchemaId::BoxIntro, std::slice::from_ref(&ab.conclusion)),
        ab,
    );
    app(
        schema(SchemaId::BoxImp, &[a.as_ref().clone(), b.as_ref().clone()]),
        boxed_imp,
    )
}

/// `[]^m (A -> B) -> ([]^m A -> []^m B)`, iterating the implication box
/// axiom through `m` boxes.
pub fn dist_box_imp(m: u32, a: &Formula, b: &Formula) -> ProofTerm {
    if m == 0 {
        identity(&Formula::imp(a.clone(), b.clone()))
    } else {
        let inner = dist_box_imp(m - 1, a, b);
        compose(
            box_mono(inner),
            schema(
                SchemaId::BoxImp,
                &[
                    Formula::boxed_n(m - 1, a.clone()),
                    Formula::boxed_n(m - 1, b.clone()),
                ],
            ),
        )
    }
}

/// From proofs of `A` and `B`, builds `A & B`.
pub fn pair(ta: ProofTerm, tb: ProofTerm) -> ProofTerm {
    let a = ta.conclusion.clone();
    let b = tb.conclusion.clone();
    app(app(schema(SchemaId::AndPair, &[a, b]), ta), tb)
}

/// From `A -> A'` and `B -> B'`, builds `A & B -> A' & B'`.
pub fn and_map(f: ProofTerm, g: ProofTerm) -> ProofTerm {
    let (a, _a2) = split_imp(&f.conclusion);
    let (b, _b2) = split_imp(&g.conclusion);
    let ab = Formula::and(a.clone(), b.clone());
    let p = fresh_hyp();
    let fst = app(
        schema(SchemaId::AndLeft, &[a.clone(), b.clone()]),
        hyp(p, ab.clone()),
    );
    let snd = app(
        schema(SchemaId::AndRight, &[a.clone(), b.clone()]),
        hyp(p, ab.clone()),
    );
    lam(p, ab, pair(app(f, fst), app(g, snd)))
}

/// Case analysis: from `x : A | B`, `f : A -> C`, `g : B -> C`, builds `C`.
pub fn case(x: ProofTerm, f: ProofTerm, g: ProofTerm) -> ProofTerm {
    let (a, c) = split_imp(&f.conclusion);
    let (b, _) = split_imp(&g.conclusion);
    app(
        app(
            app(
                schema(SchemaId::OrCase, &[a.clone(), b.clone(), c.clone()]),
                f,
            ),
            g,
        ),
        x,
    )
}

/// From `A -> A'` and `B -> B'`, builds `A | B -> A' | B'`.
pub fn or_map(f: ProofTerm, g: ProofTerm) -> ProofTerm {
    let (a, a2) = split_imp(&f.conclusion);
    let (b, b2) = split_imp(&g.conclusion);
    let ab = Formula::or(a.clone(), b.clone());
    let p = fresh_hyp();
    let left = compose(f, schema(SchemaId::OrInl, &[a2.clone(), b2.clone()]));
    let right = compose(g, schema(SchemaId::OrInr, &[a2, b2]));
    lam(p, ab.clone(), case(hyp(p, ab), left, right))
}

/// From `A' -> A` and `B -> B'`, builds `(A -> B) -> (A' -> B')`.
pub fn imp_map(f: ProofTerm, g: ProofTerm) -> ProofTerm {
    let (a2, a) = split_imp(&f.conclusion);
    let (b, _b2) = split_imp(&g.conclusion);
    let ab = Formula::imp(a.clone(), b.clone());
    let h = fresh_hyp();
    let x = fresh_hyp();
    lam(
        h,
        ab.clone(),
        lam(x, a2.clone(), app(g, app(hyp(h, ab), app(f, hyp(x, a2))))),
    )
}

fn split_imp(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::Imp(a, b) => (a.as_ref().clone(), b.as_ref().clone()),
        other => panic!("expected an implication, got `{other}`"),
    }
}

// ---------------------------------------------------------------------------
// Compilation

/// Eliminates every lambda by bracket abstraction, leaving an applicative
/// term over constants, premises, and unbox steps.
fn eliminate_lams(term: &ProofTerm) -> Result<ProofTerm, TermError> {
    match &term.node {
        Node::Hyp(_) | Node::Premise(_) | Node::Schema(_, _) | Node::Defining(_, _) => {
            Ok(term.clone())
        }
        Node::App(f, a) => {
            let f = eliminate_lams(f)?;
            let a = eliminate_lams(a)?;
            Ok(app(f, a))
        }
        Node::Unbox(t) => Ok(unbox(eliminate_lams(t)?)),
        Node::Lam(id, hyp_formula, body) => {
            let body = eliminate_lams(body)?;
            abstract_hyp(*id, hyp_formula, &body)
        }
    }
}

// Bracket abstraction over a lambda-free body.
fn abstract_hyp(id: u32, hyp_formula: &Formula, body: &ProofTerm) -> Result<ProofTerm, TermError> {
    if !body.contains_hyp(id) {
        // [x]M = K M
        return Ok(app(
            schema(
                SchemaId::ImpK,
                &[body.conclusion.clone(), hyp_formula.clone()],
            ),
            body.clone(),
        ));
    }
    match &body.node {
        Node::Hyp(h) if *h == id => Ok(identity(hyp_formula)),
        Node::App(f, a) => {
            // [x](M x) = M when x is not free in M
            if let Node::Hyp(h) = &a.node {
                if *h == id && !f.contains_hyp(id) {
                    return Ok(f.as_ref().clone());
                }
            }
            let fa = abstract_hyp(id, hyp_formula, f)?;
            let aa = abstract_hyp(id, hyp_formula, a)?;
            let Formula::Imp(arg_ty, res_ty) = &f.conclusion else {
                unreachable!("applications are well typed");
            };
            Ok(app(
                app(
                    schema(
                        SchemaId::ImpS,
                        &[
                            hyp_formula.clone(),
                            arg_ty.as_ref().clone(),
                            res_ty.as_ref().clone(),
                        ],
                    ),
                    fa,
                ),
                aa,
            ))
        }
        Node::Unbox(_) => Err(TermError::HypUnderUnbox),
        Node::Hyp(_) | Node::Premise(_) | Node::Schema(_, _) | Node::Defining(_, _) => {
            unreachable!("covered by the contains_hyp check")
        }
        Node::Lam(_, _, _) => unreachable!("body is lambda-free"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum LineKey {
    Schema(SchemaId, Vec<Formula>),
    Defining(u32, Direction),
    Premise(usize),
    App(usize, usize),
    Unbox(usize),
}

struct Emitter {
    lines: Vec<DerivationLine>,
    memo: HashMap<LineKey, usize>,
}

impl Emitter {
    fn push(&mut self, key: LineKey, line: DerivationLine) -> usize {
        if let Some(&idx) = self.memo.get(&key) {
            return idx;
        }
        self.lines.push(line);
        let idx = self.lines.len();
        self.memo.insert(key, idx);
        idx
    }

    // Returns the 1-based line index proving the term's conclusion.
    fn emit(&mut self, term: &ProofTerm) -> Result<usize, TermError> {
        match &term.node {
            Node::Hyp(id) => Err(TermError::OpenTerm(*id)),
            Node::Lam(_, _, _) => unreachable!("lambdas eliminated before emission"),
            Node::Premise(index) => Ok(self.push(
                LineKey::Premise(*index),
                DerivationLine {
                    formula: term.conclusion.clone(),
                    justification: Justification::Premise { index: *index },
                },
            )),
            Node::Schema(id, args) => {
                Ok(self.push(LineKey::Schema(*id, args.clone()), schema_line(*id, args)))
            }
            Node::Defining(var, direction) => Ok(self.push(
                LineKey::Defining(*var, *direction),
                DerivationLine {
                    formula: term.conclusion.clone(),
                    justification: Justification::Defining {
                        var: *var,
                        direction: *direction,
                    },
                },
            )),
            Node::App(f, a) => {
                let arg_line = self.emit(a)?;
                let imp_line = self.emit(f)?;
                Ok(self.push(
                    LineKey::App(arg_line, imp_line),
                    DerivationLine {
                        formula: term.conclusion.clone(),
                        justification: Justification::ModusPonens {
                            refs: [arg_line, imp_line],
                        },
                    },
                ))
            }
            Node::Unbox(t) => {
                let source = self.emit(t)?;
                Ok(self.push(
                    LineKey::Unbox(source),
                    DerivationLine {
                        formula: term.conclusion.clone(),
                        justification: Justification::Unbox { refs: [source] },
                    },
                ))
            }
        }
    }
}

/// Compiles a closed proof term into a derivation over the given premises.
pub fn compile(term: &ProofTerm, premises: &[Formula]) -> Result<Derivation, TermError> {
    let flat = eliminate_lams(term)?;
    let mut emitter = Emitter {
        lines: Vec::new(),
        memo: HashMap::new(),
    };
    emitter.emit(&flat)?;
    Ok(Derivation {
        premises: premises.to_vec(),
        lines: emitter.lines,
    })
}
