//! A sound, budget-bounded prover for the modal system.
//!
//! Backward goal-directed search over a natural-deduction presentation,
//! emitting proof terms that compile into checkable derivations. The
//! search never applies the unbox rule, so every success abstracts
//! cleanly over its hypotheses. Exhausting the budget is not a
//! refutation: the procedure is sound, not complete.

use crate::derivation::Derivation;
use crate::formula::Formula;
use crate::proofterm::{
    app, box_mono, case, compile, defining, fresh_hyp, hyp, lam, pair, premise, schema, ProofTerm,
};
use crate::theory::{Direction, SchemaId, Theory, Variant};

/// Result of a bounded proof search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProveOutcome {
    Found(Derivation),
    /// The budget ran out before a proof was found. Not a refutation.
    BudgetExhausted,
}

impl ProveOutcome {
    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            ProveOutcome::Found(d) => Some(d),
            ProveOutcome::BudgetExhausted => None,
        }
    }
}

/// Searches for a derivation of `goal` from the theory's axioms, with
/// iterative deepening up to `depth_budget`.
pub fn bounded_modal_prove(theory: &Theory, goal: &Formula, depth_budget: u32) -> ProveOutcome {
    bounded_modal_prove_with_premises(theory, &[], goal, depth_budget)
}

/// Same, with extra formulas admitted as premise lines.
pub fn bounded_modal_prove_with_premises(
    theory: &Theory,
    premises: &[Formula],
    goal: &Formula,
    depth_budget: u32,
) -> ProveOutcome {
    let mut search = Search {
        theory,
        premises,
        nodes_left: 200_000,
    };
    for depth in 1..=depth_budget {
        let mut ctx = Vec::new();
        for (i, p) in premises.iter().enumerate() {
            ctx.push(premise(i + 1, p.clone()));
        }
        if let Some(term) = search.prove(&ctx, goal, depth) {
            debug_assert_eq!(&term.conclusion, goal);
            let derivation = compile(&term, premises).expect("closed search result");
            return ProveOutcome::Found(derivation);
        }
        if search.nodes_left == 0 {
            break;
        }
    }
    ProveOutcome::BudgetExhausted
}

struct Search<'a> {
    theory: &'a Theory,
    premises: &'a [Formula],
    nodes_left: u64,
}

impl<'a> Search<'a> {
    fn prove(&mut self, ctx: &[ProofTerm], goal: &Formula, depth: u32) -> Option<ProofTerm> {
        if depth == 0 || self.nodes_left == 0 {
            return None;
        }
        self.nodes_left -= 1;

        // exact hypothesis or premise
        if let Some(t) = ctx.iter().find(|t| &t.conclusion == goal) {
            return Some(t.clone());
        }
        if let Some(i) = self.premises.iter().position(|p| p == goal) {
            return Some(premise(i + 1, goal.clone()));
        }

        if let Some(t) = self.intro(ctx, goal, depth) {
            return Some(t);
        }
        self.eliminate(ctx, goal, depth)
    }

    fn intro(&mut self, ctx: &[ProofTerm], goal: &Formula, depth: u32) -> Option<ProofTerm> {
        match goal {
            Formula::Imp(a, b) => {
                let x = fresh_hyp();
                let mut ctx2 = ctx.to_vec();
                ctx2.push(hyp(x, a.as_ref().clone()));
                let body = self.prove(&ctx2, b, depth - 1)?;
                Some(lam(x, a.as_ref().clone(), body))
            }
            Formula::And(a, b) => {
                let ta = self.prove(ctx, a, depth - 1)?;
                let tb = self.prove(ctx, b, depth - 1)?;
                Some(pair(ta, tb))
            }
            Formula::Or(a, b) => {
                if let Some(ta) = self.prove(ctx, a, depth - 1) {
                    return Some(app(
                        schema(SchemaId::OrInl, &[a.as_ref().clone(), b.as_ref().clone()]),
                        ta,
                    ));
                }
                let tb = self.prove(ctx, b, depth - 1)?;
                Some(app(
                    schema(SchemaId::OrInr, &[a.as_ref().clone(), b.as_ref().clone()]),
                    tb,
                ))
            }
            Formula::Boxed(body) => self.intro_box(ctx, body, depth),
            Formula::Var(i) => {
                let a_i = self.theory.defining_body(*i)?.clone();
                let t = self.prove(ctx, &a_i, depth - 1)?;
                Some(app(defining(self.theory, *i, Direction::Backward), t))
            }
            Formula::Bottom => None,
        }
    }

    fn intro_box(&mut self, ctx: &[ProofTerm], body: &Formula, depth: u32) -> Option<ProofTerm> {
        // try A -> []A first: it subsumes the distribution routes whenever
        // the unboxed body is provable
        if let Some(t) = self.prove(ctx, body, depth - 1) {
            return Some(app(
                schema(SchemaId::BoxIntro, std::slice::from_ref(body)),
                t,
            ));
        }
        match body {
            Formula::Or(x, y) => {
                let sub = Formula::or(
                    Formula::boxed(x.as_ref().clone()),
                    Formula::boxed(y.as_ref().clone()),
                );
                let t = self.prove(ctx, &sub, depth - 1)?;
                Some(app(
                    schema(
                        SchemaId::BoxOrBwd,
                        &[x.as_ref().clone(), y.as_ref().clone()],
                    ),
                    t,
                ))
            }
            Formula::And(x, y) => {
                let sub = Formula::and(
                    Formula::boxed(x.as_ref().clone()),
                    Formula::boxed(y.as_ref().clone()),
                );
                let t = self.prove(ctx, &sub, depth - 1)?;
                Some(app(
                    schema(
                        SchemaId::BoxAndBwd,
                        &[x.as_ref().clone(), y.as_ref().clone()],
                    ),
                    t,
                ))
            }
            Formula::Imp(x, y) if self.theory.variant == Variant::Strengthened => {
                let sub = Formula::imp(
                    Formula::boxed(x.as_ref().clone()),
                    Formula::boxed(y.as_ref().clone()),
                );
                let t = self.prove(ctx, &sub, depth - 1)?;
                Some(app(
                    schema(
                        SchemaId::BoxImpConv,
                        &[x.as_ref().clone(), y.as_ref().clone()],
                    ),
                    t,
                ))
            }
            Formula::Var(i) => {
                let a_i = self.theory.defining_body(*i)?.clone();
                let t = self.prove(ctx, &Formula::boxed(a_i), depth - 1)?;
                Some(app(
                    box_mono(defining(self.theory, *i, Direction::Backward)),
                    t,
                ))
            }
            _ => None,
        }
    }

    fn eliminate(&mut self, ctx: &[ProofTerm], goal: &Formula, depth: u32) -> Option<ProofTerm> {
        for (idx, entry) in ctx.iter().enumerate() {
            let mut rest: Vec<ProofTerm> = ctx.to_vec();
            rest.remove(idx);
            match entry.conclusion.clone() {
                Formula::Bottom if self.theory.variant == Variant::Strengthened => {
                    return Some(app(
                        schema(SchemaId::ExFalso, std::slice::from_ref(goal)),
                        entry.clone(),
                    ));
                }
                Formula::And(a, b) => {
                    let mut ctx2 = rest.clone();
                    ctx2.push(app(
                        schema(SchemaId::AndLeft, &[a.as_ref().clone(), b.as_ref().clone()]),
                        entry.clone(),
                    ));
                    ctx2.push(app(
                        schema(
                            SchemaId::AndRight,
                            &[a.as_ref().clone(), b.as_ref().clone()],
                        ),
                        entry.clone(),
                    ));
                    if let Some(t) = self.prove(&ctx2, goal, depth - 1) {
                        return Some(t);
                    }
                }
                Formula::Or(a, b) => {
                    let xa = fresh_hyp();
                    let mut left_ctx = rest.clone();
                    left_ctx.push(hyp(xa, a.as_ref().clone()));
                    let Some(ta) = self.prove(&left_ctx, goal, depth - 1) else {
                        continue;
                    };
                    let xb = fresh_hyp();
                    let mut right_ctx = rest.clone();
                    right_ctx.push(hyp(xb, b.as_ref().clone()));
                    let Some(tb) = self.prove(&right_ctx, goal, depth - 1) else {
                        continue;
                    };
                    return Some(case(
                        entry.clone(),
                        lam(xa, a.as_ref().clone(), ta),
                        lam(xb, b.as_ref().clone(), tb),
                    ));
                }
                Formula::Imp(a, _) => {
                    if let Some(ta) = self.prove(&rest, &a, depth - 1) {
                        let mut ctx2 = rest.clone();
                        ctx2.push(app(entry.clone(), ta));
                        if let Some(t) = self.prove(&ctx2, goal, depth - 1) {
                            return Some(t);
                        }
                    }
                }
                Formula::Var(i) => {
                    if self.theory.defining_body(i).is_some() {
                        let mut ctx2 = rest.clone();
                        ctx2.push(app(
                            defining(self.theory, i, Direction::Forward),
                            entry.clone(),
                        ));
                        if let Some(t) = self.prove(&ctx2, goal, depth - 1) {
                            return Some(t);
                        }
                    }
                }
                Formula::Boxed(inner) => {
                    let distributed = match inner.as_ref() {
                        Formula::And(x, y) => Some(app(
                            schema(
                                SchemaId::BoxAndFwd,
                                &[x.as_ref().clone(), y.as_ref().clone()],
                            ),
                            entry.clone(),
                        )),
                        Formula::Or(x, y) => Some(app(
                            schema(
                                SchemaId::BoxOrFwd,
                                &[x.as_ref().clone(), y.as_ref().clone()],
                            ),
                            entry.clone(),
                        )),
                        Formula::Imp(x, y) => Some(app(
                            schema(SchemaId::BoxImp, &[x.as_ref().clone(), y.as_ref().clone()]),
                            entry.clone(),
                        )),
                        Formula::Var(i) if self.theory.defining_body(*i).is_some() => Some(app(
                            box_mono(defining(self.theory, *i, Direction::Forward)),
                            entry.clone(),
                        )),
                        _ => None,
                    };
                    if let Some(derived) = distributed {
                        let mut ctx2 = rest.clone();
                        ctx2.push(derived);
                        if let Some(t) = self.prove(&ctx2, goal, depth - 1) {
                            return Some(t);
                        }
                    }
                }
                _ => {}
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::formula::parse;

    fn prove_ok(theory: &Theory, goal: &str, budget: u32) -> Derivation {
        let goal = parse(goal).unwrap();
        match bounded_modal_prove(theory, &goal, budget) {
            ProveOutcome::Found(d) => {
                check_derivation(theory, &d).expect("prover output must check");
                assert_eq!(d.conclusion(), Some(&goal));
                d
            }
            ProveOutcome::BudgetExhausted => panic!("expected a proof of {goal}"),
        }
    }

    fn exhausted(theory: &Theory, goal: &str, budget: u32) {
        let goal = parse(goal).unwrap();
        assert_eq!(
            bounded_modal_prove(theory, &goal, budget),
            ProveOutcome::BudgetExhausted
        );
    }

    #[test]
    fn identity_tautology() {
        let t = Theory::new(Variant::Standard, vec![(1, parse("~[]p1").unwrap())]);
        prove_ok(&t, "[][]p1 -> [][]p1", 6);
    }

    #[test]
    fn chained_box_intro() {
        let t = Theory::new(Variant::Standard, vec![(1, parse("~[]p1").unwrap())]);
        prove_ok(&t, "p1 -> [][][]p1", 8);
    }

    #[test]
    fn unboxing_is_never_proved() {
        let t = Theory::empty(Variant::Standard);
        exhausted(&t, "[]bot -> bot", 12);
        exhausted(&t, "[]p1 -> p1", 12);
        let s = Theory::empty(Variant::Strengthened);
        exhausted(&s, "[]bot -> bot", 10);
    }

    #[test]
    fn box_distributions() {
        let t = Theory::empty(Variant::Standard);
        prove_ok(&t, "[](p1 & p2) -> []p2 & []p1", 10);
        prove_ok(&t, "[]p1 | []p2 -> [](p1 | p2)", 10);
        prove_ok(&t, "[](p1 -> p2) -> ([]p1 -> []p2)", 10);
    }

    #[test]
    fn defining_axiom_use() {
        // p1 <-> []~p1: assuming p1 yields a boxed contradiction source
        let t = Theory::new(Variant::Standard, vec![(1, parse("[]~p1").unwrap())]);
        prove_ok(&t, "p1 -> [](p1 -> bot)", 10);
    }

    #[test]
    fn premises_are_admitted() {
        let t = Theory::empty(Variant::Standard);
        let goal = parse("[]p2").unwrap();
        let premises = vec![parse("[]p1").unwrap(), parse("[](p1 -> p2)").unwrap()];
        match bounded_modal_prove_with_premises(&t, &premises, &goal, 8) {
            ProveOutcome::Found(d) => {
                check_derivation(&t, &d).unwrap();
                assert_eq!(d.conclusion(), Some(&goal));
            }
            ProveOutcome::BudgetExhausted => panic!("expected a proof"),
        }
    }

    #[test]
    fn ex_falso_only_when_strengthened() {
        let strengthened = Theory::empty(Variant::Strengthened);
        prove_ok(&strengthened, "bot -> p1 & p2", 8);
        let standard = Theory::empty(Variant::Standard);
        exhausted(&standard, "bot -> p1 & p2", 8);
    }
}
