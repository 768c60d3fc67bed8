//! The consistency-proof engine: rejection sets over a finite closure.
//!
//! The engine traces an increasing sequence of sets T_k — the formulas
//! determined not to be acceptable, restricted to a finite subformula
//! closure — until two consecutive stages agree. Membership rules, by
//! induction on (stage, level):
//!
//! - `bot` belongs to every stage;
//! - `[]A` belongs to stage k iff k > 1 and A belongs to stage k-1;
//! - no other level-1 formula belongs to stage 1;
//! - `A & B` belongs iff A or B does; `A | B` iff both do;
//! - `pi` belongs iff its defining body does;
//! - `A -> B` belongs to stage k iff for some j <= k, B belongs to
//!   stage j while A does not.
//!
//! Membership in the union F is decided by stabilization: a formula of
//! the closure is in F iff it has entered by the stabilized stage.

use crate::formula::Formula;
use crate::theory::{schema_instance, Direction, SchemaId, Theory, TheoryError, Variant};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// A finite set of formulas closed under immediate subformulas, box
/// children, and defining-axiom unfolding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Closure {
    pub formulas: BTreeSet<Formula>,
}

impl Closure {
    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// Default stage budget: the stabilization argument bounds the number
    /// of strictly growing stages by the closure size; two more stages
    /// serve as the verification margin.
    pub fn default_max_stages(&self) -> usize {
        self.len() + 2
    }
}

/// Builds the smallest closure containing the seeds and `bot`.
pub fn build_closure(theory: &Theory, seeds: &[Formula]) -> Result<Closure, TheoryError> {
    for seed in seeds {
        theory.check_vars(seed)?;
    }
    let mut formulas = BTreeSet::new();
    let mut work: Vec<Formula> = seeds.to_vec();
    work.push(Formula::Bottom);
    while let Some(f) = work.pop() {
        if formulas.contains(&f) {
            continue;
        }
        match &f {
            Formula::Bottom => {}
            Formula::Var(i) => {
                let body = theory
                    .defining_body(*i)
                    .ok_or(TheoryError::UndeclaredVar(*i))?;
                work.push(body.clone());
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                work.push(a.as_ref().clone());
                work.push(b.as_ref().clone());
            }
            Formula::Boxed(a) => work.push(a.as_ref().clone()),
        }
        formulas.insert(f);
    }
    Ok(Closure { formulas })
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FilterError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error("trace did not stabilize within {max_stages} stages")]
    DidNotStabilize { max_stages: usize },
}

// Interned node shape with child ids.
#[derive(Debug, Clone, Copy)]
enum NodeKind {
    Bot,
    Boxed(usize),
    Var(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
}

/// The stabilized stage sequence over a closure.
#[derive(Debug, Clone)]
pub struct FilterTrace {
    formulas: Vec<Formula>,
    index: HashMap<Formula, usize>,
    /// `stages[k-1][id]` = formula `id` belongs to T_k.
    stages: Vec<Vec<bool>>,
    /// First k with T_k = T_{k+1}.
    pub stabilized_at: usize,
    entry: Vec<Option<usize>>,
}

impl FilterTrace {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn closure_size(&self) -> usize {
        self.formulas.len()
    }

    /// Membership of `f` in T_k; `None` if `f` is outside the closure or
    /// `k` outside the recorded stages.
    pub fn contains_at(&self, f: &Formula, k: usize) -> Option<bool> {
        let id = *self.index.get(f)?;
        if k == 0 || k > self.stages.len() {
            return None;
        }
        Some(self.stages[k - 1][id])
    }

    /// Entry stage of `f`: `Some(Some(k))` if it enters at stage k,
    /// `Some(None)` if it never enters within the trace, `None` if `f` is
    /// outside the closure.
    pub fn entry_stage(&self, f: &Formula) -> Option<Option<usize>> {
        let id = *self.index.get(f)?;
        Some(self.entry[id])
    }

    /// Membership in F (the union of all stages), decided by stabilization.
    pub fn in_filter(&self, f: &Formula) -> Option<bool> {
        self.entry_stage(f).map(|e| e.is_some())
    }

    pub fn entry_stages(&self) -> BTreeMap<Formula, Option<usize>> {
        self.formulas
            .iter()
            .cloned()
            .zip(self.entry.iter().copied())
            .collect()
    }

    pub fn stage(&self, k: usize) -> Option<BTreeSet<Formula>> {
        if k == 0 || k > self.stages.len() {
            return None;
        }
        Some(
            self.stages[k - 1]
                .iter()
                .enumerate()
                .filter(|(_, m)| **m)
                .map(|(id, _)| self.formulas[id].clone())
                .collect(),
        )
    }
}

/// Computes stages T_1, T_2, ... over the closure until stabilization,
/// then verifies two further stages. Errors if `max_stages` is reached
/// without two equal consecutive stages.
pub fn stabilize(
    theory: &Theory,
    closure: &Closure,
    max_stages: usize,
) -> Result<FilterTrace, FilterError> {
    let formulas: Vec<Formula> = closure.formulas.iter().cloned().collect();
    let index: HashMap<Formula, usize> = formulas
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();

    let mut kinds = Vec::with_capacity(formulas.len());
    let mut levels = Vec::with_capacity(formulas.len());
    for f in &formulas {
        let kind = match f {
            Formula::Bottom => NodeKind::Bot,
            Formula::Boxed(a) => NodeKind::Boxed(index[a.as_ref()]),
            Formula::Var(i) => {
                let body = theory
                    .defining_body(*i)
                    .ok_or(TheoryError::UndeclaredVar(*i))?;
                NodeKind::Var(index[body])
            }
            Formula::And(a, b) => NodeKind::And(index[a.as_ref()], index[b.as_ref()]),
            Formula::Or(a, b) => NodeKind::Or(index[a.as_ref()], index[b.as_ref()]),
            Formula::Imp(a, b) => NodeKind::Imp(index[a.as_ref()], index[b.as_ref()]),
        };
        kinds.push(kind);
        levels.push(theory.level(f)?);
    }

    let mut order: Vec<usize> = (0..formulas.len()).collect();
    order.sort_by_key(|&id| levels[id]);

    let mut stages: Vec<Vec<bool>> = Vec::new();
    let mut entry: Vec<Option<usize>> = vec![None; formulas.len()];
    // for implications: whether a witness stage j has been seen already
    let mut witnessed: Vec<bool> = vec![false; formulas.len()];

    let mut stabilized_at = None;
    for k in 1..=max_stages {
        let mut current = vec![false; formulas.len()];
        for &id in &order {
            let member = match kinds[id] {
                NodeKind::Bot => true,
                NodeKind::Boxed(a) => k > 1 && stages[k - 2][a],
                NodeKind::Var(body) => current[body],
                NodeKind::And(a, b) => current[a] || current[b],
                NodeKind::Or(a, b) => current[a] && current[b],
                NodeKind::Imp(a, b) => {
                    if !witnessed[id] && current[b] && !current[a] {
                        witnessed[id] = true;
                    }
                    witnessed[id]
                }
            };
            current[id] = member;
            if member && entry[id].is_none() {
                entry[id] = Some(k);
            }
        }
        let stable = stages.last().map(|prev| prev == &current).unwrap_or(false);
        stages.push(current);
        if stable {
            stabilized_at = Some(k - 1);
            break;
        }
    }

    let Some(stabilized_at) = stabilized_at else {
        return Err(FilterError::DidNotStabilize { max_stages });
    };

    // two extra stages beyond the detecting pair confirm stability
    for extra in 0..2 {
        let k = stabilized_at + 2 + extra;
        let mut current = vec![false; formulas.len()];
        for &id in &order {
            let member = match kinds[id] {
                NodeKind::Bot => true,
                NodeKind::Boxed(a) => stages[k - 2][a],
                NodeKind::Var(body) => current[body],
                NodeKind::And(a, b) => current[a] || current[b],
                NodeKind::Or(a, b) => current[a] && current[b],
                NodeKind::Imp(a, b) => {
                    if !witnessed[id] && current[b] && !current[a] {
                        witnessed[id] = true;
                    }
                    witnessed[id]
                }
            };
            current[id] = member;
        }
        debug_assert_eq!(stages[stabilized_at - 1], current, "stage {k} regrew");
        if stages[stabilized_at - 1] != current {
            return Err(FilterError::DidNotStabilize { max_stages });
        }
        stages.push(current);
    }

    Ok(FilterTrace {
        formulas,
        index,
        stages,
        stabilized_at,
        entry,
    })
}

/// Decides membership of `f` in F_k by direct recursion on (stage, level).
/// Independent of the trace engine; the two are cross-checked in tests.
pub fn in_fk(theory: &Theory, f: &Formula, k: usize) -> Result<bool, TheoryError> {
    assert!(k >= 1, "stages are 1-based");
    // level computation also rejects undeclared variables and unguarded
    // cycles reachable from f, which the recursion below relies on
    theory.level(f)?;
    let mut memo = HashMap::new();
    Ok(in_fk_rec(theory, f, k, &mut memo))
}

fn in_fk_rec(
    theory: &Theory,
    f: &Formula,
    k: usize,
    memo: &mut HashMap<(Formula, usize), bool>,
) -> bool {
    if let Some(&m) = memo.get(&(f.clone(), k)) {
        return m;
    }
    let result = match f {
        Formula::Bottom => true,
        Formula::Boxed(a) => k > 1 && in_fk_rec(theory, a, k - 1, memo),
        Formula::Var(i) => {
            let body = theory.defining_body(*i).expect("checked by level");
            in_fk_rec(theory, &body.clone(), k, memo)
        }
        Formula::And(a, b) => in_fk_rec(theory, a, k, memo) || in_fk_rec(theory, b, k, memo),
        Formula::Or(a, b) => in_fk_rec(theory, a, k, memo) && in_fk_rec(theory, b, k, memo),
        Formula::Imp(a, b) => {
            (1..=k).any(|j| in_fk_rec(theory, b, j, memo) && !in_fk_rec(theory, a, j, memo))
        }
    };
    memo.insert((f.clone(), k), result);
    result
}

// ---------------------------------------------------------------------------
// Consistency reports

/// A counterexample found by the report checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportViolation {
    BottomNotRejected,
    /// An axiom of the system entered the filter.
    AxiomInFilter {
        axiom: Formula,
        entry_stage: usize,
    },
    /// `A` and `A -> B` stay out of the filter but `B` entered.
    ModusPonensEscape {
        arg: Formula,
        imp: Formula,
        conclusion: Formula,
    },
    /// `[]A` stays out of the filter but `A` entered.
    UnboxEscape {
        boxed: Formula,
        body: Formula,
    },
}

/// The consistency report over a sample closure.
#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub theory_hash: String,
    pub variant: Variant,
    pub closure_size: usize,
    pub stabilized_at: usize,
    /// Rendered formula -> entry stage (`null` = never entered).
    pub entry_stages: BTreeMap<String, Option<usize>>,
    pub bottom_in_filter: bool,
    pub axiom_instances_checked: usize,
    pub modus_ponens_pairs_checked: usize,
    pub unbox_pairs_checked: usize,
    pub violations: Vec<ReportViolation>,
    pub passed: bool,
}

/// Every defining-axiom direction plus every available schema instance
/// with metavariables drawn from the sample.
pub fn axiom_instances_over(theory: &Theory, sample: &Closure) -> Vec<Formula> {
    let mut out = Vec::new();
    for (i, _) in &theory.defining_axioms {
        out.push(theory.defining_direction(*i, Direction::Forward).unwrap());
        out.push(theory.defining_direction(*i, Direction::Backward).unwrap());
    }
    let pool: Vec<&Formula> = sample.formulas.iter().collect();
    for schema in SchemaId::ALL {
        if !schema.available_in(theory.variant) {
            continue;
        }
        match schema.arity() {
            1 => {
                for a in &pool {
                    out.push(schema_instance(schema, &[(*a).clone()]).unwrap());
                }
            }
            2 => {
                for a in &pool {
                    for b in &pool {
                        out.push(schema_instance(schema, &[(*a).clone(), (*b).clone()]).unwrap());
                    }
                }
            }
            _ => {
                for a in &pool {
                    for b in &pool {
                        for c in &pool {
                            out.push(
                                schema_instance(
                                    schema,
                                    &[(*a).clone(), (*b).clone(), (*c).clone()],
                                )
                                .unwrap(),
                            );
                        }
                    }
                }
            }
        }
    }
    out
}

/// Runs the theorem's checks over the sample: `bot` is rejected, no axiom
/// instance over the sample enters F, and the complement of F is closed
/// under modus ponens and unbox.
pub fn consistency_report(
    theory: &Theory,
    sample: &Closure,
    trace: &FilterTrace,
) -> Result<ConsistencyReport, FilterError> {
    let mut violations = Vec::new();

    let bottom_in_filter = trace.in_filter(&Formula::Bottom).unwrap_or(false);
    if !bottom_in_filter {
        violations.push(ReportViolation::BottomNotRejected);
    }

    // axiom instances may leave the sample closure; stabilize an extended
    // closure that contains them all
    let axioms = axiom_instances_over(theory, sample);
    let mut seeds: Vec<Formula> = sample.formulas.iter().cloned().collect();
    seeds.extend(axioms.iter().cloned());
    let extended = build_closure(theory, &seeds)?;
    let extended_trace = stabilize(theory, &extended, extended.default_max_stages())?;
    for axiom in &axioms {
        if let Some(Some(stage)) = extended_trace.entry_stage(axiom) {
            violations.push(ReportViolation::AxiomInFilter {
                axiom: axiom.clone(),
                entry_stage: stage,
            });
        }
    }

    let mut mp_pairs = 0;
    let mut unbox_pairs = 0;
    for f in &sample.formulas {
        match f {
            Formula::Imp(a, b) => {
                mp_pairs += 1;
                let arg_out = !trace.in_filter(a).unwrap_or(true);
                let imp_out = !trace.in_filter(f).unwrap_or(true);
                let conclusion_out = !trace.in_filter(b).unwrap_or(true);
                if arg_out && imp_out && !conclusion_out {
                    violations.push(ReportViolation::ModusPonensEscape {
                        arg: a.as_ref().clone(),
                        imp: f.clone(),
                        conclusion: b.as_ref().clone(),
                    });
                }
            }
            Formula::Boxed(a) => {
                unbox_pairs += 1;
                let boxed_out = !trace.in_filter(f).unwrap_or(true);
                let body_out = !trace.in_filter(a).unwrap_or(true);
                if boxed_out && !body_out {
                    violations.push(ReportViolation::UnboxEscape {
                        boxed: f.clone(),
                        body: a.as_ref().clone(),
                    });
                }
            }
            _ => {}
        }
    }

    let entry_stages = trace
        .entry_stages()
        .into_iter()
        .map(|(f, e)| (f.to_string(), e))
        .collect();

    let passed = violations.is_empty();
    Ok(ConsistencyReport {
        theory_hash: theory.hash(),
        variant: theory.variant,
        closure_size: sample.len(),
        stabilized_at: trace.stabilized_at,
        entry_stages,
        bottom_in_filter,
        axiom_instances_checked: axioms.len(),
        modus_ponens_pairs_checked: mp_pairs,
        unbox_pairs_checked: unbox_pairs,
        violations,
        passed,
    })
}
