//! The Attacker/Defender box-insertion game.
//!
//! The game is played over the atomic occurrences of a formula or
//! sequent, in the canonical schedule: conjunctions and disjunctions
//! left to right, implication premises first with roles switched, boxes
//! transparent. On a sequent, antecedent formulas are played left to
//! right with roles switched, then the succedent in original roles. The
//! player moving at an occurrence prefixes it with `[]^k` for a chosen
//! k; Defender moves on positive occurrences.
//!
//! Strategies are terms over earlier moves. A defender strategy
//! extracted from a G1 proof also yields, for every realized play, a
//! derivation of the resulting boxed formula in the modal system —
//! the effective content of the winning-strategy theorem.

use crate::derivation::{check_derivation, Derivation};
use crate::formula::{atomic_occurrences_from, Formula, Mover, OccurrencePath, Polarity};
use crate::proofterm::{
    and_map, app, box_mono, case, compile, fresh_hyp, hyp, identity, imp_map, lam, or_map, pair,
    raise, schema, ProofTerm,
};
use crate::prover::{bounded_modal_prove, ProveOutcome};
use crate::sequent::{check_tree, LogicVariant, ProofTree, RuleLabel, Sequent, TreeError};
use crate::theory::{SchemaId, Theory};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::Range;
use std::rc::Rc;
use thiserror::Error;

/// Which side of a sequent a slot lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Antecedent,
    Succedent,
}

/// One move site: an atomic occurrence of one subject formula, with its
/// arena polarity (already flipped for antecedent formulas).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArenaSlot {
    pub side: Side,
    /// Index of the formula within its side.
    pub formula: usize,
    pub occurrence: OccurrencePath,
}

/// The game board: a subject and its move schedule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arena {
    pub subject: Sequent,
    pub slots: Vec<ArenaSlot>,
}

impl Arena {
    pub fn for_sequent(subject: &Sequent) -> Arena {
        let mut slots = Vec::new();
        for (idx, f) in subject.antecedent.iter().enumerate() {
            for occ in atomic_occurrences_from(f, Polarity::Negative) {
                slots.push(ArenaSlot {
                    side: Side::Antecedent,
                    formula: idx,
                    occurrence: occ,
                });
            }
        }
        for (idx, f) in subject.succedent.iter().enumerate() {
            for occ in atomic_occurrences_from(f, Polarity::Positive) {
                slots.push(ArenaSlot {
                    side: Side::Succedent,
                    formula: idx,
                    occurrence: occ,
                });
            }
        }
        Arena {
            subject: subject.clone(),
            slots,
        }
    }

    pub fn for_formula(subject: &Formula) -> Arena {
        Arena::for_sequent(&Sequent::goal(subject.clone()))
    }

    pub fn mover(&self, slot: usize) -> Mover {
        self.slots[slot].occurrence.mover
    }

    pub fn slots_of(&self, mover: Mover) -> Vec<usize> {
        (0..self.slots.len())
            .filter(|&i| self.mover(i) == mover)
            .collect()
    }

    /// Slot ranges per subject formula, antecedent first.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for f in &self.subject.antecedent {
            let n = f.atom_count();
            out.push(start..start + n);
            start += n;
        }
        for f in &self.subject.succedent {
            let n = f.atom_count();
            out.push(start..start + n);
            start += n;
        }
        out
    }

    /// The subject with the realized box prefixes inserted.
    pub fn realized(&self, values: &[u32]) -> Sequent {
        assert_eq!(values.len(), self.slots.len());
        let blocks = self.blocks();
        let n = self.subject.antecedent.len();
        let boxed = |idx: usize, f: &Formula| f.apply_boxes(&values[blocks[idx].clone()]);
        Sequent {
            antecedent: self
                .subject
                .antecedent
                .iter()
                .enumerate()
                .map(|(i, f)| boxed(i, f))
                .collect(),
            succedent: self
                .subject
                .succedent
                .iter()
                .enumerate()
                .map(|(i, f)| boxed(n + i, f))
                .collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Strategies

/// A strategy term: a monotone function of earlier moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Term {
    Const { value: u32 },
    Move { slot: usize },
    Max { left: Box<Term>, right: Box<Term> },
    Plus { term: Box<Term>, add: u32 },
}

impl Term {
    pub fn constant(value: u32) -> Term {
        Term::Const { value }
    }

    pub fn move_ref(slot: usize) -> Term {
        Term::Move { slot }
    }

    pub fn max(left: Term, right: Term) -> Term {
        Term::Max {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn plus(term: Term, add: u32) -> Term {
        Term::Plus {
            term: Box::new(term),
            add,
        }
    }

    pub fn eval(&self, history: &[u32]) -> Result<u32, GameError> {
        match self {
            Term::Const { value } => Ok(*value),
            Term::Move { slot } => history
                .get(*slot)
                .copied()
                .ok_or(GameError::ForwardReference { referenced: *slot }),
            Term::Max { left, right } => Ok(left.eval(history)?.max(right.eval(history)?)),
            Term::Plus { term, add } => Ok(term.eval(history)?.saturating_add(*add)),
        }
    }

    /// Largest referenced slot, if any.
    pub fn max_reference(&self) -> Option<usize> {
        match self {
            Term::Const { .. } => None,
            Term::Move { slot } => Some(*slot),
            Term::Max { left, right } => left.max_reference().max(right.max_reference()),
            Term::Plus { term, .. } => term.max_reference(),
        }
    }

    fn remap(&self, map: &[usize]) -> Term {
        match self {
            Term::Const { value } => Term::Const { value: *value },
            Term::Move { slot } => Term::Move { slot: map[*slot] },
            Term::Max { left, right } => Term::max(left.remap(map), right.remap(map)),
            Term::Plus { term, add } => Term::plus(term.remap(map), *add),
        }
    }
}

/// A strategy: one term per owned slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Strategy {
    pub terms: BTreeMap<usize, Term>,
}

impl Strategy {
    pub fn constant(arena: &Arena, mover: Mover, value: u32) -> Strategy {
        Strategy {
            terms: arena
                .slots_of(mover)
                .into_iter()
                .map(|s| (s, Term::constant(value)))
                .collect(),
        }
    }

    /// Checks the strategy covers exactly the slots of `mover` and only
    /// references strictly earlier slots.
    pub fn validate(&self, arena: &Arena, mover: Mover) -> Result<(), GameError> {
        let owned = arena.slots_of(mover);
        for &slot in &owned {
            let Some(term) = self.terms.get(&slot) else {
                return Err(GameError::MissingSlot { slot });
            };
            if let Some(r) = term.max_reference() {
                if r >= slot {
                    return Err(GameError::IllFoundedMove {
                        slot,
                        referenced: r,
                    });
                }
            }
        }
        for slot in self.terms.keys() {
            if !owned.contains(slot) {
                return Err(GameError::UnownedSlot { slot: *slot });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("strategy defines no move for slot {slot}")]
    MissingSlot { slot: usize },
    #[error("strategy defines a move for slot {slot}, which it does not own")]
    UnownedSlot { slot: usize },
    #[error("move for slot {slot} references slot {referenced}, which is not earlier")]
    IllFoundedMove { slot: usize, referenced: usize },
    #[error("term references slot {referenced} beyond the played history")]
    ForwardReference { referenced: usize },
    #[error("assignments are not pointwise dominated at occurrence {at}")]
    NotDominated { at: usize },
}

/// Outcome of one play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayResult {
    pub subject: Sequent,
    /// The realized subject folded into one formula.
    pub boxed: Formula,
    pub boxed_sequent: Sequent,
    /// Realized move values in schedule order.
    pub transcript: Vec<u32>,
    pub certificate: Option<Derivation>,
}

fn fold_sequent(seq: &Sequent) -> Formula {
    let suc = match seq.succedent.len() {
        0 => Formula::Bottom,
        _ => seq.succedent.iter().cloned().reduce(Formula::or).unwrap(),
    };
    match seq.antecedent.len() {
        0 => suc,
        _ => {
            let ant = seq.antecedent.iter().cloned().reduce(Formula::and).unwrap();
            Formula::imp(ant, suc)
        }
    }
}

/// Plays the game: moves are evaluated in schedule order with full
/// history visibility.
pub fn play(
    arena: &Arena,
    defender: &Strategy,
    attacker: &Strategy,
) -> Result<PlayResult, GameError> {
    defender.validate(arena, Mover::Defender)?;
    attacker.validate(arena, Mover::Attacker)?;
    let mut values = Vec::with_capacity(arena.slots.len());
    for i in 0..arena.slots.len() {
        let term = match arena.mover(i) {
            Mover::Defender => &defender.terms[&i],
            Mover::Attacker => &attacker.terms[&i],
        };
        let v = term.eval(&values)?;
        values.push(v);
    }
    let boxed_sequent = arena.realized(&values);
    Ok(PlayResult {
        subject: arena.subject.clone(),
        boxed: fold_sequent(&boxed_sequent),
        boxed_sequent,
        transcript: values,
        certificate: None,
    })
}

// ---------------------------------------------------------------------------
// The monotonicity lemma, with certificates

/// For a template `f` and box assignments `u`, `v` over its atomic
/// occurrences (schedule order): if `u <= v` at every positive occurrence
/// and `u >= v` at every negative one, builds a proof of
/// `f[u] -> f[v]`.
pub fn monotonicity_cert(f: &Formula, u: &[u32], v: &[u32]) -> Result<ProofTerm, GameError> {
    assert_eq!(u.len(), f.atom_count());
    assert_eq!(v.len(), f.atom_count());
    if u == v {
        return Ok(identity(&f.apply_boxes(u)));
    }
    let mut cursor = 0;
    mono_rec(f, u, v, &mut cursor)
}

fn mono_rec(f: &Formula, u: &[u32], v: &[u32], cursor: &mut usize) -> Result<ProofTerm, GameError> {
    match f {
        Formula::Bottom | Formula::Var(_) => {
            let at = *cursor;
            *cursor += 1;
            if u[at] > v[at] {
                return Err(GameError::NotDominated { at });
            }
            Ok(raise(f, u[at], v[at]))
        }
        Formula::And(a, b) => {
            let ta = mono_rec(a, u, v, cursor)?;
            let tb = mono_rec(b, u, v, cursor)?;
            Ok(and_map(ta, tb))
        }
        Formula::Or(a, b) => {
            let ta = mono_rec(a, u, v, cursor)?;
            let tb = mono_rec(b, u, v, cursor)?;
            Ok(or_map(ta, tb))
        }
        Formula::Imp(a, b) => {
            // premise flips: build a[v] -> a[u]
            let ta = mono_rec(a, v, u, cursor)?;
            let tb = mono_rec(b, u, v, cursor)?;
            Ok(imp_map(ta, tb))
        }
        Formula::Boxed(a) => Ok(box_mono(mono_rec(a, u, v, cursor)?)),
    }
}

// ---------------------------------------------------------------------------
// Strategy extraction from G1 proof trees

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("certificates for classical trees have no modal counterpart")]
    ClassicalUnsupported,
    #[error("tree fails checking: {0}")]
    Tree(#[from] TreeError),
    #[error(
        "extracted move for slot {slot} would reference the later slot {referenced}; \
             no strategy in the term language orders these moves"
    )]
    UnorderableMove { slot: usize, referenced: usize },
    #[error("the root sequent carries hypotheses; play certificates need an empty antecedent")]
    HypothesesRequired,
    #[error(transparent)]
    Game(#[from] GameError),
}

type Builder = Rc<dyn Fn(&[u32], &[ProofTerm]) -> ProofTerm>;

struct NodeExtract {
    arena: Arena,
    terms: BTreeMap<usize, Term>,
    builder: Builder,
}

/// A defender strategy with its certificate builder.
pub struct ExtractedDefender {
    pub arena: Arena,
    pub strategy: Strategy,
    logic: LogicVariant,
    node: Rc<NodeExtract>,
}

impl ExtractedDefender {
    /// The certificate proof term for one realized transcript.
    pub fn certificate_term(&self, transcript: &[u32]) -> Result<ProofTerm, ExtractError> {
        if !self.arena.subject.antecedent.is_empty() {
            return Err(ExtractError::HypothesesRequired);
        }
        Ok((self.node.builder)(transcript, &[]))
    }

    /// The certificate for one realized transcript: a derivation of the
    /// resulting boxed formula over the empty theory.
    pub fn certificate_for(&self, transcript: &[u32]) -> Result<Derivation, ExtractError> {
        let term = self.certificate_term(transcript)?;
        Ok(compile(&term, &[]).expect("closed certificate"))
    }

    /// Plays against an attacker strategy and attaches the certificate.
    pub fn play_against(&self, attacker: &Strategy) -> Result<PlayResult, ExtractError> {
        let mut result = play(&self.arena, &self.strategy, attacker)?;
        result.certificate = Some(self.certificate_for(&result.transcript)?);
        Ok(result)
    }

    pub fn logic(&self) -> LogicVariant {
        self.logic
    }
}

/// Extracts the inductive defender strategy from a checked proof tree.
/// The root may be any single-succedent sequent; play certificates are
/// available when the root antecedent is empty.
pub fn extract_defender_strategy(
    tree: &ProofTree,
    logic: LogicVariant,
) -> Result<ExtractedDefender, ExtractError> {
    if logic.certificate_variant().is_none() {
        return Err(ExtractError::ClassicalUnsupported);
    }
    check_tree(tree, logic)?;
    let node = extract_node(tree)?;
    let arena = node.arena.clone();
    let strategy = Strategy {
        terms: node.terms.clone(),
    };
    strategy.validate(&arena, Mover::Defender)?;
    Ok(ExtractedDefender {
        arena,
        strategy,
        logic,
        node: Rc::new(node),
    })
}

// The realized formula of one block.
fn realized_block(template: &Formula, counts: &[u32]) -> Formula {
    template.apply_boxes(counts)
}

// Hypothesis adjustment for context formulas: the parent plays at least
// as many boxes on defender slots, so parent implies child.
fn ctx_adjust(template: &Formula, parent: &[u32], child: &[u32], term: &ProofTerm) -> ProofTerm {
    if parent == child {
        return term.clone();
    }
    let mono = monotonicity_cert(template, parent, child)
        .expect("context assignments dominate by construction");
    app(mono, term.clone())
}

// Succedent lift: child plays at most as many boxes on defender slots.
fn suc_lift(template: &Formula, child: &[u32], parent: &[u32], term: ProofTerm) -> ProofTerm {
    if parent == child {
        return term;
    }
    let mono = monotonicity_cert(template, child, parent)
        .expect("succedent assignments dominate by construction");
    app(mono, term)
}

// Computes the child transcript: attacker slots copy the mapped parent
// value, defender slots evaluate the child's own terms.
fn eval_child_values(child: &NodeExtract, map: &[usize], parent_values: &[u32]) -> Vec<u32> {
    let mut values = Vec::with_capacity(child.arena.slots.len());
    for i in 0..child.arena.slots.len() {
        let v = match child.arena.mover(i) {
            Mover::Defender => child.terms[&i]
                .eval(&values)
                .expect("validated child strategy"),
            Mover::Attacker => parent_values[map[i]],
        };
        values.push(v);
    }
    values
}

// Merges child strategies into the parent arena. Shared parent slots
// (several children mapping onto them) take the pointwise max; defender
// slots with no image play 0.
fn merge_strategies(
    parent_arena: &Arena,
    children: &[(&NodeExtract, &[usize])],
) -> Result<BTreeMap<usize, Term>, ExtractError> {
    let mut merged: BTreeMap<usize, Term> = BTreeMap::new();
    for (child, map) in children {
        for (slot, term) in &child.terms {
            let target = map[*slot];
            let remapped = term.remap(map);
            if let Some(r) = remapped.max_reference() {
                if r >= target {
                    return Err(ExtractError::UnorderableMove {
                        slot: target,
                        referenced: r,
                    });
                }
            }
            merged
                .entry(target)
                .and_modify(|t| *t = Term::max(t.clone(), remapped.clone()))
                .or_insert(remapped);
        }
    }
    for slot in parent_arena.slots_of(Mover::Defender) {
        merged.entry(slot).or_insert(Term::constant(0));
    }
    Ok(merged)
}

// Block-local counts of a transcript.
fn counts(values: &[u32], range: &Range<usize>) -> Vec<u32> {
    values[range.clone()].to_vec()
}

fn extract_node(tree: &ProofTree) -> Result<NodeExtract, ExtractError> {
    let arena = Arena::for_sequent(&tree.sequent);
    let blocks = arena.blocks();
    let n = tree.sequent.antecedent.len();
    let ant = tree.sequent.antecedent.clone();
    let suc = tree.sequent.succedent[0].clone();
    let pos = tree.position;

    match tree.rule {
        RuleLabel::Ax => {
            let builder: Builder = Rc::new(move |_values, hyps| hyps[0].clone());
            Ok(NodeExtract {
                terms: BTreeMap::from([(1, Term::move_ref(0))]),
                arena,
                builder,
            })
        }
        RuleLabel::BotAx => {
            let atom = suc.clone();
            let builder: Builder = Rc::new(move |values, hyps| {
                let k = values[0];
                let mut lifted = schema(SchemaId::ExFalso, std::slice::from_ref(&atom));
                for _ in 0..k {
                    lifted = box_mono(lifted);
                }
                app(lifted, hyps[0].clone())
            });
            Ok(NodeExtract {
                terms: BTreeMap::from([(1, Term::move_ref(0))]),
                arena,
                builder,
            })
        }
        RuleLabel::AndL1 | RuleLabel::AndL2 | RuleLabel::OrR1 | RuleLabel::OrR2 => {
            // single-premise rules replacing one block by a sub-block
            let child = Rc::new(extract_node(&tree.children[0])?);
            let (block_idx, offset, keep_left) = match tree.rule {
                RuleLabel::AndL1 => (pos, 0, true),
                RuleLabel::AndL2 => {
                    let Formula::And(a, _) = &ant[pos] else {
                        unreachable!()
                    };
                    (pos, a.atom_count(), false)
                }
                RuleLabel::OrR1 => (n, 0, true),
                RuleLabel::OrR2 => {
                    let Formula::Or(a, _) = &suc else {
                        unreachable!()
                    };
                    (n, a.atom_count(), false)
                }
                _ => unreachable!(),
            };
            let map = sub_block_map(&arena, &child.arena, block_idx, offset);
            let terms = merge_strategies(&arena, &[(&child, &map)])?;
            let builder =
                single_premise_builder(tree.rule, keep_left, pos, ant, suc, blocks, n, child, map);
            Ok(NodeExtract {
                arena,
                terms,
                builder,
            })
        }
        RuleLabel::AndR => {
            let left = Rc::new(extract_node(&tree.children[0])?);
            let right = Rc::new(extract_node(&tree.children[1])?);
            let Formula::And(a, _) = suc.clone() else {
                unreachable!()
            };
            let map_l = sub_block_map(&arena, &left.arena, n, 0);
            let map_r = sub_block_map(&arena, &right.arena, n, a.atom_count());
            let terms = merge_strategies(&arena, &[(&left, &map_l), (&right, &map_r)])?;
            let ant_t = ant.clone();
            let blocks_t = blocks.clone();
            let builder: Builder = Rc::new(move |values, hyps| {
                let vl = eval_child_values(&left, &map_l, values);
                let vr = eval_child_values(&right, &map_r, values);
                let hl =
                    adjust_context_hyps(&ant_t, &blocks_t, values, &left.arena, &vl, hyps, &[]);
                let hr =
                    adjust_context_hyps(&ant_t, &blocks_t, values, &right.arena, &vr, hyps, &[]);
                let ta = (left.builder)(&vl, &hl);
                let tb = (right.builder)(&vr, &hr);
                // sub-blocks are single-source: realized parts agree
                pair(ta, tb)
            });
            Ok(NodeExtract {
                arena,
                terms,
                builder,
            })
        }
        RuleLabel::OrL => {
            let left = Rc::new(extract_node(&tree.children[0])?);
            let right = Rc::new(extract_node(&tree.children[1])?);
            let Formula::Or(a, b) = ant[pos].clone() else {
                unreachable!()
            };
            let map_l = sub_block_map(&arena, &left.arena, pos, 0);
            let map_r = sub_block_map(&arena, &right.arena, pos, a.atom_count());
            let terms = merge_strategies(&arena, &[(&left, &map_l), (&right, &map_r)])?;
            let ant_t = ant.clone();
            let suc_t = suc.clone();
            let blocks_t = blocks.clone();
            let a = a.as_ref().clone();
            let b = b.as_ref().clone();
            let builder: Builder = Rc::new(move |values, hyps| {
                let vl = eval_child_values(&left, &map_l, values);
                let vr = eval_child_values(&right, &map_r, values);
                let a_real = realized_block(
                    &a,
                    &counts(values, &sub_range(&blocks_t, pos, 0, a.atom_count())),
                );
                let b_real = realized_block(
                    &b,
                    &counts(
                        values,
                        &sub_range(&blocks_t, pos, a.atom_count(), b.atom_count()),
                    ),
                );
                let ha = fresh_hyp();
                let hb = fresh_hyp();
                let hl = adjust_context_hyps(
                    &ant_t,
                    &blocks_t,
                    values,
                    &left.arena,
                    &vl,
                    hyps,
                    &[(pos, hyp(ha, a_real.clone()))],
                );
                let hr = adjust_context_hyps(
                    &ant_t,
                    &blocks_t,
                    values,
                    &right.arena,
                    &vr,
                    hyps,
                    &[(pos, hyp(hb, b_real.clone()))],
                );
                let suc_block = &blocks_t[blocks_t.len() - 1];
                let parent_suc = counts(values, suc_block);
                let left_suc = counts(&vl, &left.arena.blocks()[left.arena.blocks().len() - 1]);
                let right_suc = counts(&vr, &right.arena.blocks()[right.arena.blocks().len() - 1]);
                let tl = suc_lift(&suc_t, &left_suc, &parent_suc, (left.builder)(&vl, &hl));
                let tr = suc_lift(&suc_t, &right_suc, &parent_suc, (right.builder)(&vr, &hr));
                case(hyps[pos].clone(), lam(ha, a_real, tl), lam(hb, b_real, tr))
            });
            Ok(NodeExtract {
                arena,
                terms,
                builder,
            })
        }
        RuleLabel::ImpL => {
            let first = Rc::new(extract_node(&tree.children[0])?);
            let second = Rc::new(extract_node(&tree.children[1])?);
            let Formula::Imp(a, _) = ant[pos].clone() else {
                unreachable!()
            };
            let a = a.as_ref().clone();
            // first child: context minus the principal; its succedent is A
            let map1 = imp_l_first_map(&arena, &first.arena, pos, n);
            let map2 = sub_block_map(&arena, &second.arena, pos, a.atom_count());
            let terms = merge_strategies(&arena, &[(&first, &map1), (&second, &map2)])?;
            let ant_t = ant.clone();
            let blocks_t = blocks.clone();
            let builder: Builder = Rc::new(move |values, hyps| {
                let v1 = eval_child_values(&first, &map1, values);
                let v2 = eval_child_values(&second, &map2, values);
                // context hypotheses for the first child skip position pos
                let mut h1 = Vec::new();
                for (t, template) in ant_t.iter().enumerate() {
                    if t == pos {
                        continue;
                    }
                    let child_t = if t < pos { t } else { t - 1 };
                    let child_counts = counts(&v1, &first.arena.blocks()[child_t]);
                    let parent_counts = counts(values, &blocks_t[t]);
                    h1.push(ctx_adjust(
                        template,
                        &parent_counts,
                        &child_counts,
                        &hyps[t],
                    ));
                }
                let arg = (first.builder)(&v1, &h1); // proves A at the parent's A-part
                let b_term = app(hyps[pos].clone(), arg);
                let h2 = adjust_context_hyps(
                    &ant_t,
                    &blocks_t,
                    values,
                    &second.arena,
                    &v2,
                    hyps,
                    &[(pos, b_term)],
                );
                (second.builder)(&v2, &h2)
            });
            Ok(NodeExtract {
                arena,
                terms,
                builder,
            })
        }
        RuleLabel::ImpR => {
            let child = Rc::new(extract_node(&tree.children[0])?);
            let Formula::Imp(a, _) = suc.clone() else {
                unreachable!()
            };
            let a = a.as_ref().clone();
            // child blocks: parent antecedent blocks, then A at the
            // parent's succedent-premise part, then B
            let map = imp_r_map(&arena, &child.arena, n, a.atom_count());
            let terms = merge_strategies(&arena, &[(&child, &map)])?;
            let ant_t = ant.clone();
            let blocks_t = blocks.clone();
            let builder: Builder = Rc::new(move |values, hyps| {
                let v = eval_child_values(&child, &map, values);
                let a_counts = counts(
                    values,
                    &(blocks_t[n].start..blocks_t[n].start + a.atom_count()),
                );
                let a_real = realized_block(&a, &a_counts);
                let x = fresh_hyp();
                let h = adjust_context_hyps(
                    &ant_t,
                    &blocks_t,
                    values,
                    &child.arena,
                    &v,
                    hyps,
                    &[(n, hyp(x, a_real.clone()))],
                );
                let body = (child.builder)(&v, &h);
                lam(x, a_real, body)
            });
            Ok(NodeExtract {
                arena,
                terms,
                builder,
            })
        }
        RuleLabel::WeakL => {
            let child = Rc::new(extract_node(&tree.children[0])?);
            let map = weak_l_map(&arena, &child.arena, pos);
            let terms = merge_strategies(&arena, &[(&child, &map)])?;
            let ant_t = ant.clone();
            let blocks_t = blocks.clone();
            let builder: Builder = Rc::new(move |values, hyps| {
                let v = eval_child_values(&child, &map, values);
                let mut h = Vec::new();
                for (t, template) in ant_t.iter().enumerate() {
                    if t == pos {
                        continue;
                    }
                    let child_t = if t < pos { t } else { t - 1 };
                    let child_counts = counts(&v, &child.arena.blocks()[child_t]);
                    let parent_counts = counts(values, &blocks_t[t]);
                    h.push(ctx_adjust(
                        template,
                        &parent_counts,
                        &child_counts,
                        &hyps[t],
                    ));
                }
                (child.builder)(&v, &h)
            });
            Ok(NodeExtract {
                arena,
                terms,
                builder,
            })
        }
        RuleLabel::ContrL => {
            let child = Rc::new(extract_node(&tree.children[0])?);
            let map = contr_l_map(&arena, &child.arena, pos);
            let terms = merge_strategies(&arena, &[(&child, &map)])?;
            let ant_t = ant.clone();
            let blocks_t = blocks.clone();
            let builder: Builder = Rc::new(move |values, hyps| {
                let v = eval_child_values(&child, &map, values);
                let child_blocks = child.arena.blocks();
                let mut h = Vec::new();
                for t in 0..ant_t.len() + 1 {
                    // child antecedent has one extra block after pos
                    let (template, parent_block, parent_hyp) = if t <= pos {
                        (&ant_t[t], &blocks_t[t], &hyps[t])
                    } else if t == pos + 1 {
                        (&ant_t[pos], &blocks_t[pos], &hyps[pos])
                    } else {
                        (&ant_t[t - 1], &blocks_t[t - 1], &hyps[t - 1])
                    };
                    let child_counts = counts(&v, &child_blocks[t]);
                    let parent_counts = counts(values, parent_block);
                    h.push(ctx_adjust(
                        template,
                        &parent_counts,
                        &child_counts,
                        parent_hyp,
                    ));
                }
                (child.builder)(&v, &h)
            });
            Ok(NodeExtract {
                arena,
                terms,
                builder,
            })
        }
        RuleLabel::WeakR | RuleLabel::ContrR => unreachable!("single-succedent trees"),
    }
}

// Map for rules whose single premise replaces block `block_idx` by a
// sub-block at `offset`; all other blocks keep their layout.
fn sub_block_map(parent: &Arena, child: &Arena, block_idx: usize, offset: usize) -> Vec<usize> {
    let pb = parent.blocks();
    let cb = child.blocks();
    let mut map = vec![0; child.slots.len()];
    for (j, crange) in cb.iter().enumerate() {
        let start = if j == block_idx {
            pb[j].start + offset
        } else {
            pb[j].start
        };
        for (k, cslot) in crange.clone().enumerate() {
            map[cslot] = start + k;
        }
    }
    map
}

fn sub_range(blocks: &[Range<usize>], block_idx: usize, offset: usize, len: usize) -> Range<usize> {
    let start = blocks[block_idx].start + offset;
    start..start + len
}

// ImpL first premise: (ant minus pos) => A. Its succedent block lands on
// the A-part of the principal block.
fn imp_l_first_map(parent: &Arena, child: &Arena, pos: usize, n: usize) -> Vec<usize> {
    let pb = parent.blocks();
    let cb = child.blocks();
    let mut map = vec![0; child.slots.len()];
    for (j, crange) in cb.iter().enumerate() {
        let start = if j < pos {
            pb[j].start
        } else if j < n - 1 {
            pb[j + 1].start
        } else {
            // the succedent A of the premise
            pb[pos].start
        };
        for (k, cslot) in crange.clone().enumerate() {
            map[cslot] = start + k;
        }
    }
    map
}

// ImpR premise: ant ++ [A] => B.
fn imp_r_map(parent: &Arena, child: &Arena, n: usize, a_atoms: usize) -> Vec<usize> {
    let pb = parent.blocks();
    let cb = child.blocks();
    let mut map = vec![0; child.slots.len()];
    for (j, crange) in cb.iter().enumerate() {
        let start = if j < n {
            pb[j].start
        } else if j == n {
            pb[n].start
        } else {
            pb[n].start + a_atoms
        };
        for (k, cslot) in crange.clone().enumerate() {
            map[cslot] = start + k;
        }
    }
    map
}

fn weak_l_map(parent: &Arena, child: &Arena, pos: usize) -> Vec<usize> {
    let pb = parent.blocks();
    let cb = child.blocks();
    let mut map = vec![0; child.slots.len()];
    for (j, crange) in cb.iter().enumerate() {
        let start = if j < pos {
            pb[j].start
        } else {
            pb[j + 1].start
        };
        for (k, cslot) in crange.clone().enumerate() {
            map[cslot] = start + k;
        }
    }
    map
}

fn contr_l_map(parent: &Arena, child: &Arena, pos: usize) -> Vec<usize> {
    let pb = parent.blocks();
    let cb = child.blocks();
    let mut map = vec![0; child.slots.len()];
    for (j, crange) in cb.iter().enumerate() {
        let start = if j <= pos {
            pb[j].start
        } else if j == pos + 1 {
            pb[pos].start
        } else {
            pb[j - 1].start
        };
        for (k, cslot) in crange.clone().enumerate() {
            map[cslot] = start + k;
        }
    }
    map
}

// Context hypotheses for a premise whose antecedent positions align with
// the parent's except for `replacements` (child position -> ready-made
// term). Child positions beyond the parent's antecedent must be covered
// by replacements.
#[allow(clippy::too_many_arguments)]
fn adjust_context_hyps(
    ant: &[Formula],
    parent_blocks: &[Range<usize>],
    parent_values: &[u32],
    child_arena: &Arena,
    child_values: &[u32],
    hyps: &[ProofTerm],
    replacements: &[(usize, ProofTerm)],
) -> Vec<ProofTerm> {
    let child_blocks = child_arena.blocks();
    let mut out = Vec::new();
    for t in 0..child_arena.subject.antecedent.len() {
        if let Some((_, term)) = replacements.iter().find(|(p, _)| *p == t) {
            out.push(term.clone());
            continue;
        }
        let child_counts = counts(child_values, &child_blocks[t]);
        let parent_counts = counts(parent_values, &parent_blocks[t]);
        out.push(ctx_adjust(&ant[t], &parent_counts, &child_counts, &hyps[t]));
    }
    out
}

// Builder for AndL1/AndL2/OrR1/OrR2.
#[allow(clippy::too_many_arguments)]
fn single_premise_builder(
    rule: RuleLabel,
    keep_left: bool,
    pos: usize,
    ant: Vec<Formula>,
    suc: Formula,
    blocks: Vec<Range<usize>>,
    n: usize,
    child: Rc<NodeExtract>,
    map: Vec<usize>,
) -> Builder {
    Rc::new(move |values, hyps| {
        let v = eval_child_values(&child, &map, values);
        match rule {
            RuleLabel::AndL1 | RuleLabel::AndL2 => {
                let Formula::And(a, b) = &ant[pos] else {
                    unreachable!()
                };
                let a_counts = counts(values, &sub_range(&blocks, pos, 0, a.atom_count()));
                let b_counts = counts(
                    values,
                    &sub_range(&blocks, pos, a.atom_count(), b.atom_count()),
                );
                let a_real = realized_block(a, &a_counts);
                let b_real = realized_block(b, &b_counts);
                let projection = if keep_left {
                    SchemaId::AndLeft
                } else {
                    SchemaId::AndRight
                };
                let part = app(schema(projection, &[a_real, b_real]), hyps[pos].clone());
                let h = adjust_context_hyps(
                    &ant,
                    &blocks,
                    values,
                    &child.arena,
                    &v,
                    hyps,
                    &[(pos, part)],
                );
                (child.builder)(&v, &h)
            }
            RuleLabel::OrR1 | RuleLabel::OrR2 => {
                let Formula::Or(a, b) = &suc else {
                    unreachable!()
                };
                let a_counts = counts(values, &sub_range(&blocks, n, 0, a.atom_count()));
                let b_counts = counts(
                    values,
                    &sub_range(&blocks, n, a.atom_count(), b.atom_count()),
                );
                let a_real = realized_block(a, &a_counts);
                let b_real = realized_block(b, &b_counts);
                let h = adjust_context_hyps(&ant, &blocks, values, &child.arena, &v, hyps, &[]);
                let inner = (child.builder)(&v, &h);
                let injection = if keep_left {
                    SchemaId::OrInl
                } else {
                    SchemaId::OrInr
                };
                app(schema(injection, &[a_real, b_real]), inner)
            }
            _ => unreachable!(),
        }
    })
}

// ---------------------------------------------------------------------------
// Certification

/// Checks a play: the certificate (or, if absent and a budget is given,
/// a bounded proof search) must establish the boxed formula in the
/// logic's modal counterpart. `false` is not a refutation when only the
/// bounded fallback ran.
pub fn certify_play(
    result: &PlayResult,
    logic: LogicVariant,
    fallback_budget: Option<u32>,
) -> Result<bool, ExtractError> {
    let Some(variant) = logic.certificate_variant() else {
        return Err(ExtractError::ClassicalUnsupported);
    };
    let theory = Theory::empty(variant);
    if let Some(cert) = &result.certificate {
        let ok = check_derivation(&theory, cert).is_ok()
            && cert.premises.is_empty()
            && cert.conclusion() == Some(&result.boxed);
        return Ok(ok);
    }
    if let Some(budget) = fallback_budget {
        return Ok(matches!(
            bounded_modal_prove(&theory, &result.boxed, budget),
            ProveOutcome::Found(_)
        ));
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::sequent::{prove_formula, ProveResult};

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn extract(goal: &str, logic: LogicVariant) -> ExtractedDefender {
        let result = prove_formula(&f(goal), logic).unwrap();
        let ProveResult::Proved(tree) = result else {
            panic!("{goal} should be provable");
        };
        extract_defender_strategy(&tree, logic).unwrap()
    }

    fn attacker_consts(arena: &Arena, values: &[u32]) -> Strategy {
        let slots = arena.slots_of(Mover::Attacker);
        assert_eq!(slots.len(), values.len());
        Strategy {
            terms: slots
                .iter()
                .zip(values)
                .map(|(s, v)| (*s, Term::constant(*v)))
                .collect(),
        }
    }

    #[test]
    fn play_identity_with_copy() {
        let arena = Arena::for_formula(&f("p1 -> p1"));
        let defender = Strategy {
            terms: BTreeMap::from([(1, Term::move_ref(0))]),
        };
        let attacker = attacker_consts(&arena, &[2]);
        let result = play(&arena, &defender, &attacker).unwrap();
        assert_eq!(result.boxed, f("[][]p1 -> [][]p1"));
        assert_eq!(result.transcript, vec![2, 2]);
    }

    #[test]
    fn play_zero_leaves_subject_unchanged() {
        let arena = Arena::for_formula(&f("p1"));
        let defender = Strategy::constant(&arena, Mover::Defender, 0);
        let attacker = Strategy::default();
        let result = play(&arena, &defender, &attacker).unwrap();
        assert_eq!(result.boxed, f("p1"));
    }

    #[test]
    fn play_conjunction_independently() {
        let arena = Arena::for_formula(&f("p1 & p2"));
        let defender = Strategy::constant(&arena, Mover::Defender, 1);
        let attacker = Strategy::default();
        let result = play(&arena, &defender, &attacker).unwrap();
        assert_eq!(result.boxed, f("[]p1 & []p2"));
    }

    #[test]
    fn play_validates_coverage_and_references() {
        let arena = Arena::for_formula(&f("p1 -> p1"));
        let bad = Strategy {
            terms: BTreeMap::from([(1, Term::move_ref(1))]),
        };
        let attacker = attacker_consts(&arena, &[0]);
        assert!(matches!(
            play(&arena, &bad, &attacker),
            Err(GameError::IllFoundedMove { .. })
        ));
        let empty = Strategy::default();
        assert!(matches!(
            play(&arena, &empty, &attacker),
            Err(GameError::MissingSlot { .. })
        ));
    }

    #[test]
    fn strip_back_recovers_subject() {
        let subject = f("(p1 | ~p2) -> p1 & bot");
        let arena = Arena::for_formula(&subject);
        let defender = Strategy::constant(&arena, Mover::Defender, 2);
        let attacker = Strategy::constant(&arena, Mover::Attacker, 3);
        let result = play(&arena, &defender, &attacker).unwrap();
        assert_eq!(
            subject.remove_boxes(&result.boxed, &result.transcript),
            Some(subject.clone())
        );
        assert_eq!(result.boxed.strip_boxes(), subject);
    }

    #[test]
    fn extracted_identity_strategy_copies() {
        let e = extract("p1 -> p1", LogicVariant::Minimal);
        assert_eq!(e.strategy.terms[&1], Term::move_ref(0));
        let attacker = attacker_consts(&e.arena, &[2]);
        let result = e.play_against(&attacker).unwrap();
        assert_eq!(result.boxed, f("[][]p1 -> [][]p1"));
        assert!(certify_play(&result, LogicVariant::Minimal, None).unwrap());
    }

    #[test]
    fn extracted_projection_certificates() {
        let e = extract("(p1 & p2) -> p1", LogicVariant::Minimal);
        for k1 in 0..3 {
            for k2 in 0..3 {
                let attacker = attacker_consts(&e.arena, &[k1, k2]);
                let result = e.play_against(&attacker).unwrap();
                let expected = f("p1 & p2 -> p1").apply_boxes(&[k1, k2, k1]);
                assert_eq!(result.boxed, expected);
                assert!(certify_play(&result, LogicVariant::Minimal, None).unwrap());
            }
        }
    }

    #[test]
    fn extracted_k_schema_certificates() {
        let e = extract("p1 -> p2 -> p1", LogicVariant::Minimal);
        for k1 in 0..3 {
            for k2 in 0..3 {
                let attacker = attacker_consts(&e.arena, &[k1, k2]);
                let result = e.play_against(&attacker).unwrap();
                assert!(certify_play(&result, LogicVariant::Minimal, None).unwrap());
            }
        }
    }

    #[test]
    fn extraction_handles_disjunction_and_conjunction_rules() {
        for goal in [
            "p1 & p2 -> p2 & p1",
            "p1 | p2 -> p2 | p1",
            "p1 -> p1 | p2",
            "p1 & p2 & p3 -> p2",
        ] {
            let e = extract(goal, LogicVariant::Minimal);
            let slots = e.arena.slots_of(Mover::Attacker).len();
            for pattern in 0..(1 << slots.min(4)) {
                let values: Vec<u32> = (0..slots)
                    .map(|i| ((pattern >> i) & 1) as u32 * 2)
                    .collect();
                let attacker = attacker_consts(&e.arena, &values);
                let result = e.play_against(&attacker).unwrap();
                assert!(
                    certify_play(&result, LogicVariant::Minimal, None).unwrap(),
                    "{goal} vs {values:?}"
                );
            }
        }
    }

    #[test]
    fn bot_axiom_extraction_is_intuitionistic() {
        let e = extract("bot -> p1", LogicVariant::Intuitionistic);
        for k in 0..4 {
            let attacker = attacker_consts(&e.arena, &[k]);
            let result = e.play_against(&attacker).unwrap();
            assert!(certify_play(&result, LogicVariant::Intuitionistic, None).unwrap());
        }
    }

    #[test]
    fn intuitionistic_extraction_with_case_split() {
        let e = extract("p1 | bot -> p1", LogicVariant::Intuitionistic);
        for k1 in 0..3 {
            for k2 in 0..3 {
                let attacker = attacker_consts(&e.arena, &[k1, k2]);
                let result = e.play_against(&attacker).unwrap();
                assert!(
                    certify_play(&result, LogicVariant::Intuitionistic, None).unwrap(),
                    "attacker ({k1},{k2})"
                );
            }
        }
    }

    #[test]
    fn strategy_json_round_trip() {
        let strategy = Strategy {
            terms: BTreeMap::from([
                (
                    2,
                    Term::max(Term::plus(Term::move_ref(0), 1), Term::constant(3)),
                ),
                (5, Term::move_ref(1)),
            ]),
        };
        let text = serde_json::to_string(&strategy).unwrap();
        let back: Strategy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, strategy);
    }

    #[test]
    fn classical_extraction_is_rejected() {
        let result = prove_formula(&f("p1 | ~p1"), LogicVariant::Classical).unwrap();
        let tree = result.tree().unwrap();
        assert!(matches!(
            extract_defender_strategy(tree, LogicVariant::Classical),
            Err(ExtractError::ClassicalUnsupported)
        ));
    }

    #[test]
    fn certify_play_fallback() {
        // no certificate, bounded prover succeeds
        let result = PlayResult {
            subject: Sequent::goal(f("p1 -> [][][]p1")),
            boxed: f("p1 -> [][][]p1"),
            boxed_sequent: Sequent::goal(f("p1 -> [][][]p1")),
            transcript: vec![],
            certificate: None,
        };
        assert!(certify_play(&result, LogicVariant::Minimal, Some(8)).unwrap());

        // unboxing is never certified
        let bad = PlayResult {
            subject: Sequent::goal(f("[]p1 -> p1")),
            boxed: f("[]p1 -> p1"),
            boxed_sequent: Sequent::goal(f("[]p1 -> p1")),
            transcript: vec![],
            certificate: None,
        };
        assert!(!certify_play(&bad, LogicVariant::Minimal, Some(10)).unwrap());
        assert!(!certify_play(&bad, LogicVariant::Minimal, None).unwrap());
    }

    #[test]
    fn monotonicity_certificates() {
        let template = f("(p1 | p2) -> p1 & p2");
        // occurrences: p1 (neg), p2 (neg), p1 (pos), p2 (pos)
        let u = [2, 1, 0, 0];
        let v = [1, 1, 2, 3];
        let term = monotonicity_cert(&template, &u, &v).unwrap();
        assert_eq!(
            term.conclusion,
            Formula::imp(template.apply_boxes(&u), template.apply_boxes(&v))
        );
        let d = compile(&term, &[]).unwrap();
        check_derivation(&Theory::empty(crate::theory::Variant::Standard), &d).unwrap();

        // dominance violation
        let bad = monotonicity_cert(&template, &[0, 0, 3, 0], &[0, 0, 2, 0]);
        assert!(matches!(bad, Err(GameError::NotDominated { at: 2 })));
    }

    #[test]
    fn determinism() {
        let e = extract("(p1 & p2) -> p1", LogicVariant::Minimal);
        let attacker = attacker_consts(&e.arena, &[1, 2]);
        let r1 = e.play_against(&attacker).unwrap();
        let r2 = e.play_against(&attacker).unwrap();
        assert_eq!(r1, r2);
    }
}
