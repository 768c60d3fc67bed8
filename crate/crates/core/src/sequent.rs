//! G1-style sequent calculi: minimal, intuitionistic, and classical.
//!
//! Proof trees use the G1 rule inventory with explicit weakening and
//! contraction, atomic axioms `A => A`, and — outside minimal logic —
//! the axioms `bot => A` for atomic `A` in place of a falsum rule.
//! Contexts are ordered lists standing for multisets: every rule names
//! the position of its principal formula, so no exchange rule is needed.
//!
//! Position conventions, with the antecedent on the left:
//!
//! - `AndL1`/`AndL2` at antecedent position i replace `A & B` by `A`
//!   (resp. `B`) in place.
//! - `OrL` at i: children replace `A | B` by `A` and by `B` in place.
//! - `ImpL` at i: the first child drops position i and proves `A`
//!   (appended to the succedent in the classical case, replacing it
//!   otherwise); the second child replaces position i by `B`.
//! - `ImpR` at succedent position j: the child appends `A` at the end of
//!   the antecedent and replaces position j by `B`.
//! - `WeakL`/`WeakR` at i: the child lacks the formula at position i.
//! - `ContrL`/`ContrR` at i: the child carries a second copy at i + 1.
//!
//! Proof search runs in a contraction-free G3-style calculus (set
//! contexts; the principal of a left implication stays available in its
//! first premise) and found derivations are translated into the G1 form.

use crate::formula::Formula;
use crate::theory::Variant;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// The base logic of a sequent calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicVariant {
    Minimal,
    Intuitionistic,
    Classical,
}

impl LogicVariant {
    pub fn single_succedent(self) -> bool {
        !matches!(self, LogicVariant::Classical)
    }

    /// Theory variant used when checking certificates in this logic.
    /// Classical certificates have no counterpart in the modal system.
    pub fn certificate_variant(self) -> Option<Variant> {
        match self {
            LogicVariant::Minimal => Some(Variant::Standard),
            LogicVariant::Intuitionistic => Some(Variant::Strengthened),
            LogicVariant::Classical => None,
        }
    }
}

impl fmt::Display for LogicVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicVariant::Minimal => write!(f, "minimal"),
            LogicVariant::Intuitionistic => write!(f, "intuitionistic"),
            LogicVariant::Classical => write!(f, "classical"),
        }
    }
}

/// A sequent. Minimal and intuitionistic sequents carry exactly one
/// succedent formula; classical sequents carry a multiset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Vec<Formula>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Vec<Formula>) -> Self {
        Sequent {
            antecedent,
            succedent,
        }
    }

    /// `=> A`.
    pub fn goal(f: Formula) -> Self {
        Sequent {
            antecedent: Vec::new(),
            succedent: vec![f],
        }
    }

    pub fn contains_box(&self) -> bool {
        self.antecedent
            .iter()
            .chain(self.succedent.iter())
            .any(|f| f.contains_box())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ant: Vec<String> = self.antecedent.iter().map(|x| x.to_string()).collect();
        let suc: Vec<String> = self.succedent.iter().map(|x| x.to_string()).collect();
        write!(f, "{} => {}", ant.join(", "), suc.join(", "))
    }
}

/// G1 rule labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleLabel {
    Ax,
    BotAx,
    AndL1,
    AndL2,
    AndR,
    OrL,
    OrR1,
    OrR2,
    ImpL,
    ImpR,
    WeakL,
    WeakR,
    ContrL,
    ContrR,
}

/// A G1 proof tree. `position` addresses the principal (or inserted /
/// duplicated) formula on the side implied by the rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub sequent: Sequent,
    pub rule: RuleLabel,
    pub position: usize,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    fn leaf(sequent: Sequent, rule: RuleLabel) -> Self {
        ProofTree {
            sequent,
            rule,
            position: 0,
            children: Vec::new(),
        }
    }

    fn node(sequent: Sequent, rule: RuleLabel, position: usize, children: Vec<ProofTree>) -> Self {
        ProofTree {
            sequent,
            rule,
            position,
            children,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    fn principal(&self) -> Option<&Formula> {
        match self.rule {
            RuleLabel::Ax | RuleLabel::BotAx => self.sequent.succedent.first(),
            RuleLabel::AndL1
            | RuleLabel::AndL2
            | RuleLabel::OrL
            | RuleLabel::ImpL
            | RuleLabel::WeakL
            | RuleLabel::ContrL => self.sequent.antecedent.get(self.position),
            RuleLabel::AndR
            | RuleLabel::OrR1
            | RuleLabel::OrR2
            | RuleLabel::ImpR
            | RuleLabel::WeakR
            | RuleLabel::ContrR => self.sequent.succedent.get(self.position),
        }
    }
}

impl Serialize for ProofTree {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ProofTree", 5)?;
        s.serialize_field("sequent", &self.sequent)?;
        s.serialize_field("rule", &self.rule)?;
        s.serialize_field("position", &self.position)?;
        s.serialize_field("principal", &self.principal())?;
        s.serialize_field("children", &self.children)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for ProofTree {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            sequent: Sequent,
            rule: RuleLabel,
            #[serde(default)]
            position: usize,
            #[serde(default)]
            children: Vec<Raw>,
        }
        fn build(raw: Raw) -> ProofTree {
            ProofTree {
                sequent: raw.sequent,
                rule: raw.rule,
                position: raw.position,
                children: raw.children.into_iter().map(build).collect(),
            }
        }
        Ok(build(Raw::deserialize(deserializer)?))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SequentError {
    #[error("boxed formulas are not part of this calculus: `{0}`")]
    BoxedFormula(Formula),
    #[error("{0} sequents need exactly one succedent formula")]
    BadSuccedent(LogicVariant),
}

/// Why a proof tree was rejected, and where.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("node at path {path:?}: {reason}")]
pub struct TreeError {
    /// Child indices from the root to the offending node.
    pub path: Vec<usize>,
    pub reason: String,
}

// ---------------------------------------------------------------------------
// Checking

/// Checks that every node instantiates its rule correctly and every leaf
/// is a permitted axiom for the variant.
pub fn check_tree(tree: &ProofTree, variant: LogicVariant) -> Result<(), TreeError> {
    let mut path = Vec::new();
    check_node(tree, variant, &mut path)
}

fn fail(path: &[usize], reason: impl Into<String>) -> TreeError {
    TreeError {
        path: path.to_vec(),
        reason: reason.into(),
    }
}

fn replace(v: &[Formula], i: usize, f: Formula) -> Vec<Formula> {
    let mut out = v.to_vec();
    out[i] = f;
    out
}

fn remove(v: &[Formula], i: usize) -> Vec<Formula> {
    let mut out = v.to_vec();
    out.remove(i);
    out
}

fn insert_at(v: &[Formula], i: usize, f: Formula) -> Vec<Formula> {
    let mut out = v.to_vec();
    out.insert(i, f);
    out
}

fn append(v: &[Formula], f: Formula) -> Vec<Formula> {
    let mut out = v.to_vec();
    out.push(f);
    out
}

fn check_node(
    tree: &ProofTree,
    variant: LogicVariant,
    path: &mut Vec<usize>,
) -> Result<(), TreeError> {
    let seq = &tree.sequent;
    if variant.single_succedent() && seq.succedent.len() != 1 {
        return Err(fail(
            path,
            format!("{variant} sequents need exactly one succedent formula"),
        ));
    }
    if seq.contains_box() {
        return Err(fail(path, "boxed formula inside a sequent proof"));
    }

    let expect_children = |expected: Vec<Sequent>, path: &Vec<usize>| -> Result<(), TreeError> {
        if tree.children.len() != expected.len() {
            return Err(fail(
                path,
                format!(
                    "rule {:?} needs {} premise(s), found {}",
                    tree.rule,
                    expected.len(),
                    tree.children.len()
                ),
            ));
        }
        for (idx, (child, want)) in tree.children.iter().zip(&expected).enumerate() {
            if &child.sequent != want {
                return Err(fail(
                    path,
                    format!(
                        "premise {} of {:?} should be `{}`, found `{}`",
                        idx + 1,
                        tree.rule,
                        want,
                        child.sequent
                    ),
                ));
            }
        }
        Ok(())
    };

    let ant = &seq.antecedent;
    let suc = &seq.succedent;
    let pos = tree.position;

    let ant_at = |i: usize, path: &Vec<usize>| {
        ant.get(i)
            .cloned()
            .ok_or_else(|| fail(path, format!("antecedent position {i} out of range")))
    };
    let suc_at = |j: usize, path: &Vec<usize>| {
        suc.get(j)
            .cloned()
            .ok_or_else(|| fail(path, format!("succedent position {j} out of range")))
    };

    match tree.rule {
        RuleLabel::Ax => {
            if !tree.children.is_empty() {
                return Err(fail(path, "axiom leaves take no premises"));
            }
            let ok = ant.len() == 1 && suc.len() == 1 && ant[0] == suc[0] && ant[0].is_atomic();
            if !ok {
                return Err(fail(path, format!("`{seq}` is not an atomic axiom A => A")));
            }
            Ok(())
        }
        RuleLabel::BotAx => {
            if variant == LogicVariant::Minimal {
                return Err(fail(
                    path,
                    "the bot => A axioms are not available in minimal logic",
                ));
            }
            if !tree.children.is_empty() {
                return Err(fail(path, "axiom leaves take no premises"));
            }
            let ok =
                ant.len() == 1 && suc.len() == 1 && ant[0] == Formula::Bottom && suc[0].is_atomic();
            if !ok {
                return Err(fail(
                    path,
                    format!("`{seq}` is not a bot => A axiom with atomic A"),
                ));
            }
            Ok(())
        }
        RuleLabel::AndL1 | RuleLabel::AndL2 => {
            let Formula::And(a, b) = ant_at(pos, path)? else {
                return Err(fail(
                    path,
                    "principal of a left conjunction rule must be a conjunction",
                ));
            };
            let kept = if tree.rule == RuleLabel::AndL1 {
                *a
            } else {
                *b
            };
            expect_children(
                vec![Sequent::new(replace(ant, pos, kept), suc.clone())],
                path,
            )?;
            descend(tree, variant, path)
        }
        RuleLabel::AndR => {
            let Formula::And(a, b) = suc_at(pos, path)? else {
                return Err(fail(
                    path,
                    "principal of a right conjunction rule must be a conjunction",
                ));
            };
            expect_children(
                vec![
                    Sequent::new(ant.clone(), replace(suc, pos, *a)),
                    Sequent::new(ant.clone(), replace(suc, pos, *b)),
                ],
                path,
            )?;
            descend(tree, variant, path)
        }
        RuleLabel::OrL => {
            let Formula::Or(a, b) = ant_at(pos, path)? else {
                return Err(fail(
                    path,
                    "principal of a left disjunction rule must be a disjunction",
                ));
            };
            expect_children(
                vec![
                    Sequent::new(replace(ant, pos, *a), suc.clone()),
                    Sequent::new(replace(ant, pos, *b), suc.clone()),
                ],
                path,
            )?;
            descend(tree, variant, path)
        }
        RuleLabel::OrR1 | RuleLabel::OrR2 => {
            let Formula::Or(a, b) = suc_at(pos, path)? else {
                return Err(fail(
                    path,
                    "principal of a right disjunction rule must be a disjunction",
                ));
            };
            let kept = if tree.rule == RuleLabel::OrR1 { *a } else { *b };
            expect_children(
                vec![Sequent::new(ant.clone(), replace(suc, pos, kept))],
                path,
            )?;
            descend(tree, variant, path)
        }
        RuleLabel::ImpL => {
            let Formula::Imp(a, b) = ant_at(pos, path)? else {
                return Err(fail(
                    path,
                    "principal of a left implication rule must be an implication",
                ));
            };
            let first_suc = if variant.single_succedent() {
                vec![*a]
            } else {
                append(suc, *a)
            };
            expect_children(
                vec![
                    Sequent::new(remove(ant, pos), first_suc),
                    Sequent::new(replace(ant, pos, *b), suc.clone()),
                ],
                path,
            )?;
            descend(tree, variant, path)
        }
        RuleLabel::ImpR => {
            let Formula::Imp(a, b) = suc_at(pos, path)? else {
                return Err(fail(
                    path,
                    "principal of a right implication rule must be an implication",
                ));
            };
            expect_children(
                vec![Sequent::new(append(ant, *a), replace(suc, pos, *b))],
                path,
            )?;
            descend(tree, variant, path)
        }
        RuleLabel::WeakL => {
            ant_at(pos, path)?;
            expect_children(vec![Sequent::new(remove(ant, pos), suc.clone())], path)?;
            descend(tree, variant, path)
        }
        RuleLabel::WeakR => {
            if variant.single_succedent() {
                return Err(fail(path, "right weakening needs a multiset succedent"));
            }
            suc_at(pos, path)?;
            expect_children(vec![Sequent::new(ant.clone(), remove(suc, pos))], path)?;
            descend(tree, variant, path)
        }
        RuleLabel::ContrL => {
            let f = ant_at(pos, path)?;
            expect_children(
                vec![Sequent::new(insert_at(ant, pos + 1, f), suc.clone())],
                path,
            )?;
            descend(tree, variant, path)
        }
        RuleLabel::ContrR => {
            if variant.single_succedent() {
                return Err(fail(path, "right contraction needs a multiset succedent"));
            }
            let f = suc_at(pos, path)?;
            expect_children(
                vec![Sequent::new(ant.clone(), insert_at(suc, pos + 1, f))],
                path,
            )?;
            descend(tree, variant, path)
        }
    }
}

fn descend(
    tree: &ProofTree,
    variant: LogicVariant,
    path: &mut Vec<usize>,
) -> Result<(), TreeError> {
    for (i, child) in tree.children.iter().enumerate() {
        path.push(i);
        check_node(child, variant, path)?;
        path.pop();
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Search calculus (contraction-free, set contexts)

#[derive(Debug)]
enum SearchTree {
    Axiom(Formula),
    LBot,
    RAnd(Box<SearchTree>, Box<SearchTree>),
    ROr1(Box<SearchTree>),
    ROr2(Box<SearchTree>),
    RImp(Box<SearchTree>),
    LAnd(Formula, Box<SearchTree>),
    LOr(Formula, Box<SearchTree>, Box<SearchTree>),
    LImp(Formula, Box<SearchTree>, Box<SearchTree>),
}

fn set_insert(set: &[Formula], f: &Formula) -> Vec<Formula> {
    if set.contains(f) {
        set.to_vec()
    } else {
        let mut out = set.to_vec();
        out.push(f.clone());
        out.sort();
        out
    }
}

fn set_remove(set: &[Formula], f: &Formula) -> Vec<Formula> {
    set.iter().filter(|g| *g != f).cloned().collect()
}

struct SingleSearch {
    minimal: bool,
    history: Vec<(Vec<Formula>, Formula)>,
}

impl SingleSearch {
    // `ant` is sorted and duplicate-free.
    fn prove(&mut self, ant: &[Formula], suc: &Formula) -> Option<SearchTree> {
        let key = (ant.to_vec(), suc.clone());
        if self.history.contains(&key) {
            return None;
        }
        self.history.push(key);
        let result = self.prove_inner(ant, suc);
        self.history.pop();
        result
    }

    fn prove_inner(&mut self, ant: &[Formula], suc: &Formula) -> Option<SearchTree> {
        if suc.is_atomic() && ant.contains(suc) {
            return Some(SearchTree::Axiom(suc.clone()));
        }
        if !self.minimal && ant.contains(&Formula::Bottom) {
            return Some(SearchTree::LBot);
        }

        // invertible left rules
        for f in ant {
            match f {
                Formula::And(a, b) => {
                    let ant2 = set_insert(&set_insert(&set_remove(ant, f), a), b);
                    return self
                        .prove(&ant2, suc)
                        .map(|t| SearchTree::LAnd(f.clone(), Box::new(t)));
                }
                Formula::Or(a, b) => {
                    let left = self.prove(&set_insert(&set_remove(ant, f), a), suc)?;
                    let right = self.prove(&set_insert(&set_remove(ant, f), b), suc)?;
                    return Some(SearchTree::LOr(f.clone(), Box::new(left), Box::new(right)));
                }
                _ => {}
            }
        }

        // invertible right rules
        match suc {
            Formula::And(a, b) => {
                let left = self.prove(ant, a)?;
                let right = self.prove(ant, b)?;
                return Some(SearchTree::RAnd(Box::new(left), Box::new(right)));
            }
            Formula::Imp(a, b) => {
                let ant2 = set_insert(ant, a);
                return self.prove(&ant2, b).map(|t| SearchTree::RImp(Box::new(t)));
            }
            _ => {}
        }

        // choice points: right disjunction, then left implications
        if let Formula::Or(a, b) = suc {
            if let Some(t) = self.prove(ant, a) {
                return Some(SearchTree::ROr1(Box::new(t)));
            }
            if let Some(t) = self.prove(ant, b) {
                return Some(SearchTree::ROr2(Box::new(t)));
            }
        }
        for f in ant {
            if let Formula::Imp(a, b) = f {
                // the principal stays available while proving its premise
                let Some(arg) = self.prove(ant, a) else {
                    continue;
                };
                let ant2 = set_insert(&set_remove(ant, f), b);
                if let Some(cont) = self.prove(&ant2, suc) {
                    return Some(SearchTree::LImp(f.clone(), Box::new(arg), Box::new(cont)));
                }
            }
        }
        None
    }
}

#[derive(Debug)]
enum SearchTreeC {
    Axiom(Formula),
    LBot(Formula),
    LAnd(Formula, Box<SearchTreeC>),
    LOr(Formula, Box<SearchTreeC>, Box<SearchTreeC>),
    LImp(Formula, Box<SearchTreeC>, Box<SearchTreeC>),
    RAnd(Formula, Box<SearchTreeC>, Box<SearchTreeC>),
    ROr(Formula, Box<SearchTreeC>),
    RImp(Formula, Box<SearchTreeC>),
}

struct ClassicalSearch;

impl ClassicalSearch {
    // both sides sorted and duplicate-free; every rule shrinks the total
    // connective count, so no history is needed
    fn prove(&mut self, ant: &[Formula], suc: &[Formula]) -> Option<SearchTreeC> {
        for p in ant {
            if p.is_atomic() && suc.contains(p) {
                return Some(SearchTreeC::Axiom(p.clone()));
            }
        }
        if ant.contains(&Formula::Bottom) {
            // bot => A needs some succedent formula to expand into
            if let Some(d) = suc.first() {
                return Some(SearchTreeC::LBot(d.clone()));
            }
        }
        for f in ant {
            match f {
                Formula::And(a, b) => {
                    let ant2 = set_insert(&set_insert(&set_remove(ant, f), a), b);
                    return self
                        .prove(&ant2, suc)
                        .map(|t| SearchTreeC::LAnd(f.clone(), Box::new(t)));
                }
                Formula::Or(a, b) => {
                    let left = self.prove(&set_insert(&set_remove(ant, f), a), suc)?;
                    let right = self.prove(&set_insert(&set_remove(ant, f), b), suc)?;
                    return Some(SearchTreeC::LOr(f.clone(), Box::new(left), Box::new(right)));
                }
                Formula::Imp(a, b) => {
                    let rest = set_remove(ant, f);
                    let first = self.prove(&rest, &set_insert(suc, a))?;
                    let second = self.prove(&set_insert(&rest, b), suc)?;
                    return Some(SearchTreeC::LImp(
                        f.clone(),
                        Box::new(first),
                        Box::new(second),
                    ));
                }
                _ => {}
            }
        }
        for f in suc {
            match f {
                Formula::And(a, b) => {
                    let rest = set_remove(suc, f);
                    let left = self.prove(ant, &set_insert(&rest, a))?;
                    let right = self.prove(ant, &set_insert(&rest, b))?;
                    return Some(SearchTreeC::RAnd(
                        f.clone(),
                        Box::new(left),
                        Box::new(right),
                    ));
                }
                Formula::Or(a, b) => {
                    let suc2 = set_insert(&set_insert(&set_remove(suc, f), a), b);
                    return self
                        .prove(ant, &suc2)
                        .map(|t| SearchTreeC::ROr(f.clone(), Box::new(t)));
                }
                Formula::Imp(a, b) => {
                    let ant2 = set_insert(ant, a);
                    let suc2 = set_insert(&set_remove(suc, f), b);
                    return self
                        .prove(&ant2, &suc2)
                        .map(|t| SearchTreeC::RImp(f.clone(), Box::new(t)));
                }
                _ => {}
            }
        }
        None
    }
}

// ---------------------------------------------------------------------------
// Translation into G1 trees

// Inserts weakenings until the antecedent equals `target`, which must be
// a supersequence of the tree's current antecedent.
fn weaken_ant_into(mut tree: ProofTree, target: &[Formula]) -> ProofTree {
    let mut have = tree.sequent.antecedent.clone();
    let suc = tree.sequent.succedent.clone();
    let mut q = 0;
    for wanted in target {
        if q < have.len() && have[q] == *wanted {
            q += 1;
            continue;
        }
        have.insert(q, wanted.clone());
        tree = ProofTree::node(
            Sequent::new(have.clone(), suc.clone()),
            RuleLabel::WeakL,
            q,
            vec![tree],
        );
        q += 1;
    }
    debug_assert_eq!(have, target, "antecedent embedding failed");
    tree
}

fn weaken_suc_into(mut tree: ProofTree, target: &[Formula]) -> ProofTree {
    let mut have = tree.sequent.succedent.clone();
    let ant = tree.sequent.antecedent.clone();
    let mut q = 0;
    for wanted in target {
        if q < have.len() && have[q] == *wanted {
            q += 1;
            continue;
        }
        have.insert(q, wanted.clone());
        tree = ProofTree::node(
            Sequent::new(ant.clone(), have.clone()),
            RuleLabel::WeakR,
            q,
            vec![tree],
        );
        q += 1;
    }
    debug_assert_eq!(have, target, "succedent embedding failed");
    tree
}

// `bot => C` for arbitrary C, from the atomic bot => A axioms.
fn bot_expansion(c: &Formula) -> ProofTree {
    let seq = Sequent::new(vec![Formula::Bottom], vec![c.clone()]);
    match c {
        Formula::Bottom | Formula::Var(_) => ProofTree::leaf(seq, RuleLabel::BotAx),
        Formula::And(a, b) => ProofTree::node(
            seq,
            RuleLabel::AndR,
            0,
            vec![bot_expansion(a), bot_expansion(b)],
        ),
        Formula::Or(a, _) => ProofTree::node(seq, RuleLabel::OrR1, 0, vec![bot_expansion(a)]),
        Formula::Imp(a, b) => {
            let inner = bot_expansion(b);
            let weakened = weaken_ant_into(inner, &[Formula::Bottom, a.as_ref().clone()]);
            ProofTree::node(seq, RuleLabel::ImpR, 0, vec![weakened])
        }
        Formula::Boxed(_) => unreachable!("sequent search rejects boxes"),
    }
}

fn first_position(v: &[Formula], f: &Formula) -> usize {
    v.iter()
        .position(|g| g == f)
        .expect("principal formula present in the requested context")
}

// Single-succedent translation. `ant` realizes the search node's
// antecedent set (possibly with duplicates or extra copies); the
// resulting tree's root is exactly `ant => suc`.
fn translate_single(node: &SearchTree, ant: &[Formula], suc: &Formula) -> ProofTree {
    let seq = Sequent::new(ant.to_vec(), vec![suc.clone()]);
    match node {
        SearchTree::Axiom(p) => {
            let leaf = ProofTree::leaf(
                Sequent::new(vec![p.clone()], vec![p.clone()]),
                RuleLabel::Ax,
            );
            weaken_ant_into(leaf, ant)
        }
        SearchTree::LBot => weaken_ant_into(bot_expansion(suc), ant),
        SearchTree::RAnd(l, r) => {
            let Formula::And(a, b) = suc else {
                unreachable!()
            };
            ProofTree::node(
                seq,
                RuleLabel::AndR,
                0,
                vec![translate_single(l, ant, a), translate_single(r, ant, b)],
            )
        }
        SearchTree::ROr1(t) => {
            let Formula::Or(a, _) = suc else {
                unreachable!()
            };
            ProofTree::node(seq, RuleLabel::OrR1, 0, vec![translate_single(t, ant, a)])
        }
        SearchTree::ROr2(t) => {
            let Formula::Or(_, b) = suc else {
                unreachable!()
            };
            ProofTree::node(seq, RuleLabel::OrR2, 0, vec![translate_single(t, ant, b)])
        }
        SearchTree::RImp(t) => {
            let Formula::Imp(a, b) = suc else {
                unreachable!()
            };
            let child_ant = append(ant, a.as_ref().clone());
            ProofTree::node(
                seq,
                RuleLabel::ImpR,
                0,
                vec![translate_single(t, &child_ant, b)],
            )
        }
        SearchTree::LAnd(principal, t) => {
            let Formula::And(a, b) = principal else {
                unreachable!()
            };
            let i = first_position(ant, principal);
            // ContrL(i), then AndL1(i), then AndL2(i+1)
            let dup = insert_at(ant, i + 1, principal.clone());
            let step1 = replace(&dup, i, a.as_ref().clone());
            let step2 = replace(&step1, i + 1, b.as_ref().clone());
            let inner = translate_single(t, &step2, suc);
            let and_l2 = ProofTree::node(
                Sequent::new(step1, vec![suc.clone()]),
                RuleLabel::AndL2,
                i + 1,
                vec![inner],
            );
            let and_l1 = ProofTree::node(
                Sequent::new(dup, vec![suc.clone()]),
                RuleLabel::AndL1,
                i,
                vec![and_l2],
            );
            ProofTree::node(seq, RuleLabel::ContrL, i, vec![and_l1])
        }
        SearchTree::LOr(principal, l, r) => {
            let Formula::Or(a, b) = principal else {
                unreachable!()
            };
            let i = first_position(ant, principal);
            let left_ant = replace(ant, i, a.as_ref().clone());
            let right_ant = replace(ant, i, b.as_ref().clone());
            ProofTree::node(
                seq,
                RuleLabel::OrL,
                i,
                vec![
                    translate_single(l, &left_ant, suc),
                    translate_single(r, &right_ant, suc),
                ],
            )
        }
        SearchTree::LImp(principal, arg, cont) => {
            let Formula::Imp(a, b) = principal else {
                unreachable!()
            };
            let i = first_position(ant, principal);
            // the search kept the principal while proving its premise:
            // contract first, then apply ImpL to one copy
            let dup = insert_at(ant, i + 1, principal.clone());
            let first = translate_single(arg, &remove(&dup, i), a);
            let cont_ant = replace(&dup, i, b.as_ref().clone());
            let second = translate_single(cont, &cont_ant, suc);
            let imp_l = ProofTree::node(
                Sequent::new(dup, vec![suc.clone()]),
                RuleLabel::ImpL,
                i,
                vec![first, second],
            );
            ProofTree::node(seq, RuleLabel::ContrL, i, vec![imp_l])
        }
    }
}

// Classical translation; root is exactly `ant => suc`.
fn translate_classical(node: &SearchTreeC, ant: &[Formula], suc: &[Formula]) -> ProofTree {
    let seq = Sequent::new(ant.to_vec(), suc.to_vec());
    match node {
        SearchTreeC::Axiom(p) => {
            let leaf = ProofTree::leaf(
                Sequent::new(vec![p.clone()], vec![p.clone()]),
                RuleLabel::Ax,
            );
            weaken_suc_into(weaken_ant_into(leaf, ant), suc)
        }
        SearchTreeC::LBot(d) => {
            let base = weaken_ant_into(bot_expansion(d), ant);
            weaken_suc_into(base, suc)
        }
        SearchTreeC::LAnd(principal, t) => {
            let Formula::And(a, b) = principal else {
                unreachable!()
            };
            let i = first_position(ant, principal);
            let dup = insert_at(ant, i + 1, principal.clone());
            let step1 = replace(&dup, i, a.as_ref().clone());
            let step2 = replace(&step1, i + 1, b.as_ref().clone());
            let inner = translate_classical(t, &step2, suc);
            let and_l2 = ProofTree::node(
                Sequent::new(step1, suc.to_vec()),
                RuleLabel::AndL2,
                i + 1,
                vec![inner],
            );
            let and_l1 = ProofTree::node(
                Sequent::new(dup, suc.to_vec()),
                RuleLabel::AndL1,
                i,
                vec![and_l2],
            );
            ProofTree::node(seq, RuleLabel::ContrL, i, vec![and_l1])
        }
        SearchTreeC::LOr(principal, l, r) => {
            let Formula::Or(a, b) = principal else {
                unreachable!()
            };
            let i = first_position(ant, principal);
            ProofTree::node(
                seq,
                RuleLabel::OrL,
                i,
                vec![
                    translate_classical(l, &replace(ant, i, a.as_ref().clone()), suc),
                    translate_classical(r, &replace(ant, i, b.as_ref().clone()), suc),
                ],
            )
        }
        SearchTreeC::LImp(principal, first, second) => {
            let Formula::Imp(a, b) = principal else {
                unreachable!()
            };
            let i = first_position(ant, principal);
            let rest = remove(ant, i);
            ProofTree::node(
                seq,
                RuleLabel::ImpL,
                i,
                vec![
                    translate_classical(first, &rest, &append(suc, a.as_ref().clone())),
                    translate_classical(second, &replace(ant, i, b.as_ref().clone()), suc),
                ],
            )
        }
        SearchTreeC::RAnd(principal, l, r) => {
            let Formula::And(a, b) = principal else {
                unreachable!()
            };
            let j = first_position(suc, principal);
            ProofTree::node(
                seq,
                RuleLabel::AndR,
                j,
                vec![
                    translate_classical(l, ant, &replace(suc, j, a.as_ref().clone())),
                    translate_classical(r, ant, &replace(suc, j, b.as_ref().clone())),
                ],
            )
        }
        SearchTreeC::ROr(principal, t) => {
            let Formula::Or(a, b) = principal else {
                unreachable!()
            };
            let j = first_position(suc, principal);
            let dup = insert_at(suc, j + 1, principal.clone());
            let step1 = replace(&dup, j, a.as_ref().clone());
            let step2 = replace(&step1, j + 1, b.as_ref().clone());
            let inner = translate_classical(t, ant, &step2);
            let or_r2 = ProofTree::node(
                Sequent::new(ant.to_vec(), step1),
                RuleLabel::OrR2,
                j + 1,
                vec![inner],
            );
            let or_r1 = ProofTree::node(
                Sequent::new(ant.to_vec(), dup),
                RuleLabel::OrR1,
                j,
                vec![or_r2],
            );
            ProofTree::node(seq, RuleLabel::ContrR, j, vec![or_r1])
        }
        SearchTreeC::RImp(principal, t) => {
            let Formula::Imp(a, b) = principal else {
                unreachable!()
            };
            let j = first_position(suc, principal);
            ProofTree::node(
                seq,
                RuleLabel::ImpR,
                j,
                vec![translate_classical(
                    t,
                    &append(ant, a.as_ref().clone()),
                    &replace(suc, j, b.as_ref().clone()),
                )],
            )
        }
    }
}

// ---------------------------------------------------------------------------
// The decision procedure

/// Outcome of proof search: a checkable tree or a definitive verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProveResult {
    Proved(ProofTree),
    Unprovable,
}

impl ProveResult {
    pub fn tree(&self) -> Option<&ProofTree> {
        match self {
            ProveResult::Proved(t) => Some(t),
            ProveResult::Unprovable => None,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, ProveResult::Proved(_))
    }
}

/// Decides a box-free sequent in the given calculus. On success the
/// returned tree's root is exactly the input sequent.
pub fn prove(sequent: &Sequent, variant: LogicVariant) -> Result<ProveResult, SequentError> {
    for f in sequent.antecedent.iter().chain(sequent.succedent.iter()) {
        if f.contains_box() {
            return Err(SequentError::BoxedFormula(f.clone()));
        }
    }
    if variant.single_succedent() {
        if sequent.succedent.len() != 1 {
            return Err(SequentError::BadSuccedent(variant));
        }
        let mut ant: Vec<Formula> = sequent.antecedent.clone();
        ant.sort();
        ant.dedup();
        let suc = sequent.succedent[0].clone();
        let mut search = SingleSearch {
            minimal: variant == LogicVariant::Minimal,
            history: Vec::new(),
        };
        match search.prove(&ant, &suc) {
            Some(tree) => Ok(ProveResult::Proved(translate_single(
                &tree,
                &sequent.antecedent,
                &suc,
            ))),
            None => Ok(ProveResult::Unprovable),
        }
    } else {
        let mut ant = sequent.antecedent.clone();
        ant.sort();
        ant.dedup();
        let mut suc = sequent.succedent.clone();
        suc.sort();
        suc.dedup();
        match ClassicalSearch.prove(&ant, &suc) {
            Some(tree) => Ok(ProveResult::Proved(translate_classical(
                &tree,
                &sequent.antecedent,
                &sequent.succedent,
            ))),
            None => Ok(ProveResult::Unprovable),
        }
    }
}

/// Decides `=> f`.
pub fn prove_formula(f: &Formula, variant: LogicVariant) -> Result<ProveResult, SequentError> {
    prove(&Sequent::goal(f.clone()), variant)
}
