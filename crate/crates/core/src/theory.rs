//! Guarded circular theories and the axiom schemata of the modal system.
//!
//! A theory declares variables `p1 .. pn`, one defining axiom `pi <-> A_i`
//! per variable, and a logic variant. The defining bodies must be guarded:
//! every variable occurrence sits under at least one box.

use crate::formula::{Formula, Step};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Logic variant of the system.
///
/// `Standard` is the minimal base with the one-directional implication box
/// axiom. `Strengthened` upgrades that axiom to a biconditional and admits
/// ex falso (intuitionistic base).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    #[default]
    Standard,
    Strengthened,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Standard => write!(f, "standard"),
            Variant::Strengthened => write!(f, "strengthened"),
        }
    }
}

/// A finite theory: defining axioms `pi <-> A_i` plus a logic variant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub variant: Variant,
    /// Pairs `(i, A_i)` as written in the theory file.
    pub defining_axioms: Vec<(u32, Formula)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryViolation {
    #[error("axiom for p{index} is declared more than once")]
    DuplicateIndex { index: u32 },
    #[error("axiom indices must cover 1..{expected} exactly; p{index} is out of range")]
    IndexOutOfRange { index: u32, expected: u32 },
    #[error("no defining axiom declared for p{index}")]
    MissingIndex { index: u32 },
    #[error(
        "p{var} occurs unguarded (outside every box) in the axiom for p{axiom} at path {path:?}"
    )]
    Unguarded {
        axiom: u32,
        var: u32,
        path: Vec<Step>,
    },
    #[error("axiom for p{axiom} mentions undeclared variable p{var}")]
    UndeclaredVar { axiom: u32, var: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("undeclared variable p{0}")]
    UndeclaredVar(u32),
    #[error("level is undefined: unguarded unfolding cycle through p{0}")]
    UnguardedCycle(u32),
}

impl Theory {
    pub fn new(variant: Variant, defining_axioms: Vec<(u32, Formula)>) -> Self {
        Theory {
            variant,
            defining_axioms,
        }
    }

    pub fn empty(variant: Variant) -> Self {
        Theory {
            variant,
            defining_axioms: Vec::new(),
        }
    }

    pub fn variable_count(&self) -> u32 {
        self.defining_axioms.len() as u32
    }

    pub fn defining_body(&self, index: u32) -> Option<&Formula> {
        self.defining_axioms
            .iter()
            .find(|(i, _)| *i == index)
            .map(|(_, f)| f)
    }

    pub fn is_declared(&self, index: u32) -> bool {
        self.defining_body(index).is_some()
    }

    /// Checks that every variable of `f` is declared.
    pub fn check_vars(&self, f: &Formula) -> Result<(), TheoryError> {
        for v in f.variables() {
            if !self.is_declared(v) {
                return Err(TheoryError::UndeclaredVar(v));
            }
        }
        Ok(())
    }

    /// Checks the indexing and guardedness invariants. An empty result
    /// means the theory is well formed.
    pub fn validate(&self) -> Vec<TheoryViolation> {
        let mut violations = Vec::new();
        let n = self.variable_count();
        let mut seen = BTreeMap::new();
        for (i, _) in &self.defining_axioms {
            if *i == 0 || *i > n {
                violations.push(TheoryViolation::IndexOutOfRange {
                    index: *i,
                    expected: n,
                });
            }
            *seen.entry(*i).or_insert(0u32) += 1;
        }
        for (i, count) in &seen {
            if *count > 1 {
                violations.push(TheoryViolation::DuplicateIndex { index: *i });
            }
        }
        for i in 1..=n {
            if !seen.contains_key(&i) {
                violations.push(TheoryViolation::MissingIndex { index: i });
            }
        }
        for (i, body) in &self.defining_axioms {
            let mut path = Vec::new();
            check_guarded(body, *i, n, 0, &mut path, &mut violations);
        }
        violations
    }

    /// Both directions of the defining axiom for `pi`, as formulas.
    pub fn defining_direction(&self, index: u32, dir: Direction) -> Option<Formula> {
        let body = self.defining_body(index)?.clone();
        Some(match dir {
            Direction::Forward => Formula::imp(Formula::var(index), body),
            Direction::Backward => Formula::imp(body, Formula::var(index)),
        })
    }

    /// The level of a formula: 1 on `bot` and boxed formulas, `max + 1`
    /// through binary connectives, and `level(A_i) + 1` on `pi`.
    pub fn level(&self, f: &Formula) -> Result<u64, TheoryError> {
        let mut unfolding = Vec::new();
        self.level_inner(f, &mut unfolding)
    }

    fn level_inner(&self, f: &Formula, unfolding: &mut Vec<u32>) -> Result<u64, TheoryError> {
        match f {
            Formula::Bottom | Formula::Boxed(_) => Ok(1),
            Formula::Var(i) => {
                let body = self
                    .defining_body(*i)
                    .ok_or(TheoryError::UndeclaredVar(*i))?;
                if unfolding.contains(i) {
                    return Err(TheoryError::UnguardedCycle(*i));
                }
                unfolding.push(*i);
                let l = self.level_inner(body, unfolding)?;
                unfolding.pop();
                Ok(l + 1)
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                let la = self.level_inner(a, unfolding)?;
                let lb = self.level_inner(b, unfolding)?;
                Ok(la.max(lb) + 1)
            }
        }
    }

    /// Hex-encoded digest of the variant and the rendered axioms.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.variant.to_string().as_bytes());
        for (i, body) in &self.defining_axioms {
            hasher.update(format!("\np{} := {}", i, body).as_bytes());
        }
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

fn check_guarded(
    f: &Formula,
    axiom: u32,
    declared: u32,
    box_depth: u32,
    path: &mut Vec<Step>,
    violations: &mut Vec<TheoryViolation>,
) {
    match f {
        Formula::Bottom => {}
        Formula::Var(v) => {
            if *v == 0 || *v > declared {
                violations.push(TheoryViolation::UndeclaredVar { axiom, var: *v });
            }
            if box_depth == 0 {
                violations.push(TheoryViolation::Unguarded {
                    axiom,
                    var: *v,
                    path: path.clone(),
                });
            }
        }
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            path.push(Step::Left);
            check_guarded(a, axiom, declared, box_depth, path, violations);
            path.pop();
            path.push(Step::Right);
            check_guarded(b, axiom, declared, box_depth, path, violations);
            path.pop();
        }
        Formula::Boxed(a) => {
            path.push(Step::Body);
            check_guarded(a, axiom, declared, box_depth + 1, path, violations);
            path.pop();
        }
    }
}

/// Direction of a biconditional defining axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `pi -> A_i`
    Forward,
    /// `A_i -> pi`
    Backward,
}

// ---------------------------------------------------------------------------
// Axiom schemata

/// Identifier of a logical or box axiom schema.
///
/// The minimal base is implicational K and S plus pairing/projection for `&`
/// and injection/case for `|`. Biconditional box axioms are delivered as
/// implication pairs. `ExFalso` and `BoxImpConv` exist only in the
/// strengthened variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemaId {
    /// `A -> (B -> A)`
    ImpK,
    /// `(A -> (B -> C)) -> ((A -> B) -> (A -> C))`
    ImpS,
    /// `A -> (B -> A & B)`
    AndPair,
    /// `A & B -> A`
    AndLeft,
    /// `A & B -> B`
    AndRight,
    /// `A -> A | B`
    OrInl,
    /// `B -> A | B`
    OrInr,
    /// `(A -> C) -> ((B -> C) -> (A | B -> C))`
    OrCase,
    /// `bot -> A` (strengthened only)
    ExFalso,
    /// `[](A | B) -> []A | []B`
    BoxOrFwd,
    /// `[]A | []B -> [](A | B)`
    BoxOrBwd,
    /// `[](A & B) -> []A & []B`
    BoxAndFwd,
    /// `[]A & []B -> [](A & B)`
    BoxAndBwd,
    /// `[](A -> B) -> ([]A -> []B)`
    BoxImp,
    /// `([]A -> []B) -> [](A -> B)` (strengthened only)
    BoxImpConv,
    /// `A -> []A`
    BoxIntro,
}

impl SchemaId {
    pub const ALL: [SchemaId; 16] = [
        SchemaId::ImpK,
        SchemaId::ImpS,
        SchemaId::AndPair,
        SchemaId::AndLeft,
        SchemaId::AndRight,
        SchemaId::OrInl,
        SchemaId::OrInr,
        SchemaId::OrCase,
        SchemaId::ExFalso,
        SchemaId::BoxOrFwd,
        SchemaId::BoxOrBwd,
        SchemaId::BoxAndFwd,
        SchemaId::BoxAndBwd,
        SchemaId::BoxImp,
        SchemaId::BoxImpConv,
        SchemaId::BoxIntro,
    ];

    /// Number of metavariables of the schema.
    pub fn arity(self) -> usize {
        match self {
            SchemaId::ExFalso | SchemaId::BoxIntro => 1,
            SchemaId::ImpS | SchemaId::OrCase => 3,
            _ => 2,
        }
    }

    /// True iff the schema is a box axiom rather than part of the
    /// propositional base.
    pub fn is_box_schema(self) -> bool {
        matches!(
            self,
            SchemaId::BoxOrFwd
                | SchemaId::BoxOrBwd
                | SchemaId::BoxAndFwd
                | SchemaId::BoxAndBwd
                | SchemaId::BoxImp
                | SchemaId::BoxImpConv
                | SchemaId::BoxIntro
        )
    }

    /// True iff the schema is available in the given variant.
    pub fn available_in(self, variant: Variant) -> bool {
        match self {
            SchemaId::ExFalso | SchemaId::BoxImpConv => variant == Variant::Strengthened,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("schema {schema:?} takes {expected} metavariable(s), got {got}")]
    ArityMismatch {
        schema: SchemaId,
        expected: usize,
        got: usize,
    },
    #[error("schema {schema:?} is not available in the {variant} variant")]
    NotAvailable { schema: SchemaId, variant: Variant },
}

/// Builds the substituted instance of a schema. `args` supplies the
/// metavariables A, B, C in order.
pub fn schema_instance(schema: SchemaId, args: &[Formula]) -> Result<Formula, SchemaError> {
    if args.len() != schema.arity() {
        return Err(SchemaError::ArityMismatch {
            schema,
            expected: schema.arity(),
            got: args.len(),
        });
    }
    let a = || args[0].clone();
    let b = || args[1].clone();
    let c = || args[2].clone();
    use Formula as F;
    Ok(match schema {
        SchemaId::ImpK => F::imp(a(), F::imp(b(), a())),
        SchemaId::ImpS => F::imp(
            F::imp(a(), F::imp(b(), c())),
            F::imp(F::imp(a(), b()), F::imp(a(), c())),
        ),
        SchemaId::AndPair => F::imp(a(), F::imp(b(), F::and(a(), b()))),
        SchemaId::AndLeft => F::imp(F::and(a(), b()), a()),
        SchemaId::AndRight => F::imp(F::and(a(), b()), b()),
        SchemaId::OrInl => F::imp(a(), F::or(a(), b())),
        SchemaId::OrInr => F::imp(b(), F::or(a(), b())),
        SchemaId::OrCase => F::imp(
            F::imp(a(), c()),
            F::imp(F::imp(b(), c()), F::imp(F::or(a(), b()), c())),
        ),
        SchemaId::ExFalso => F::imp(F::Bottom, a()),
        SchemaId::BoxOrFwd => F::imp(
            F::boxed(F::or(a(), b())),
            F::or(F::boxed(a()), F::boxed(b())),
        ),
        SchemaId::BoxOrBwd => F::imp(
            F::or(F::boxed(a()), F::boxed(b())),
            F::boxed(F::or(a(), b())),
        ),
        SchemaId::BoxAndFwd => F::imp(
            F::boxed(F::and(a(), b())),
            F::and(F::boxed(a()), F::boxed(b())),
        ),
        SchemaId::BoxAndBwd => F::imp(
            F::and(F::boxed(a()), F::boxed(b())),
            F::boxed(F::and(a(), b())),
        ),
        SchemaId::BoxImp => F::imp(
            F::boxed(F::imp(a(), b())),
            F::imp(F::boxed(a()), F::boxed(b())),
        ),
        SchemaId::BoxImpConv => F::imp(
            F::imp(F::boxed(a()), F::boxed(b())),
            F::boxed(F::imp(a(), b())),
        ),
        SchemaId::BoxIntro => F::imp(a(), F::boxed(a())),
    })
}

// ---------------------------------------------------------------------------
// Theory files

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TheoryFileError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Parses a theory file: an optional `variant:` header followed by one
/// `p<i> := <formula>` line per axiom. Blank lines and `#` comments are
/// skipped.
pub fn parse_theory_file(text: &str) -> Result<Theory, TheoryFileError> {
    let mut variant = Variant::Standard;
    let mut axioms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("variant:") {
            variant = match rest.trim() {
                "standard" => Variant::Standard,
                "strengthened" => Variant::Strengthened,
                other => {
                    return Err(TheoryFileError::Malformed {
                        line: lineno,
                        message: format!(
                            "unknown variant `{other}` (expected `standard` or `strengthened`)"
                        ),
                    })
                }
            };
            continue;
        }
        let (lhs, rhs) = line
            .split_once(":=")
            .ok_or_else(|| TheoryFileError::Malformed {
                line: lineno,
                message: "expected `p<i> := <formula>`".to_string(),
            })?;
        let lhs = lhs.trim();
        let index: u32 = lhs
            .strip_prefix('p')
            .and_then(|d| d.parse().ok())
            .filter(|i| *i > 0)
            .ok_or_else(|| TheoryFileError::Malformed {
                line: lineno,
                message: format!("`{lhs}` is not a variable"),
            })?;
        let body = crate::formula::parse(rhs.trim()).map_err(|e| TheoryFileError::Malformed {
            line: lineno,
            message: e.to_string(),
        })?;
        axioms.push((index, body));
    }
    Ok(Theory::new(variant, axioms))
}

/// Renders a theory in the file format.
pub fn render_theory_file(t: &Theory) -> String {
    let mut out = format!("variant: {}\n", t.variant);
    for (i, body) in &t.defining_axioms {
        out.push_str(&format!("p{} := {}\n", i, body));
    }
    out
}
