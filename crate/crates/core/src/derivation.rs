//! Line-by-line derivations in the modal system and their checker.
//!
//! A derivation is a list of lines, each carrying a formula and a
//! justification. Checking is purely syntactic: a line is a schema
//! instance, a direction of a defining axiom, an admitted premise, or
//! follows from earlier lines by modus ponens or the unbox rule.
//! Line references in the file format are 1-based.

use crate::formula::Formula;
use crate::theory::{schema_instance, Direction, SchemaId, Theory};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Justification of one derivation line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// Instance of a logical or box axiom schema.
    Schema {
        schema: SchemaId,
        /// Metavariable assignment, keyed "A", "B", "C".
        subst: BTreeMap<String, Formula>,
    },
    /// One direction of the defining axiom for `p<var>`.
    Defining { var: u32, direction: Direction },
    /// An admitted premise, by 1-based index into the premise list.
    Premise { index: usize },
    /// Modus ponens: `refs[0]` proves `A`, `refs[1]` proves `A -> B`.
    ModusPonens { refs: [usize; 2] },
    /// Unbox: `refs[0]` proves `[]A`, this line is `A`.
    Unbox { refs: [usize; 1] },
}

/// One derivation line.
///
/// Serialized as one JSON object with fields `formula`, `rule`, `refs`,
/// `subst`. The rule is the schema name (`imp-k`, `box-intro`, ...),
/// `def-fwd`/`def-bwd` with `refs` naming the variable, `premise` with a
/// 1-based premise index, `mp` with `refs` [argument, implication], or
/// `unbox` with the boxed source line. Line references are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationLine {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Serialize, Deserialize)]
struct RawLine {
    formula: Formula,
    rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    refs: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    subst: BTreeMap<String, Formula>,
}

fn schema_name(schema: SchemaId) -> String {
    serde_json::to_value(schema)
        .expect("schema serializes")
        .as_str()
        .expect("schema names are strings")
        .to_string()
}

fn schema_by_name(name: &str) -> Option<SchemaId> {
    serde_json::from_value(serde_json::Value::String(name.to_string())).ok()
}

impl Serialize for DerivationLine {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = match &self.justification {
            Justification::Schema { schema, subst } => RawLine {
                formula: self.formula.clone(),
                rule: schema_name(*schema),
                refs: Vec::new(),
                subst: subst.clone(),
            },
            Justification::Defining { var, direction } => RawLine {
                formula: self.formula.clone(),
                rule: match direction {
                    Direction::Forward => "def-fwd".to_string(),
                    Direction::Backward => "def-bwd".to_string(),
                },
                refs: vec![*var as usize],
                subst: BTreeMap::new(),
            },
            Justification::Premise { index } => RawLine {
                formula: self.formula.clone(),
                rule: "premise".to_string(),
                refs: vec![*index],
                subst: BTreeMap::new(),
            },
            Justification::ModusPonens { refs } => RawLine {
                formula: self.formula.clone(),
                rule: "mp".to_string(),
                refs: refs.to_vec(),
                subst: BTreeMap::new(),
            },
            Justification::Unbox { refs } => RawLine {
                formula: self.formula.clone(),
                rule: "unbox".to_string(),
                refs: refs.to_vec(),
                subst: BTreeMap::new(),
            },
        };
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DerivationLine {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = RawLine::deserialize(deserializer)?;
        let one_ref = |raw: &RawLine| -> Result<usize, D::Error> {
            match raw.refs.as_slice() {
                [r] => Ok(*r),
                other => Err(D::Error::custom(format!(
                    "rule `{}` takes exactly one reference, got {}",
                    raw.rule,
                    other.len()
                ))),
            }
        };
        let justification = match raw.rule.as_str() {
            "def-fwd" | "def-bwd" => {
                let var = one_ref(&raw)? as u32;
                let direction = if raw.rule == "def-fwd" {
                    Direction::Forward
                } else {
                    Direction::Backward
                };
                Justification::Defining { var, direction }
            }
            "premise" => Justification::Premise {
                index: one_ref(&raw)?,
            },
            "mp" => match raw.refs.as_slice() {
                [a, b] => Justification::ModusPonens { refs: [*a, *b] },
                other => {
                    return Err(D::Error::custom(format!(
                        "rule `mp` takes two references, got {}",
                        other.len()
                    )))
                }
            },
            "unbox" => Justification::Unbox {
                refs: [one_ref(&raw)?],
            },
            name => match schema_by_name(name) {
                Some(schema) => Justification::Schema {
                    schema,
                    subst: raw.subst.clone(),
                },
                None => return Err(D::Error::custom(format!("unknown rule `{name}`"))),
            },
        };
        Ok(DerivationLine {
            formula: raw.formula,
            justification,
        })
    }
}

/// A derivation: optional admitted premises plus the proof lines.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    pub premises: Vec<Formula>,
    pub lines: Vec<DerivationLine>,
}

impl Derivation {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }
}

// The file format is either a bare JSON array of lines or an object
// `{"premises": [...], "lines": [...]}`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DerivationRepr {
    WithPremises {
        premises: Vec<Formula>,
        lines: Vec<DerivationLine>,
    },
    Bare(Vec<DerivationLine>),
}

impl Serialize for Derivation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.premises.is_empty() {
            DerivationRepr::Bare(self.lines.clone()).serialize(serializer)
        } else {
            DerivationRepr::WithPremises {
                premises: self.premises.clone(),
                lines: self.lines.clone(),
            }
            .serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for Derivation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(match DerivationRepr::deserialize(deserializer)? {
            DerivationRepr::Bare(lines) => Derivation {
                premises: Vec::new(),
                lines,
            },
            DerivationRepr::WithPremises { premises, lines } => Derivation { premises, lines },
        })
    }
}

/// Why a derivation line was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LineFailure {
    #[error("schema error: {0}")]
    Schema(#[from] crate::theory::SchemaError),
    #[error("missing metavariable {0} in substitution")]
    MissingMetavar(String),
    #[error("stated formula differs from the substituted schema instance; expected `{expected}`")]
    SchemaMismatch { expected: Formula },
    #[error("p{0} has no defining axiom")]
    NoSuchDefiningAxiom(u32),
    #[error("stated formula is not that direction of the defining axiom; expected `{expected}`")]
    DefiningMismatch { expected: Formula },
    #[error("premise index {index} out of range (1..={count})")]
    PremiseOutOfRange { index: usize, count: usize },
    #[error("stated formula differs from premise {index}: `{expected}`")]
    PremiseMismatch { index: usize, expected: Formula },
    #[error("reference to line {reference} is not strictly earlier")]
    DanglingReference { reference: usize },
    #[error("line {imp_line} is `{found}`, which is not an implication")]
    NotAnImplication { imp_line: usize, found: Formula },
    #[error("modus ponens mismatch: line {arg_line} proves `{found}` but the implication needs `{expected}`")]
    PremiseOfImpMismatch {
        arg_line: usize,
        expected: Formula,
        found: Formula,
    },
    #[error("modus ponens conclusion mismatch; expected `{expected}`")]
    ConclusionMismatch { expected: Formula },
    #[error("unbox source on line {reference} is `{found}`, expected `[]{expected}`")]
    MalformedUnbox {
        reference: usize,
        expected: Formula,
        found: Formula,
    },
}

/// A failed check: the first offending line (1-based) and the reason.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {failure}")]
pub struct CheckError {
    pub line: usize,
    pub failure: LineFailure,
}

/// Checks a derivation against a theory. Premises carried by the
/// derivation are admitted as given.
pub fn check_derivation(theory: &Theory, derivation: &Derivation) -> Result<(), CheckError> {
    for idx in 0..derivation.lines.len() {
        check_line(theory, derivation, idx).map_err(|failure| CheckError {
            line: idx + 1,
            failure,
        })?;
    }
    Ok(())
}

fn lookup(
    derivation: &Derivation,
    current: usize,
    reference: usize,
) -> Result<&Formula, LineFailure> {
    if reference == 0 || reference > current {
        return Err(LineFailure::DanglingReference { reference });
    }
    Ok(&derivation.lines[reference - 1].formula)
}

fn check_line(theory: &Theory, derivation: &Derivation, idx: usize) -> Result<(), LineFailure> {
    let line = &derivation.lines[idx];
    match &line.justification {
        Justification::Schema { schema, subst } => {
            if !schema.available_in(theory.variant) {
                return Err(LineFailure::Schema(
                    crate::theory::SchemaError::NotAvailable {
                        schema: *schema,
                        variant: theory.variant,
                    },
                ));
            }
            let names = ["A", "B", "C"];
            let mut args = Vec::with_capacity(schema.arity());
            for name in names.iter().take(schema.arity()) {
                let f = subst
                    .get(*name)
                    .ok_or_else(|| LineFailure::MissingMetavar(name.to_string()))?;
                args.push(f.clone());
            }
            let expected = schema_instance(*schema, &args)?;
            if expected != line.formula {
                return Err(LineFailure::SchemaMismatch { expected });
            }
            Ok(())
        }
        Justification::Defining { var, direction } => {
            let expected = theory
                .defining_direction(*var, *direction)
                .ok_or(LineFailure::NoSuchDefiningAxiom(*var))?;
            if expected != line.formula {
                return Err(LineFailure::DefiningMismatch { expected });
            }
            Ok(())
        }
        Justification::Premise { index } => {
            let count = derivation.premises.len();
            if *index == 0 || *index > count {
                return Err(LineFailure::PremiseOutOfRange {
                    index: *index,
                    count,
                });
            }
            let expected = &derivation.premises[*index - 1];
            if expected != &line.formula {
                return Err(LineFailure::PremiseMismatch {
                    index: *index,
                    expected: expected.clone(),
                });
            }
            Ok(())
        }
        Justification::ModusPonens { refs: [arg, imp] } => {
            let arg_formula = lookup(derivation, idx, *arg)?;
            let imp_formula = lookup(derivation, idx, *imp)?;
            let Formula::Imp(premise, conclusion) = imp_formula else {
                return Err(LineFailure::NotAnImplication {
                    imp_line: *imp,
                    found: imp_formula.clone(),
                });
            };
            if premise.as_ref() != arg_formula {
                return Err(LineFailure::PremiseOfImpMismatch {
                    arg_line: *arg,
                    expected: premise.as_ref().clone(),
                    found: arg_formula.clone(),
                });
            }
            if conclusion.as_ref() != &line.formula {
                return Err(LineFailure::ConclusionMismatch {
                    expected: conclusion.as_ref().clone(),
                });
            }
            Ok(())
        }
        Justification::Unbox { refs: [source] } => {
            let source_formula = lookup(derivation, idx, *source)?;
            let expected = Formula::boxed(line.formula.clone());
            if source_formula != &expected {
                return Err(LineFailure::MalformedUnbox {
                    reference: *source,
                    expected: line.formula.clone(),
                    found: source_formula.clone(),
                });
            }
            Ok(())
        }
    }
}

/// Convenience constructor for schema lines.
pub fn schema_line(schema: SchemaId, args: &[Formula]) -> DerivationLine {
    let names = ["A", "B", "C"];
    let formula = schema_instance(schema, args).expect("schema arity");
    let subst = names
        .iter()
        .take(schema.arity())
        .zip(args)
        .map(|(n, f)| (n.to_string(), f.clone()))
        .collect();
    DerivationLine {
        formula,
        justification: Justification::Schema { schema, subst },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::theory::Variant;

    fn line(formula: &str, justification: Justification) -> DerivationLine {
        DerivationLine {
            formula: parse(formula).unwrap(),
            justification,
        }
    }

    #[test]
    fn schema_instance_lines_check() {
        let t = Theory::empty(Variant::Standard);
        let d = Derivation {
            premises: vec![],
            lines: vec![schema_line(SchemaId::BoxIntro, &[parse("~p1").unwrap()])],
        };
        // schema over undeclared variables is still a syntactic instance
        assert!(check_derivation(&t, &d).is_ok());
    }

    #[test]
    fn b4_cannot_justify_a_boxed_formula() {
        let t = Theory::empty(Variant::Standard);
        let d = Derivation {
            premises: vec![],
            lines: vec![line(
                "[]bot",
                Justification::Schema {
                    schema: SchemaId::BoxIntro,
                    subst: [("A".to_string(), Formula::Bottom)].into_iter().collect(),
                },
            )],
        };
        let err = check_derivation(&t, &d).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(matches!(err.failure, LineFailure::SchemaMismatch { .. }));
    }

    #[test]
    fn modus_ponens_and_unbox() {
        let t = Theory::empty(Variant::Standard);
        let d = Derivation {
            premises: vec![parse("[][]p1").unwrap()],
            lines: vec![
                line("[][]p1", Justification::Premise { index: 1 }),
                line("[]p1", Justification::Unbox { refs: [1] }),
                line("p1", Justification::Unbox { refs: [2] }),
                schema_line(SchemaId::BoxIntro, &[parse("p1").unwrap()]),
                line("[]p1", Justification::ModusPonens { refs: [3, 4] }),
            ],
        };
        assert!(check_derivation(&t, &d).is_ok());
    }

    #[test]
    fn unbox_chain_up_to_ten() {
        let t = Theory::empty(Variant::Standard);
        for k in 1..=10u32 {
            let mut lines = vec![DerivationLine {
                formula: Formula::boxed_n(k, parse("p1 & p2").unwrap()),
                justification: Justification::Premise { index: 1 },
            }];
            for step in 1..=k {
                lines.push(DerivationLine {
                    formula: Formula::boxed_n(k - step, parse("p1 & p2").unwrap()),
                    justification: Justification::Unbox {
                        refs: [step as usize],
                    },
                });
            }
            let d = Derivation {
                premises: vec![Formula::boxed_n(k, parse("p1 & p2").unwrap())],
                lines,
            };
            assert!(check_derivation(&t, &d).is_ok(), "chain of {k} unbox steps");
        }
    }

    #[test]
    fn ex_falso_rejected_in_standard() {
        let d = Derivation {
            premises: vec![],
            lines: vec![schema_line(SchemaId::ExFalso, &[parse("p1").unwrap()])],
        };
        let standard = Theory::empty(Variant::Standard);
        let err = check_derivation(&standard, &d).unwrap_err();
        assert!(matches!(
            err.failure,
            LineFailure::Schema(crate::theory::SchemaError::NotAvailable { .. })
        ));
        let strengthened = Theory::empty(Variant::Strengthened);
        assert!(check_derivation(&strengthened, &d).is_ok());
    }

    #[test]
    fn dangling_and_malformed_references() {
        let t = Theory::empty(Variant::Standard);
        let d = Derivation {
            premises: vec![],
            lines: vec![line("p1", Justification::Unbox { refs: [1] })],
        };
        let err = check_derivation(&t, &d).unwrap_err();
        assert!(matches!(
            err.failure,
            LineFailure::DanglingReference { reference: 1 }
        ));

        let d = Derivation {
            premises: vec![parse("p1").unwrap()],
            lines: vec![
                line("p1", Justification::Premise { index: 1 }),
                line("p2", Justification::Unbox { refs: [1] }),
            ],
        };
        let err = check_derivation(&t, &d).unwrap_err();
        assert!(matches!(err.failure, LineFailure::MalformedUnbox { .. }));
    }

    #[test]
    fn json_round_trip() {
        let d = Derivation {
            premises: vec![parse("[]p1").unwrap()],
            lines: vec![
                line("[]p1", Justification::Premise { index: 1 }),
                line("p1", Justification::Unbox { refs: [1] }),
            ],
        };
        let text = serde_json::to_string_pretty(&d).unwrap();
        let back: Derivation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);

        let bare = r#"[{"formula": "p1 -> []p1", "rule": "box-intro", "subst": {"A": "p1"}}]"#;
        let d: Derivation = serde_json::from_str(bare).unwrap();
        assert!(d.premises.is_empty());
        let t = Theory::empty(Variant::Standard);
        assert!(check_derivation(&t, &d).is_ok());
    }
}
