//! Seeded generators for formulas, strategies, and derivations.
//!
//! Everything here is deterministic given the seed; the randomized test
//! suites and the CLI's random opponents are built on these.

use crate::derivation::{schema_line, Derivation, DerivationLine, Justification};
use crate::formula::{Formula, Mover};
use crate::game::{Arena, Strategy, Term};
use crate::theory::{Direction, SchemaId, Theory};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random formula with at most `connectives` connective nodes over
/// variables `p1..p<var_count>`.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    connectives: u32,
    var_count: u32,
    allow_box: bool,
) -> Formula {
    if connectives == 0 || rng.gen_ratio(1, 5) {
        return if rng.gen_ratio(1, 6) || var_count == 0 {
            Formula::Bottom
        } else {
            Formula::var(rng.gen_range(1..=var_count))
        };
    }
    let choice = if allow_box {
        rng.gen_range(0..4)
    } else {
        rng.gen_range(0..3)
    };
    match choice {
        3 => Formula::boxed(random_formula(rng, connectives - 1, var_count, allow_box)),
        c => {
            let left_budget = rng.gen_range(0..connectives);
            let left = random_formula(rng, left_budget, var_count, allow_box);
            let right = random_formula(rng, connectives - 1 - left_budget, var_count, allow_box);
            match c {
                0 => Formula::and(left, right),
                1 => Formula::or(left, right),
                _ => Formula::imp(left, right),
            }
        }
    }
}

fn random_term(rng: &mut ChaCha8Rng, slot: usize, depth: u32, max_const: u32) -> Term {
    let can_move = slot > 0;
    let choice = if depth == 0 {
        rng.gen_range(0..2)
    } else {
        rng.gen_range(0..4)
    };
    match choice {
        0 => Term::constant(rng.gen_range(0..=max_const)),
        1 if can_move => Term::move_ref(rng.gen_range(0..slot)),
        1 => Term::constant(rng.gen_range(0..=max_const)),
        2 => Term::max(
            random_term(rng, slot, depth - 1, max_const),
            random_term(rng, slot, depth - 1, max_const),
        ),
        _ => Term::plus(
            random_term(rng, slot, depth - 1, max_const),
            rng.gen_range(0..=2),
        ),
    }
}

/// A random strategy for the given player: per owned slot, a term over
/// earlier slots with constants bounded by `max_const`.
pub fn random_strategy(
    rng: &mut ChaCha8Rng,
    arena: &Arena,
    mover: Mover,
    max_const: u32,
) -> Strategy {
    Strategy {
        terms: arena
            .slots_of(mover)
            .into_iter()
            .map(|slot| (slot, random_term(rng, slot, 2, max_const)))
            .collect(),
    }
}

/// A strategy dominating `base` pointwise on every history: each term is
/// wrapped in a `Plus` or a `Max` with fresh material.
pub fn dominating_strategy(rng: &mut ChaCha8Rng, base: &Strategy, max_bump: u32) -> Strategy {
    Strategy {
        terms: base
            .terms
            .iter()
            .map(|(slot, term)| {
                let bumped = match rng.gen_range(0..3) {
                    0 => term.clone(),
                    1 => Term::plus(term.clone(), rng.gen_range(0..=max_bump)),
                    _ => Term::max(term.clone(), random_term(rng, *slot, 1, max_bump)),
                };
                (*slot, bumped)
            })
            .collect(),
    }
}

/// A random derivation over the theory, built forward so that it checks
/// by construction: schema instances, defining-axiom directions, modus
/// ponens on matching earlier lines, and unbox on boxed lines.
pub fn random_derivation(rng: &mut ChaCha8Rng, theory: &Theory, steps: u32) -> Derivation {
    let var_count = theory.variable_count();
    let mut lines: Vec<DerivationLine> = Vec::new();

    let schemas: Vec<SchemaId> = SchemaId::ALL
        .into_iter()
        .filter(|s| s.available_in(theory.variant))
        .collect();

    let push_schema = |rng: &mut ChaCha8Rng, lines: &mut Vec<DerivationLine>| {
        let schema = *schemas.choose(rng).unwrap();
        let args: Vec<Formula> = (0..schema.arity())
            .map(|_| random_formula(rng, 2, var_count, true))
            .collect();
        lines.push(schema_line(schema, &args));
    };

    push_schema(rng, &mut lines);
    for _ in 1..steps {
        let moves = rng.gen_range(0..10);
        match moves {
            0..=3 => push_schema(rng, &mut lines),
            4 if var_count > 0 => {
                let var = rng.gen_range(1..=var_count);
                let direction = if rng.gen_bool(0.5) {
                    Direction::Forward
                } else {
                    Direction::Backward
                };
                lines.push(DerivationLine {
                    formula: theory.defining_direction(var, direction).unwrap(),
                    justification: Justification::Defining { var, direction },
                });
            }
            5 | 6 => {
                // unbox any boxed line
                let boxed: Vec<usize> = lines
                    .iter()
                    .enumerate()
                    .filter(|(_, l)| matches!(l.formula, Formula::Boxed(_)))
                    .map(|(i, _)| i + 1)
                    .collect();
                if let Some(&source) = boxed.choose(rng) {
                    let Formula::Boxed(body) = &lines[source - 1].formula else {
                        unreachable!()
                    };
                    lines.push(DerivationLine {
                        formula: body.as_ref().clone(),
                        justification: Justification::Unbox { refs: [source] },
                    });
                } else {
                    push_schema(rng, &mut lines);
                }
            }
            _ => {
                // modus ponens on a random applicable pair
                let mut applicable = Vec::new();
                for (j, imp_line) in lines.iter().enumerate() {
                    if let Formula::Imp(a, b) = &imp_line.formula {
                        for (i, arg_line) in lines.iter().enumerate() {
                            if &arg_line.formula == a.as_ref() {
                                applicable.push((i + 1, j + 1, b.as_ref().clone()));
                            }
                        }
                    }
                }
                if let Some((arg, imp, conclusion)) = applicable.choose(rng).cloned() {
                    lines.push(DerivationLine {
                        formula: conclusion,
                        justification: Justification::ModusPonens { refs: [arg, imp] },
                    });
                } else {
                    push_schema(rng, &mut lines);
                }
            }
        }
    }

    Derivation {
        premises: Vec::new(),
        lines,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::check_derivation;
    use crate::theory::Variant;

    #[test]
    fn random_derivations_check() {
        let theory = Theory::new(
            Variant::Standard,
            vec![(1, crate::formula::parse("~[]p1").unwrap())],
        );
        let mut r = rng(7);
        for _ in 0..50 {
            let d = random_derivation(&mut r, &theory, 12);
            check_derivation(&theory, &d).unwrap();
            assert!(!d.lines.is_empty());
        }
    }

    #[test]
    fn random_formulas_respect_budget() {
        let mut r = rng(11);
        for _ in 0..100 {
            let f = random_formula(&mut r, 7, 3, false);
            assert!(!f.contains_box());
            assert!(f.atom_count() <= 8);
        }
    }

    #[test]
    fn determinism_by_seed() {
        let mut a = rng(42);
        let mut b = rng(42);
        assert_eq!(
            random_formula(&mut a, 5, 3, true),
            random_formula(&mut b, 5, 3, true)
        );
    }

    #[test]
    fn dominating_strategies_dominate() {
        use crate::game::play;
        let subject = crate::formula::parse("(p1 & p2) -> p1 | p2").unwrap();
        let arena = Arena::for_formula(&subject);
        let mut r = rng(3);
        for _ in 0..30 {
            let base = random_strategy(&mut r, &arena, Mover::Defender, 3);
            let bigger = dominating_strategy(&mut r, &base, 2);
            let attacker = Strategy::constant(&arena, Mover::Attacker, r.gen_range(0..3));
            let small = play(&arena, &base, &attacker).unwrap();
            let large = play(&arena, &bigger, &attacker).unwrap();
            for (u, v) in small.transcript.iter().zip(&large.transcript) {
                assert!(u <= v);
            }
        }
    }
}
