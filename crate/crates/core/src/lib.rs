//! A toolkit for a propositional provability logic.
//!
//! The crate implements, end to end:
//!
//! - a formula language with a provability operator `[]` ([`formula`]);
//! - guarded circular theories and a line-checkable Hilbert derivation
//!   format for the modal system, plus a sound bounded prover ([`theory`],
//!   [`derivation`], [`prover`]);
//! - a consistency-proof engine that traces the inductive rejection sets
//!   over a finite closure ([`filter`]);
//! - G1-style sequent calculi (minimal, intuitionistic, classical) with a
//!   decision procedure and proof-tree checking ([`sequent`]);
//! - the Attacker/Defender box-insertion game with certified strategy
//!   extraction from sequent proofs ([`game`]);
//! - the weak-interpretation pipeline: strip boxes from increasing axioms,
//!   lift theorems back through the game, and transfer consistency
//!   ([`interp`]).

pub mod derivation;
pub mod filter;
pub mod formula;
pub mod game;
pub mod interp;
pub mod proofterm;
pub mod prover;
pub mod random;
pub mod sequent;
pub mod theory;

pub use derivation::{check_derivation, Derivation, DerivationLine, Justification};
pub use formula::{atomic_occurrences, parse, render, Formula, Mover, OccurrencePath, Polarity};
pub use theory::{schema_instance, SchemaId, Theory, Variant};
