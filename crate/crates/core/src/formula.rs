//! Formula syntax: parsing, printing, and structural analyses.
//!
//! The language has the falsehood constant `bot`, variables `p1`, `p2`, ...,
//! conjunction `&`, disjunction `|`, implication `->`, and the provability
//! operator `[]`. Negation `~A` is an abbreviation of `A -> bot` and is never
//! a node of its own.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// A propositional formula with a provability operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bottom,
    /// Propositional variable; indices are 1-based.
    Var(u32),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Boxed(Box<Formula>),
}

impl Formula {
    pub fn var(index: u32) -> Self {
        assert!(index > 0, "variable indices are 1-based");
        Formula::Var(index)
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Self {
        Formula::Or(Box::new(left), Box::new(right))
    }

    pub fn imp(premise: Formula, conclusion: Formula) -> Self {
        Formula::Imp(Box::new(premise), Box::new(conclusion))
    }

    pub fn boxed(body: Formula) -> Self {
        Formula::Boxed(Box::new(body))
    }

    /// `~A`, i.e. `A -> bot`.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Self {
        Formula::imp(f, Formula::Bottom)
    }

    /// `[]^k A`.
    pub fn boxed_n(count: u32, f: Formula) -> Self {
        (0..count).fold(f, |acc, _| Formula::boxed(acc))
    }

    /// Splits `[]^k A` into `(k, A)` where `A` is not box-rooted.
    pub fn strip_root_boxes(&self) -> (u32, &Formula) {
        let mut count = 0;
        let mut cur = self;
        while let Formula::Boxed(body) = cur {
            count += 1;
            cur = body;
        }
        (count, cur)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Bottom | Formula::Var(_))
    }

    /// Number of atomic occurrences (leaves).
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Var(_) => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.atom_count() + b.atom_count()
            }
            Formula::Boxed(a) => a.atom_count(),
        }
    }

    /// Deletes every box operator, recursively.
    pub fn strip_boxes(&self) -> Formula {
        match self {
            Formula::Bottom => Formula::Bottom,
            Formula::Var(i) => Formula::Var(*i),
            Formula::And(a, b) => Formula::and(a.strip_boxes(), b.strip_boxes()),
            Formula::Or(a, b) => Formula::or(a.strip_boxes(), b.strip_boxes()),
            Formula::Imp(a, b) => Formula::imp(a.strip_boxes(), b.strip_boxes()),
            Formula::Boxed(a) => a.strip_boxes(),
        }
    }

    pub fn contains_box(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Var(_) => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_box() || b.contains_box()
            }
            Formula::Boxed(_) => true,
        }
    }

    pub fn contains_imp(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Var(_) => false,
            Formula::Imp(_, _) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.contains_imp() || b.contains_imp(),
            Formula::Boxed(a) => a.contains_imp(),
        }
    }

    /// True iff no implication occurs inside the premise of any implication.
    pub fn is_increasing(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Var(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_increasing() && b.is_increasing(),
            Formula::Imp(a, b) => !a.contains_imp() && b.is_increasing(),
            Formula::Boxed(a) => a.is_increasing(),
        }
    }

    /// Variable indices occurring in the formula, in first-occurrence order.
    pub fn variables(&self) -> Vec<u32> {
        let mut out = Vec::new();
        fn walk(f: &Formula, out: &mut Vec<u32>) {
            match f {
                Formula::Bottom => {}
                Formula::Var(i) => {
                    if !out.contains(i) {
                        out.push(*i);
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Formula::Boxed(a) => walk(a, out),
            }
        }
        walk(self, &mut out);
        out
    }

    /// The subformula addressed by `path`, if the path is valid.
    pub fn subformula_at(&self, path: &[Step]) -> Option<&Formula> {
        let mut cur = self;
        for step in path {
            cur = match (cur, step) {
                (Formula::And(a, _), Step::Left)
                | (Formula::Or(a, _), Step::Left)
                | (Formula::Imp(a, _), Step::Left) => a,
                (Formula::And(_, b), Step::Right)
                | (Formula::Or(_, b), Step::Right)
                | (Formula::Imp(_, b), Step::Right) => b,
                (Formula::Boxed(a), Step::Body) => a,
                _ => return None,
            };
        }
        Some(cur)
    }

    /// Prefixes the `i`-th atomic occurrence (in schedule order) with
    /// `[]^counts[i]`. `counts` must have one entry per atomic occurrence.
    pub fn apply_boxes(&self, counts: &[u32]) -> Formula {
        fn go(f: &Formula, counts: &[u32], next: &mut usize) -> Formula {
            match f {
                Formula::Bottom | Formula::Var(_) => {
                    let k = counts[*next];
                    *next += 1;
                    Formula::boxed_n(k, f.clone())
                }
                Formula::And(a, b) => {
                    let left = go(a, counts, next);
                    let right = go(b, counts, next);
                    Formula::and(left, right)
                }
                Formula::Or(a, b) => {
                    let left = go(a, counts, next);
                    let right = go(b, counts, next);
                    Formula::or(left, right)
                }
                Formula::Imp(a, b) => {
                    let left = go(a, counts, next);
                    let right = go(b, counts, next);
                    Formula::imp(left, right)
                }
                Formula::Boxed(a) => Formula::boxed(go(a, counts, next)),
            }
        }
        assert_eq!(counts.len(), self.atom_count(), "one count per atom");
        let mut next = 0;
        go(self, counts, &mut next)
    }

    /// Inverse of [`Formula::apply_boxes`]: removes exactly the given
    /// prefixes. Returns `None` if `boxed` is not the result of inserting
    /// those prefixes into `self`.
    pub fn remove_boxes(&self, boxed: &Formula, counts: &[u32]) -> Option<Formula> {
        if &self.apply_boxes(counts) == boxed {
            Some(self.clone())
        } else {
            None
        }
    }
}

/// A child selector in a formula tree. `Left`/`Right` address the two
/// children of a binary connective (premise/conclusion for `->`);
/// `Body` enters a box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Left,
    Right,
    Body,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mover {
    Defender,
    Attacker,
}

impl Mover {
    pub fn from_polarity(p: Polarity) -> Mover {
        match p {
            Polarity::Positive => Mover::Defender,
            Polarity::Negative => Mover::Attacker,
        }
    }
}

/// The address of one atomic occurrence together with its polarity and the
/// player who moves on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrencePath {
    pub path: Vec<Step>,
    pub polarity: Polarity,
    pub mover: Mover,
}

/// The canonical move schedule of a formula: left before right for `&`/`|`,
/// premise (with polarity flipped) before conclusion for `->`, boxes
/// transparent.
pub fn atomic_occurrences(f: &Formula) -> Vec<OccurrencePath> {
    atomic_occurrences_from(f, Polarity::Positive)
}

/// Same as [`atomic_occurrences`] but starting from the given polarity,
/// as needed for antecedent formulas of a sequent.
pub fn atomic_occurrences_from(f: &Formula, start: Polarity) -> Vec<OccurrencePath> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    walk_occurrences(f, start, &mut path, &mut out);
    out
}

fn walk_occurrences(
    f: &Formula,
    pol: Polarity,
    path: &mut Vec<Step>,
    out: &mut Vec<OccurrencePath>,
) {
    match f {
        Formula::Bottom | Formula::Var(_) => out.push(OccurrencePath {
            path: path.clone(),
            polarity: pol,
            mover: Mover::from_polarity(pol),
        }),
        Formula::And(a, b) | Formula::Or(a, b) => {
            path.push(Step::Left);
            walk_occurrences(a, pol, path, out);
            path.pop();
            path.push(Step::Right);
            walk_occurrences(b, pol, path, out);
            path.pop();
        }
        Formula::Imp(a, b) => {
            path.push(Step::Left);
            walk_occurrences(a, pol.flip(), path, out);
            path.pop();
            path.push(Step::Right);
            walk_occurrences(b, pol, path, out);
            path.pop();
        }
        Formula::Boxed(a) => {
            path.push(Step::Body);
            walk_occurrences(a, pol, path, out);
            path.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

// Precedence levels: -> is 0 (lowest, right-associative), | is 1, & is 2,
// unary ~ / [] are 3.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Imp(_, b) if **b == Formula::Bottom => 3, // printed as ~A
        Formula::Imp(_, _) => 0,
        Formula::Or(_, _) => 1,
        Formula::And(_, _) => 2,
        Formula::Boxed(_) => 3,
        Formula::Bottom | Formula::Var(_) => 4,
    }
}

fn write_formula(f: &Formula, min: u8, out: &mut String) {
    let p = prec(f);
    let paren = p < min;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Bottom => out.push_str("bot"),
        Formula::Var(i) => {
            out.push('p');
            out.push_str(&i.to_string());
        }
        Formula::Imp(a, b) if **b == Formula::Bottom => {
            out.push('~');
            write_formula(a, 3, out);
        }
        Formula::Imp(a, b) => {
            write_formula(a, 1, out);
            out.push_str(" -> ");
            write_formula(b, 0, out);
        }
        Formula::Or(a, b) => {
            write_formula(a, 1, out);
            out.push_str(" | ");
            write_formula(b, 2, out);
        }
        Formula::And(a, b) => {
            write_formula(a, 2, out);
            out.push_str(" & ");
            write_formula(b, 3, out);
        }
        Formula::Boxed(a) => {
            out.push_str("[]");
            write_formula(a, 3, out);
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, 0, &mut s);
        f.write_str(&s)
    }
}

/// Renders a formula in the concrete syntax with minimal parentheses.
pub fn render(f: &Formula) -> String {
    f.to_string()
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: expected {expected}, found {found}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Bot,
    Ident(u32),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    BoxOp,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Bot => write!(f, "`bot`"),
            Token::Ident(i) => write!(f, "`p{i}`"),
            Token::Tilde => write!(f, "`~`"),
            Token::Amp => write!(f, "`&`"),
            Token::Pipe => write!(f, "`|`"),
            Token::Arrow => write!(f, "`->`"),
            Token::BoxOp => write!(f, "`[]`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn error(&self, expected: &str, found: String) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            expected: expected.to_string(),
            found,
        }
    }

    fn next_token(&mut self) -> Result<(Token, usize, usize), ParseError> {
        while matches!(
            self.peek(),
            Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')
        ) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let tok = match self.peek() {
            None => Token::Eof,
            Some(b'~') => {
                self.bump();
                Token::Tilde
            }
            Some(b'&') => {
                self.bump();
                Token::Amp
            }
            Some(b'|') => {
                self.bump();
                Token::Pipe
            }
            Some(b'(') => {
                self.bump();
                Token::LParen
            }
            Some(b')') => {
                self.bump();
                Token::RParen
            }
            Some(b'-') => {
                self.bump();
                match self.peek() {
                    Some(b'>') => {
                        self.bump();
                        Token::Arrow
                    }
                    other => {
                        return Err(self.error("`>` after `-`", printable(other)));
                    }
                }
            }
            Some(b'[') => {
                self.bump();
                match self.peek() {
                    Some(b']') => {
                        self.bump();
                        Token::BoxOp
                    }
                    other => {
                        return Err(self.error("`]` after `[`", printable(other)));
                    }
                }
            }
            Some(b'b') => {
                if self.src[self.pos..].starts_with(b"bot") {
                    self.pos += 3;
                    self.col += 3;
                    Token::Bot
                } else {
                    return Err(self.error("`bot`", printable(self.peek())));
                }
            }
            Some(b'p') => {
                self.bump();
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                if self.pos == start {
                    return Err(self.error("digits after `p`", printable(self.peek())));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let index: u32 = digits.parse().map_err(|_| {
                    self.error(
                        "a variable index that fits in 32 bits",
                        format!("`p{digits}`"),
                    )
                })?;
                if index == 0 {
                    return Err(self.error("a positive variable index", "`p0`".to_string()));
                }
                Token::Ident(index)
            }
            other => {
                return Err(self.error("`bot`, a variable, `~`, `[]`, or `(`", printable(other)));
            }
        };
        Ok((tok, line, col))
    }
}

fn printable(c: Option<u8>) -> String {
    match c {
        None => "end of input".to_string(),
        Some(c) => format!("`{}`", c as char),
    }
}

struct Parser {
    tokens: Vec<(Token, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let (tok, line, col) = &self.tokens[self.pos];
        ParseError {
            line: *line,
            col: *col,
            expected: expected.to_string(),
            found: tok.to_string(),
        }
    }

    // formula := imp
    // imp := or [ "->" imp ]
    fn imp(&mut self) -> Result<Formula, ParseError> {
        let left = self.or()?;
        if *self.peek() == Token::Arrow {
            self.bump();
            let right = self.imp()?;
            Ok(Formula::imp(left, right))
        } else {
            Ok(left)
        }
    }

    // or := and { "|" and }
    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.and()?;
        while *self.peek() == Token::Pipe {
            self.bump();
            let right = self.and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    // and := unary { "&" unary }
    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while *self.peek() == Token::Amp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    // unary := "[]" unary | "~" unary | atom
    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Token::BoxOp => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Token::Tilde => {
                self.bump();
                Ok(Formula::neg(self.unary()?))
            }
            _ => self.atom(),
        }
    }

    // atom := "bot" | ident | "(" formula ")"
    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Bot => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Token::Ident(i) => {
                self.bump();
                Ok(Formula::Var(i))
            }
            Token::LParen => {
                self.bump();
                let inner = self.imp()?;
                if *self.peek() == Token::RParen {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.error("`)`"))
                }
            }
            _ => Err(self.error("`bot`, a variable, `~`, `[]`, or `(`")),
        }
    }
}

/// Parses a formula from the concrete syntax.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        let t = lexer.next_token()?;
        let done = t.0 == Token::Eof;
        tokens.push(t);
        if done {
            break;
        }
    }
    let mut parser = Parser { tokens, pos: 0 };
    let f = parser.imp()?;
    if *parser.peek() != Token::Eof {
        return Err(parser.error("end of input"));
    }
    Ok(f)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse(&s).map_err(D::Error::custom)
    }
}
