//! Boolean formulas over signal occurrences.
//!
//! A [`Formula`] triggers a transition: it is satisfied by the set of signals
//! present in the current step. Formulas are plain expression trees. The smart
//! constructors ([`Formula::and`], [`Formula::or`], [`Formula::not`]) fold
//! constants and double negations and nothing else, so printed output stays
//! stable across runs.
//!
//! Concrete syntax: `+` disjunction, `*` conjunction, `-` prefix negation,
//! `0` / `1` constants and parentheses. Negation binds tightest, then `*`,
//! then `+`; binary operators associate to the left.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest number of distinct atoms for which satisfiability is decided by
/// exhaustive enumeration.
pub const DEFAULT_ATOM_CAP: usize = 24;

/// An elementary signal. Cloning is cheap; equality and ordering are by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signal(Arc<str>);

pub type SignalSet = BTreeSet<Signal>;

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

impl Signal {
    pub fn new(name: &str) -> Result<Self> {
        if is_identifier(name) {
            Ok(Signal(Arc::from(name)))
        } else {
            Err(Error::InvalidName(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Signal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Builds a signal set from names, panicking on malformed names. Intended for
/// tests and literals.
pub fn signals<'a>(names: impl IntoIterator<Item = &'a str>) -> SignalSet {
    names
        .into_iter()
        .map(|n| Signal::new(n).expect("valid signal name"))
        .collect()
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    False,
    True,
    Atom(Signal),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(signal: Signal) -> Self {
        Formula::Atom(signal)
    }

    /// Shorthand for an atom by name; panics on a malformed name.
    pub fn var(name: &str) -> Self {
        Formula::Atom(Signal::new(name).expect("valid signal name"))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        match (a, b) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, f) | (f, Formula::True) => f,
            (a, b) => Formula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        match (a, b) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, f) | (f, Formula::False) => f,
            (a, b) => Formula::Or(Box::new(a), Box::new(b)),
        }
    }

    /// Left-nested conjunction; the empty conjunction is `1`.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().fold(Formula::True, Formula::and)
    }

    /// Left-nested disjunction; the empty disjunction is `0`.
    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().fold(Formula::False, Formula::or)
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Formula::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self, Formula::False)
    }

    /// The set of signals mentioned by the formula.
    pub fn signals(&self) -> SignalSet {
        let mut acc = SignalSet::new();
        self.collect_signals(&mut acc);
        acc
    }

    fn collect_signals(&self, acc: &mut SignalSet) {
        match self {
            Formula::False | Formula::True => {}
            Formula::Atom(s) => {
                acc.insert(s.clone());
            }
            Formula::Not(f) => f.collect_signals(acc),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_signals(acc);
                b.collect_signals(acc);
            }
        }
    }

    /// Evaluates the formula with exactly the signals in `present` occurring.
    pub fn eval(&self, present: &SignalSet) -> bool {
        self.eval_with(&|s| present.contains(s))
    }

    pub fn eval_with(&self, occurs: &impl Fn(&Signal) -> bool) -> bool {
        match self {
            Formula::False => false,
            Formula::True => true,
            Formula::Atom(s) => occurs(s),
            Formula::Not(f) => !f.eval_with(occurs),
            Formula::And(a, b) => a.eval_with(occurs) && b.eval_with(occurs),
            Formula::Or(a, b) => a.eval_with(occurs) || b.eval_with(occurs),
        }
    }

    /// Substitutes `1` for atoms in `present` and `0` for atoms in
    /// `outputs \ present`, then folds constants. Other atoms are kept.
    pub fn reduce(&self, present: &SignalSet, outputs: &SignalSet) -> Formula {
        match self {
            Formula::False => Formula::False,
            Formula::True => Formula::True,
            Formula::Atom(s) => {
                if present.contains(s) {
                    Formula::True
                } else if outputs.contains(s) {
                    Formula::False
                } else {
                    Formula::Atom(s.clone())
                }
            }
            Formula::Not(f) => Formula::not(f.reduce(present, outputs)),
            Formula::And(a, b) => Formula::and(a.reduce(present, outputs), b.reduce(present, outputs)),
            Formula::Or(a, b) => Formula::or(a.reduce(present, outputs), b.reduce(present, outputs)),
        }
    }

    /// The output formula of a state: every signal of `out` asserted, every
    /// other signal of `alphabet` negated, in alphabet order.
    pub fn output_formula(out: &SignalSet, alphabet: &SignalSet) -> Result<Formula> {
        if let Some(stray) = out.iter().find(|s| !alphabet.contains(*s)) {
            return Err(Error::OutSetNotInAlphabet(stray.name().to_string()));
        }
        Ok(Formula::conjunction(alphabet.iter().map(|s| {
            let atom = Formula::Atom(s.clone());
            if out.contains(s) {
                atom
            } else {
                Formula::not(atom)
            }
        })))
    }

    /// Searches for an assignment over `sig(self)` on which the formula
    /// evaluates to `target`.
    pub fn find_assignment(&self, target: bool, cap: usize) -> Result<Option<SignalSet>> {
        match self {
            Formula::True => return Ok(target.then(SignalSet::new)),
            Formula::False => return Ok((!target).then(SignalSet::new)),
            _ => {}
        }
        let atoms: Vec<Signal> = self.signals().into_iter().collect();
        if atoms.len() > cap {
            return Err(Error::AtomCapExceeded {
                atoms: atoms.len(),
                cap,
            });
        }
        for mask in 0u64..(1u64 << atoms.len()) {
            let occurs = |s: &Signal| {
                let idx = atoms.binary_search(s).expect("atom collected above");
                mask >> idx & 1 == 1
            };
            if self.eval_with(&occurs) == target {
                let set = atoms
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, s)| s.clone())
                    .collect();
                return Ok(Some(set));
            }
        }
        Ok(None)
    }

    pub fn is_unsatisfiable(&self) -> Result<bool> {
        self.is_unsatisfiable_with_cap(DEFAULT_ATOM_CAP)
    }

    pub fn is_unsatisfiable_with_cap(&self, cap: usize) -> Result<bool> {
        Ok(self.find_assignment(true, cap)?.is_none())
    }

    pub fn is_tautology(&self) -> Result<bool> {
        Ok(self.find_assignment(false, DEFAULT_ATOM_CAP)?.is_none())
    }

    /// Semantic equivalence (same Boolean function).
    pub fn equivalent(&self, other: &Formula) -> Result<bool> {
        let differ = Formula::or(
            Formula::and(self.clone(), Formula::not(other.clone())),
            Formula::and(Formula::not(self.clone()), other.clone()),
        );
        differ.is_unsatisfiable()
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(self, 0, f)
    }
}

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;

fn write_prec(formula: &Formula, ctx: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match formula {
        Formula::False => f.write_str("0"),
        Formula::True => f.write_str("1"),
        Formula::Atom(s) => f.write_str(s.name()),
        Formula::Not(inner) => {
            f.write_str("-")?;
            write_prec(inner, PREC_NOT, f)
        }
        Formula::And(a, b) => {
            let paren = ctx > PREC_AND;
            if paren {
                f.write_str("(")?;
            }
            write_prec(a, PREC_AND, f)?;
            f.write_str("*")?;
            write_prec(b, PREC_NOT, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        Formula::Or(a, b) => {
            let paren = ctx > PREC_OR;
            if paren {
                f.write_str("(")?;
            }
            write_prec(a, PREC_OR, f)?;
            f.write_str(" + ")?;
            write_prec(b, PREC_AND, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut parser = Parser {
            text,
            chars: text.char_indices().collect(),
            pos: 0,
        };
        let f = parser.expr()?;
        parser.skip_ws();
        if parser.pos < parser.chars.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(f)
    }
}

/// Recursive-descent parser; builds the tree verbatim without simplification.
struct Parser<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        let column = self
            .chars
            .get(self.pos)
            .map(|(i, _)| *i)
            .unwrap_or(self.text.len());
        Error::Syntax {
            column: column + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn expr(&mut self) -> Result<Formula> {
        let mut lhs = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Formula> {
        let mut lhs = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Formula> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Formula::Not(Box::new(self.factor()?)))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('0') => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some('1') => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len() {
                    let c = self.chars[self.pos].1;
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let name: String = self.chars[start..self.pos].iter().map(|(_, c)| *c).collect();
                Ok(Formula::Atom(Signal::new(&name)?))
            }
            Some(_) => Err(self.error("expected a signal, constant, '-' or '('")),
            None => Err(self.error("unexpected end of formula")),
        }
    }
}
