//! Propositional language core.
//!
//! Formulas are plain trees over named atoms. Every atom lives either in the
//! base alphabet or in its primed shadow copy; the shadow copy is only used
//! while a belief change is being computed, and results are always expressed
//! over the base alphabet again.

mod parse;
mod sat;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use parse::{parse, parse_kb, parse_with, ParseError, ParseOptions};
pub use sat::{
    entails, equivalent, models, satisfiable, CnfSolver, Reasoner, SatBackend, TruthTable,
    DEFAULT_ENUMERATION_LIMIT,
};

/// A propositional letter, possibly from the primed alphabet.
///
/// Ordering is lexicographic by name, then unprimed before primed. Every
/// set-of-atoms output in the crate relies on this order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    name: Arc<str>,
    primed: bool,
}

impl Atom {
    /// Creates an unprimed atom.
    ///
    /// Panics if `name` is not an identifier; use [`Atom::try_new`] for
    /// untrusted input.
    pub fn new(name: &str) -> Atom {
        match Atom::try_new(name) {
            Ok(atom) => atom,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(name: &str) -> Result<Atom> {
        if !is_identifier(name) {
            return Err(Error::Precondition(format!(
                "`{name}` is not a valid atom name"
            )));
        }
        Ok(Atom {
            name: Arc::from(name),
            primed: false,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_primed(&self) -> bool {
        self.primed
    }

    /// The shadow copy `p'` of this atom.
    pub fn primed(&self) -> Atom {
        Atom {
            name: self.name.clone(),
            primed: true,
        }
    }

    pub fn unprimed(&self) -> Atom {
        Atom {
            name: self.name.clone(),
            primed: false,
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && s != "true" && s != "false"
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.primed {
            write!(f, "{}'", self.name)
        } else {
            f.write_str(&self.name)
        }
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Propositional formula over the connectives `⊤ ⊥ ¬ ∧ ∨ → ↔`.
///
/// Structural equality is syntactic; use [`equivalent`] for logical equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(Atom::new(name))
    }

    pub fn var(atom: Atom) -> Formula {
        Formula::Atom(atom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conjoin<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `⊥` when empty.
    pub fn disjoin<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn vocab(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => {
                if !out.contains(a) {
                    out.insert(a.clone());
                }
            }
            Formula::Not(g) => g.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// The first primed atom in the formula, in atom order.
    pub fn first_primed(&self) -> Option<Atom> {
        self.vocab().into_iter().find(Atom::is_primed)
    }

    pub fn eval<F: Fn(&Atom) -> bool>(&self, value: &F) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => value(a),
            Formula::Not(g) => !g.eval(value),
            Formula::And(a, b) => a.eval(value) && b.eval(value),
            Formula::Or(a, b) => a.eval(value) || b.eval(value),
            Formula::Implies(a, b) => !a.eval(value) || b.eval(value),
            Formula::Iff(a, b) => a.eval(value) == b.eval(value),
        }
    }

    /// Formula length: atom and constant occurrences plus binary connectives.
    /// Negations are not counted, so replacing an atom by its negation leaves
    /// the length unchanged.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(g) => g.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Number of AST nodes, negations included.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.node_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// Homomorphic substitution of every atom occurrence.
    pub fn map_atoms<F: FnMut(&Atom) -> Formula>(&self, f: &mut F) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
        }
    }

    /// Constant folding. Only rewrites that remove `⊤`/`⊥` are applied, so the
    /// result is equivalent and never mentions an atom the input did not.
    pub fn fold_constants(&self) -> Formula {
        use Formula::*;
        match self {
            True | False | Atom(_) => self.clone(),
            Not(g) => match g.fold_constants() {
                True => False,
                False => True,
                g => Formula::not(g),
            },
            And(a, b) => match (a.fold_constants(), b.fold_constants()) {
                (False, _) | (_, False) => False,
                (True, x) | (x, True) => x,
                (x, y) => Formula::and(x, y),
            },
            Or(a, b) => match (a.fold_constants(), b.fold_constants()) {
                (True, _) | (_, True) => True,
                (False, x) | (x, False) => x,
                (x, y) => Formula::or(x, y),
            },
            Implies(a, b) => match (a.fold_constants(), b.fold_constants()) {
                (False, _) | (_, True) => True,
                (True, x) => x,
                (x, False) => Formula::not(x),
                (x, y) => Formula::implies(x, y),
            },
            Iff(a, b) => match (a.fold_constants(), b.fold_constants()) {
                (True, x) | (x, True) => x,
                (False, False) => True,
                (False, x) | (x, False) => Formula::not(x),
                (x, y) => Formula::iff(x, y),
            },
        }
    }

    /// Builds a formula whose models over `vocabulary` are exactly `worlds`
    /// (each world given as its set of true atoms).
    ///
    /// The result is a disjunction of terms over the atoms the set actually
    /// depends on, so e.g. the world set `{{p}, {p, q}}` over `{p, q}` comes
    /// back as plain `p`.
    pub fn from_worlds<'a, I>(vocabulary: &BTreeSet<Atom>, worlds: I) -> Formula
    where
        I: IntoIterator<Item = &'a BTreeSet<Atom>>,
    {
        let atoms: Vec<&Atom> = vocabulary.iter().collect();
        let n = atoms.len();
        assert!(n < 64, "world sets are limited to 63 atoms");
        let encode = |w: &BTreeSet<Atom>| -> u64 {
            atoms
                .iter()
                .enumerate()
                .filter(|(_, a)| w.contains(**a))
                .fold(0u64, |acc, (i, _)| acc | (1 << i))
        };
        let set: BTreeSet<u64> = worlds.into_iter().map(encode).collect();
        if set.is_empty() {
            return Formula::False;
        }
        let essential: Vec<usize> = (0..n)
            .filter(|&i| set.iter().any(|w| !set.contains(&(w ^ (1 << i)))))
            .collect();
        if essential.is_empty() {
            return Formula::True;
        }
        let projected: BTreeSet<Vec<bool>> = set
            .iter()
            .map(|w| essential.iter().map(|&i| w & (1 << i) != 0).collect())
            .collect();
        let terms = projected.into_iter().rev().map(|bits| {
            Formula::conjoin(essential.iter().zip(bits).map(|(&i, on)| {
                let lit = Formula::var(atoms[i].clone());
                if on {
                    lit
                } else {
                    Formula::not(lit)
                }
            }))
        });
        Formula::disjoin(terms)
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Formulas serialize as their rendered text and deserialize by parsing,
/// with primed atoms allowed.
impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Formula, D::Error> {
        let text = String::deserialize(d)?;
        parse_with(&text, ParseOptions { allow_primed: true }).map_err(serde::de::Error::custom)
    }
}

impl From<Atom> for Formula {
    fn from(a: Atom) -> Formula {
        Formula::Atom(a)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Union of the vocabularies of several formulas.
pub fn vocab<'a, I: IntoIterator<Item = &'a Formula>>(fs: I) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    for f in fs {
        f.collect_atoms(&mut out);
    }
    out
}

/// A finite set of formulas standing for its deductive closure.
///
/// There is deliberately no `PartialEq`: two bases are equal when their
/// conjunctions are logically equivalent, see [`BeliefBase::equivalent`].
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BeliefBase {
    formulas: Vec<Formula>,
}

impl BeliefBase {
    /// Builds a base, rejecting primed atoms.
    pub fn new(formulas: Vec<Formula>) -> Result<BeliefBase> {
        for f in &formulas {
            if let Some(atom) = f.first_primed() {
                return Err(Error::PrimedAtom {
                    atom: atom.to_string(),
                    context: "a belief base",
                });
            }
        }
        Ok(BeliefBase { formulas })
    }

    /// Single-formula base. Panics on primed atoms.
    pub fn from_formula(f: Formula) -> BeliefBase {
        BeliefBase::new(vec![f]).expect("belief bases are primed-free")
    }

    /// The inconsistent base `{⊥}`.
    pub fn inconsistent() -> BeliefBase {
        BeliefBase {
            formulas: vec![Formula::False],
        }
    }

    pub fn parse(text: &str) -> Result<BeliefBase> {
        BeliefBase::new(parse_kb(text, ParseOptions::default())?)
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }

    /// The conjunction of all members; `⊤` for the empty base.
    pub fn conjunction(&self) -> Formula {
        Formula::conjoin(self.formulas.iter().cloned())
    }

    pub fn vocab(&self) -> BTreeSet<Atom> {
        vocab(&self.formulas)
    }

    /// Whether this base is literally `{⊥}`.
    pub fn is_bottom(&self) -> bool {
        matches!(self.formulas.as_slice(), [Formula::False])
    }

    pub fn is_consistent(&self) -> bool {
        satisfiable(&self.formulas)
    }

    pub fn equivalent(&self, other: &BeliefBase) -> bool {
        equivalent(&self.conjunction(), &other.conjunction())
    }
}

impl From<Formula> for BeliefBase {
    fn from(f: Formula) -> BeliefBase {
        BeliefBase::from_formula(f)
    }
}

/// A total truth assignment over a stated vocabulary, identified with the set
/// of atoms it makes true.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interpretation {
    assignment: BTreeMap<Atom, bool>,
}

impl Interpretation {
    pub fn new(assignment: BTreeMap<Atom, bool>) -> Interpretation {
        Interpretation { assignment }
    }

    /// Builds the interpretation over `vocabulary` making exactly `true_atoms` true.
    pub fn from_true_atoms(vocabulary: &BTreeSet<Atom>, true_atoms: &BTreeSet<Atom>) -> Interpretation {
        Interpretation {
            assignment: vocabulary
                .iter()
                .map(|a| (a.clone(), true_atoms.contains(a)))
                .collect(),
        }
    }

    pub fn value(&self, atom: &Atom) -> Option<bool> {
        self.assignment.get(atom).copied()
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &Atom> {
        self.assignment.keys()
    }

    pub fn true_atoms(&self) -> BTreeSet<Atom> {
        self.assignment
            .iter()
            .filter(|(_, v)| **v)
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Evaluates `f`; atoms outside the vocabulary read as false.
    pub fn satisfies(&self, f: &Formula) -> bool {
        f.eval(&|a| self.value(a).unwrap_or(false))
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (atom, value)) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{atom}={}", if *value { "T" } else { "F" })?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
