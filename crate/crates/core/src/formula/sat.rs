//! Satisfiability, entailment and model enumeration.
//!
//! Everything goes through a [`Reasoner`], which wraps a pluggable
//! [`SatBackend`] and counts how many satisfiability calls it has issued.
//! Two backends ship: exhaustive [`TruthTable`] enumeration (the ground
//! truth for small vocabularies) and [`CnfSolver`], a structural CNF
//! encoding handed to a CDCL solver. They must agree on every input.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use varisat::{CnfFormula, ExtendFormula, Lit, Solver, Var};

use super::{vocab, Atom, Formula, Interpretation};
use crate::error::{Error, Result};

/// Largest vocabulary [`Reasoner::models`] will enumerate by default.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

/// A decision procedure for propositional satisfiability.
pub trait SatBackend: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Returns an assignment over `vocab(formulas)` satisfying all of them.
    fn solve(&self, formulas: &[Formula]) -> Option<Interpretation>;
}

/// Index-based copy of a formula for fast repeated evaluation.
pub(crate) enum Compiled {
    Const(bool),
    Var(usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn new(f: &Formula, index: &BTreeMap<&Atom, usize>) -> Compiled {
        let c = |g: &Formula| Box::new(Compiled::new(g, index));
        match f {
            Formula::True => Compiled::Const(true),
            Formula::False => Compiled::Const(false),
            Formula::Atom(a) => Compiled::Var(index[a]),
            Formula::Not(g) => Compiled::Not(c(g)),
            Formula::And(a, b) => Compiled::And(c(a), c(b)),
            Formula::Or(a, b) => Compiled::Or(c(a), c(b)),
            Formula::Implies(a, b) => Compiled::Implies(c(a), c(b)),
            Formula::Iff(a, b) => Compiled::Iff(c(a), c(b)),
        }
    }

    pub(crate) fn eval(&self, bits: u64) -> bool {
        match self {
            Compiled::Const(v) => *v,
            Compiled::Var(i) => bits >> i & 1 == 1,
            Compiled::Not(g) => !g.eval(bits),
            Compiled::And(a, b) => a.eval(bits) && b.eval(bits),
            Compiled::Or(a, b) => a.eval(bits) || b.eval(bits),
            Compiled::Implies(a, b) => !a.eval(bits) || b.eval(bits),
            Compiled::Iff(a, b) => a.eval(bits) == b.eval(bits),
        }
    }
}

fn compile_all(formulas: &[Formula], atoms: &[Atom]) -> Vec<Compiled> {
    let index: BTreeMap<&Atom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();
    formulas.iter().map(|f| Compiled::new(f, &index)).collect()
}

fn interpretation(atoms: &[Atom], bits: u64) -> Interpretation {
    Interpretation::new(
        atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), bits >> i & 1 == 1))
            .collect(),
    )
}

/// Exhaustive enumeration of all `2^n` assignments.
///
/// Panics on vocabularies of more than 40 atoms; it is meant as a reference
/// backend for small instances.
#[derive(Debug, Clone, Copy, Default)]
pub struct TruthTable;

impl SatBackend for TruthTable {
    fn name(&self) -> &'static str {
        "truth-table"
    }

    fn solve(&self, formulas: &[Formula]) -> Option<Interpretation> {
        let atoms: Vec<Atom> = vocab(formulas).into_iter().collect();
        assert!(
            atoms.len() <= 40,
            "truth-table backend asked to enumerate {} atoms",
            atoms.len()
        );
        let compiled = compile_all(formulas, &atoms);
        (0..1u64 << atoms.len())
            .find(|&bits| compiled.iter().all(|c| c.eval(bits)))
            .map(|bits| interpretation(&atoms, bits))
    }
}

/// Structural (Tseitin) CNF transformation solved with `varisat`.
///
/// The encoding is equisatisfiable with the input, and the returned model is
/// restricted to the input atoms, so it satisfies the original formulas.
#[derive(Debug, Clone, Copy, Default)]
pub struct CnfSolver;

struct Encoder {
    cnf: CnfFormula,
    atoms: BTreeMap<Atom, Var>,
    top: Option<Lit>,
}

impl Encoder {
    fn top(&mut self) -> Lit {
        if let Some(t) = self.top {
            return t;
        }
        let t = self.cnf.new_lit();
        self.cnf.add_clause(&[t]);
        self.top = Some(t);
        t
    }

    fn encode(&mut self, f: &Formula) -> Lit {
        match f {
            Formula::True => self.top(),
            Formula::False => !self.top(),
            Formula::Atom(a) => {
                if let Some(v) = self.atoms.get(a) {
                    return v.positive();
                }
                let v = self.cnf.new_var();
                self.atoms.insert(a.clone(), v);
                v.positive()
            }
            Formula::Not(g) => !self.encode(g),
            Formula::And(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let x = self.cnf.new_lit();
                self.cnf.add_clause(&[!x, a]);
                self.cnf.add_clause(&[!x, b]);
                self.cnf.add_clause(&[x, !a, !b]);
                x
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                self.or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                self.or(!a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = (self.encode(a), self.encode(b));
                let x = self.cnf.new_lit();
                self.cnf.add_clause(&[!x, !a, b]);
                self.cnf.add_clause(&[!x, a, !b]);
                self.cnf.add_clause(&[x, a, b]);
                self.cnf.add_clause(&[x, !a, !b]);
                x
            }
        }
    }

    fn or(&mut self, a: Lit, b: Lit) -> Lit {
        let x = self.cnf.new_lit();
        self.cnf.add_clause(&[!x, a, b]);
        self.cnf.add_clause(&[x, !a]);
        self.cnf.add_clause(&[x, !b]);
        x
    }

    /// Asserts `f`, splitting top-level conjunctions into separate units.
    fn assert(&mut self, f: &Formula) {
        match f {
            Formula::And(a, b) => {
                self.assert(a);
                self.assert(b);
            }
            Formula::True => {}
            _ => {
                let l = self.encode(f);
                self.cnf.add_clause(&[l]);
            }
        }
    }
}

impl SatBackend for CnfSolver {
    fn name(&self) -> &'static str {
        "cnf"
    }

    fn solve(&self, formulas: &[Formula]) -> Option<Interpretation> {
        let mut enc = Encoder {
            cnf: CnfFormula::new(),
            atoms: BTreeMap::new(),
            top: None,
        };
        for f in formulas {
            for a in f.vocab() {
                enc.encode(&Formula::Atom(a));
            }
            enc.assert(f);
        }
        let mut solver = Solver::new();
        solver.add_formula(&enc.cnf);
        match solver.solve() {
            Ok(true) => {}
            Ok(false) => return None,
            Err(e) => panic!("sat solver failure: {e}"),
        }
        let positive: BTreeSet<Var> = solver
            .model()
            .unwrap_or_default()
            .into_iter()
            .filter(|l| l.is_positive())
            .map(|l| l.var())
            .collect();
        Some(Interpretation::new(
            enc.atoms
                .into_iter()
                .map(|(a, v)| (a, positive.contains(&v)))
                .collect(),
        ))
    }
}

/// Front end over a backend, with an instrumented call counter.
///
/// A reasoner is shareable between threads; the counter is atomic.
#[derive(Debug)]
pub struct Reasoner {
    backend: Arc<dyn SatBackend>,
    limit: usize,
    calls: AtomicUsize,
}

impl Default for Reasoner {
    fn default() -> Reasoner {
        Reasoner::new(CnfSolver)
    }
}

impl Clone for Reasoner {
    /// Clones share the backend but start with a fresh call counter.
    fn clone(&self) -> Reasoner {
        Reasoner {
            backend: self.backend.clone(),
            limit: self.limit,
            calls: AtomicUsize::new(0),
        }
    }
}

impl Reasoner {
    pub fn new<B: SatBackend + 'static>(backend: B) -> Reasoner {
        Reasoner {
            backend: Arc::new(backend),
            limit: DEFAULT_ENUMERATION_LIMIT,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn truth_table() -> Reasoner {
        Reasoner::new(TruthTable)
    }

    pub fn with_enumeration_limit(mut self, limit: usize) -> Reasoner {
        self.limit = limit;
        self
    }

    pub fn enumeration_limit(&self) -> usize {
        self.limit
    }

    pub fn backend_name(&self) -> &'static str {
        self.backend.name()
    }

    /// Satisfiability calls issued so far.
    pub fn sat_calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset_sat_calls(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }

    pub(crate) fn check_limit(&self, what: &'static str, size: usize) -> Result<()> {
        if size > self.limit {
            return Err(Error::EnumerationLimit {
                what,
                size,
                limit: self.limit,
            });
        }
        Ok(())
    }

    pub fn satisfiable(&self, formulas: &[Formula]) -> bool {
        self.find_model(formulas).is_some()
    }

    pub fn find_model(&self, formulas: &[Formula]) -> Option<Interpretation> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.backend.solve(formulas)
    }

    /// `sigma ⊨ phi`, decided as unsatisfiability of `sigma ∪ {¬phi}`.
    pub fn entails(&self, sigma: &[Formula], phi: &Formula) -> bool {
        let mut all = sigma.to_vec();
        all.push(Formula::not(phi.clone()));
        !self.satisfiable(&all)
    }

    pub fn equivalent(&self, f: &Formula, g: &Formula) -> bool {
        self.entails(std::slice::from_ref(f), g) && self.entails(std::slice::from_ref(g), f)
    }

    /// All interpretations over `vocabulary` satisfying every formula.
    ///
    /// Models come out ordered by their sorted lists of true atoms, compared
    /// lexicographically: `{}`, `{p}`, `{p, q}`, `{q}`, ...
    pub fn models(
        &self,
        formulas: &[Formula],
        vocabulary: &BTreeSet<Atom>,
    ) -> Result<Vec<Interpretation>> {
        let used = vocab(formulas);
        if let Some(missing) = used.difference(vocabulary).next() {
            return Err(Error::Precondition(format!(
                "atom `{missing}` is not in the enumeration vocabulary"
            )));
        }
        self.check_limit("model enumeration vocabulary", vocabulary.len())?;
        let atoms: Vec<Atom> = vocabulary.iter().cloned().collect();
        let compiled = compile_all(formulas, &atoms);
        let mut found: Vec<u64> = (0..1u64 << atoms.len())
            .filter(|&bits| compiled.iter().all(|c| c.eval(bits)))
            .collect();
        found.sort_by_key(|&bits| {
            (0..atoms.len())
                .filter(|i| bits >> i & 1 == 1)
                .collect::<Vec<_>>()
        });
        Ok(found.into_iter().map(|b| interpretation(&atoms, b)).collect())
    }
}

pub fn satisfiable(formulas: &[Formula]) -> bool {
    Reasoner::default().satisfiable(formulas)
}

pub fn entails(sigma: &[Formula], phi: &Formula) -> bool {
    Reasoner::default().entails(sigma, phi)
}

pub fn equivalent(f: &Formula, g: &Formula) -> bool {
    Reasoner::default().equivalent(f, g)
}

pub fn models(formulas: &[Formula], vocabulary: &BTreeSet<Atom>) -> Result<Vec<Interpretation>> {
    Reasoner::default().models(formulas, vocabulary)
}
