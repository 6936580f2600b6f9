//! Update: revise each prime implicant of `K` separately and take the union
//! of the resulting model sets.
//!
//! The "prime implicates" of a base are its minimal consistent literal sets
//! that entail it, usually called prime implicants. They are found by
//! Quine–McCluskey merging over the models of `K`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::change::{revise, ChangeOptions};
use crate::error::{Error, Result};
use crate::formula::{Atom, BeliefBase, Formula, Reasoner};
use crate::scenario::MaximalityMode;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn positive(atom: Atom) -> Literal {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn negative(atom: Atom) -> Literal {
        Literal { atom, negated: true }
    }

    pub fn as_formula(&self) -> Formula {
        let a = Formula::var(self.atom.clone());
        if self.negated {
            Formula::not(a)
        } else {
            a
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("~")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// A consistent set of unprimed literals.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiteralSet {
    literals: BTreeSet<Literal>,
}

impl LiteralSet {
    pub fn new<I: IntoIterator<Item = Literal>>(literals: I) -> Result<LiteralSet> {
        let literals: BTreeSet<Literal> = literals.into_iter().collect();
        for l in &literals {
            if l.atom.is_primed() {
                return Err(Error::PrimedAtom {
                    atom: l.atom.to_string(),
                    context: "a literal set",
                });
            }
            if !l.negated && literals.contains(&Literal::negative(l.atom.clone())) {
                return Err(Error::Precondition(format!(
                    "`{}` occurs with both polarities",
                    l.atom
                )));
            }
        }
        Ok(LiteralSet { literals })
    }

    pub fn literals(&self) -> &BTreeSet<Literal> {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// The conjunction; `⊤` for the empty set.
    pub fn as_formula(&self) -> Formula {
        Formula::conjoin(self.literals.iter().map(Literal::as_formula))
    }

    pub fn as_base(&self) -> BeliefBase {
        BeliefBase::from_formula(self.as_formula())
    }
}

impl fmt::Display for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for LiteralSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.literals.iter().map(|l| l.to_string()))
    }
}

/// A cube: `mask` marks the fixed variables, `bits` their values.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Cube {
    mask: u64,
    bits: u64,
}

/// All prime implicants of `k`, in canonical order: lexicographic over the
/// sorted literal sequences. Empty iff `k` is unsatisfiable; `[{}]` iff `k`
/// is valid.
pub fn prime_implicates(reasoner: &Reasoner, k: &BeliefBase) -> Result<Vec<LiteralSet>> {
    let vocabulary = k.vocab();
    let atoms: Vec<Atom> = vocabulary.iter().cloned().collect();
    let n = atoms.len();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut level: HashSet<Cube> = reasoner
        .models(k.formulas(), &vocabulary)?
        .iter()
        .map(|m| Cube {
            mask: full,
            bits: atoms
                .iter()
                .enumerate()
                .filter(|(_, a)| m.value(a) == Some(true))
                .fold(0, |acc, (i, _)| acc | 1 << i),
        })
        .collect();
    let mut primes: Vec<Cube> = Vec::new();
    while !level.is_empty() {
        let mut next: HashSet<Cube> = HashSet::new();
        let mut merged: HashSet<Cube> = HashSet::new();
        for c in &level {
            for i in 0..n {
                let bit = 1u64 << i;
                if c.mask & bit == 0 || c.bits & bit != 0 {
                    continue;
                }
                let partner = Cube {
                    mask: c.mask,
                    bits: c.bits | bit,
                };
                if level.contains(&partner) {
                    merged.insert(*c);
                    merged.insert(partner);
                    next.insert(Cube {
                        mask: c.mask & !bit,
                        bits: c.bits,
                    });
                }
            }
        }
        primes.extend(level.iter().filter(|c| !merged.contains(c)));
        level = next;
    }
    let mut out: Vec<(Vec<Literal>, LiteralSet)> = primes
        .into_iter()
        .map(|c| {
            let lits: Vec<Literal> = (0..n)
                .filter(|i| c.mask >> i & 1 == 1)
                .map(|i| Literal {
                    atom: atoms[i].clone(),
                    negated: c.bits >> i & 1 == 0,
                })
                .collect();
            let set = LiteralSet::new(lits.iter().cloned()).expect("cubes are consistent");
            (set.literals.iter().cloned().collect(), set)
        })
        .collect();
    out.sort();
    Ok(out.into_iter().map(|(_, s)| s).collect())
}

/// `K ⋄ α` with inclusion-maximal equivalence sets.
pub fn update(reasoner: &Reasoner, k: &BeliefBase, alpha: &Formula) -> Result<BeliefBase> {
    update_with_mode(reasoner, k, alpha, MaximalityMode::Inclusion)
}

/// Skeptically revises each prime implicant by `α` and disjoins the
/// results. `{⊥}` when `k` is unsatisfiable or every part is.
pub fn update_with_mode(
    reasoner: &Reasoner,
    k: &BeliefBase,
    alpha: &Formula,
    mode: MaximalityMode,
) -> Result<BeliefBase> {
    let opts = ChangeOptions::skeptical().with_mode(mode);
    let mut parts = Vec::new();
    for implicant in prime_implicates(reasoner, k)? {
        let revised = revise(reasoner, &implicant.as_base(), alpha, &opts)?;
        if !revised.is_bottom() {
            parts.push(revised.conjunction());
        }
    }
    if parts.is_empty() {
        return Ok(BeliefBase::inconsistent());
    }
    Ok(BeliefBase::from_formula(Formula::disjoin(parts)))
}
