//! Alphabet machinery: moving formulas into the primed alphabet, the two
//! substitutions used to express results without primes, and forgetting.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::formula::{Atom, Formula, DEFAULT_ENUMERATION_LIMIT};

/// A set of equivalences `p ↔ p'`, stored as the unprimed atoms `p` it
/// contains together with the candidate pool it was drawn from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EqSet {
    included: BTreeSet<Atom>,
    candidates: BTreeSet<Atom>,
}

impl EqSet {
    pub fn new(included: BTreeSet<Atom>, candidates: BTreeSet<Atom>) -> Result<EqSet> {
        if let Some(a) = included.iter().chain(&candidates).find(|a| a.is_primed()) {
            return Err(Error::PrimedAtom {
                atom: a.to_string(),
                context: "an equivalence set",
            });
        }
        if let Some(a) = included.difference(&candidates).next() {
            return Err(Error::Precondition(format!(
                "`{a}` is included but is not a candidate"
            )));
        }
        Ok(EqSet {
            included,
            candidates,
        })
    }

    pub(crate) fn new_unchecked(included: BTreeSet<Atom>, candidates: BTreeSet<Atom>) -> EqSet {
        debug_assert!(included.is_subset(&candidates));
        EqSet {
            included,
            candidates,
        }
    }

    pub fn included(&self) -> &BTreeSet<Atom> {
        &self.included
    }

    pub fn candidates(&self) -> &BTreeSet<Atom> {
        &self.candidates
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.included.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.included.len()
    }

    pub fn is_empty(&self) -> bool {
        self.included.is_empty()
    }

    /// Candidates whose equivalence is *not* assumed.
    pub fn complement(&self) -> BTreeSet<Atom> {
        self.candidates.difference(&self.included).cloned().collect()
    }

    /// `{p ↔ p' | p ∈ included}`.
    pub fn as_formulas(&self) -> Vec<Formula> {
        self.included
            .iter()
            .map(|p| Formula::iff(Formula::var(p.clone()), Formula::var(p.primed())))
            .collect()
    }

    /// Complement membership in the given atom order; comparing these keys
    /// lexicographically (false < true) is the canonical family order.
    pub(crate) fn complement_key<'a, I: IntoIterator<Item = &'a Atom>>(&self, order: I) -> Vec<bool> {
        order
            .into_iter()
            .map(|a| self.candidates.contains(a) && !self.included.contains(a))
            .collect()
    }
}

impl fmt::Display for EqSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.included.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for EqSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.included.iter().map(|a| a.to_string()))
    }
}

/// Replaces every atom `p` by `p'`.
pub fn prime(f: &Formula) -> Result<Formula> {
    if let Some(a) = f.first_primed() {
        return Err(Error::PrimedAtom {
            atom: a.to_string(),
            context: "a formula being primed",
        });
    }
    Ok(f.map_atoms(&mut |a| Formula::var(a.primed())))
}

/// Replaces every `p'` by `p`; unprimed atoms are left alone.
pub fn unprime(f: &Formula) -> Formula {
    f.map_atoms(&mut |a| Formula::var(a.unprimed()))
}

/// Replaces each occurrence of an atom in `flip` by its negation.
///
/// A chain of `k` negations directly above a flipped atom becomes `k + 1`
/// negations when `k` is even and `k - 1` when it is odd, so the
/// substitution is an involution on syntax, not just on meaning.
pub fn flip_subst(f: &Formula, flip: &BTreeSet<Atom>) -> Formula {
    let mut depth = 0;
    let mut base = f;
    while let Formula::Not(inner) = base {
        depth += 1;
        base = inner;
    }
    let wrap = |mut g: Formula, k: usize| {
        for _ in 0..k {
            g = Formula::not(g);
        }
        g
    };
    match base {
        Formula::Atom(a) if flip.contains(a) => {
            let k = if depth % 2 == 0 { depth + 1 } else { depth - 1 };
            wrap(base.clone(), k)
        }
        _ if depth > 0 => wrap(flip_subst(base, flip), depth),
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(_) => unreachable!(),
        Formula::And(a, b) => Formula::and(flip_subst(a, flip), flip_subst(b, flip)),
        Formula::Or(a, b) => Formula::or(flip_subst(a, flip), flip_subst(b, flip)),
        Formula::Implies(a, b) => Formula::implies(flip_subst(a, flip), flip_subst(b, flip)),
        Formula::Iff(a, b) => Formula::iff(flip_subst(a, flip), flip_subst(b, flip)),
    }
}

/// Replaces each atom in the domain of `pi` by the constant it maps to.
pub fn truth_subst(f: &Formula, pi: &BTreeMap<Atom, bool>) -> Formula {
    f.map_atoms(&mut |a| match pi.get(a) {
        Some(true) => Formula::True,
        Some(false) => Formula::False,
        None => Formula::var(a.clone()),
    })
}

/// All truth assignments to `atoms`, in canonical order: binary counting
/// with the first atom most significant and false before true.
pub fn assignments(atoms: &BTreeSet<Atom>) -> impl Iterator<Item = BTreeMap<Atom, bool>> + '_ {
    let n = atoms.len();
    (0..1u64 << n).map(move |bits| {
        atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), bits >> (n - 1 - i) & 1 == 1))
            .collect()
    })
}

/// The unsimplified disjuncts of `forget(f, atoms)`: one truth substitution
/// per assignment, in canonical order.
pub fn forget_terms(f: &Formula, atoms: &BTreeSet<Atom>, limit: usize) -> Result<Vec<Formula>> {
    if atoms.len() > limit {
        return Err(Error::EnumerationLimit {
            what: "set of forgotten atoms",
            size: atoms.len(),
            limit,
        });
    }
    Ok(assignments(atoms).map(|pi| truth_subst(f, &pi)).collect())
}

/// Existentially quantifies `atoms` away: the strongest consequence of `f`
/// that does not mention them. Constant folding is the only simplification.
pub fn forget(f: &Formula, atoms: &BTreeSet<Atom>) -> Result<Formula> {
    forget_with_limit(f, atoms, DEFAULT_ENUMERATION_LIMIT)
}

pub fn forget_with_limit(f: &Formula, atoms: &BTreeSet<Atom>, limit: usize) -> Result<Formula> {
    let terms = forget_terms(f, atoms, limit)?;
    Ok(Formula::disjoin(terms.iter().map(Formula::fold_constants)).fold_constants())
}
