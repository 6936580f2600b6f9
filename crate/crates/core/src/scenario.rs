//! Belief change scenarios `(K, U, V)` and their maximal equivalence sets.
//!
//! `K` is rewritten over the primed alphabet; `U` must hold after the change
//! and `V` must stay consistent with it. An equivalence set `EQ` is
//! consistent when `K' ∪ EQ ∪ U ∪ V` is satisfiable, and every maximal
//! consistent one determines an extension
//! `Th(K' ∪ EQ ∪ U)` restricted to the unprimed alphabet.
//!
//! Only atoms that occur on both sides of the scenario can ever be dropped
//! from a maximal set. All other equivalences are forced in, and the search
//! runs over the contested atoms alone.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{vocab, Atom, BeliefBase, Formula, Reasoner, DEFAULT_ENUMERATION_LIMIT};
use crate::renaming::{self, flip_subst, truth_subst, EqSet};

#[derive(Clone, Debug)]
pub struct Scenario {
    k: BeliefBase,
    u: Vec<Formula>,
    v: Vec<Formula>,
}

impl Scenario {
    /// `K` and `U` must be primed-free; `V` may mention primed atoms, which
    /// then refer to the state before the change.
    pub fn new(k: BeliefBase, u: Vec<Formula>, v: Vec<Formula>) -> Result<Scenario> {
        for f in &u {
            if let Some(a) = f.first_primed() {
                return Err(Error::PrimedAtom {
                    atom: a.to_string(),
                    context: "the formulas that must hold after the change",
                });
            }
        }
        Ok(Scenario { k, u, v })
    }

    /// `(K, {α}, ∅)`.
    pub fn revision(k: BeliefBase, alpha: Formula) -> Result<Scenario> {
        Scenario::new(k, vec![alpha], Vec::new())
    }

    /// `(K, ∅, {¬α})`.
    pub fn contraction(k: BeliefBase, alpha: Formula) -> Result<Scenario> {
        if let Some(a) = alpha.first_primed() {
            return Err(Error::PrimedAtom {
                atom: a.to_string(),
                context: "a contracted formula",
            });
        }
        Scenario::new(k, Vec::new(), vec![Formula::not(alpha)])
    }

    pub fn k(&self) -> &BeliefBase {
        &self.k
    }

    pub fn u(&self) -> &[Formula] {
        &self.u
    }

    pub fn v(&self) -> &[Formula] {
        &self.v
    }

    pub(crate) fn primed_k(&self) -> Vec<Formula> {
        self.k
            .formulas()
            .iter()
            .map(|f| renaming::prime(f).expect("belief bases are primed-free"))
            .collect()
    }

    /// `K' ∪ U ∪ V`.
    pub fn base_formulas(&self) -> Vec<Formula> {
        let mut out = self.primed_k();
        out.extend(self.u.iter().cloned());
        out.extend(self.v.iter().cloned());
        out
    }

    /// Atoms whose equivalence may be given up.
    ///
    /// Unrestricted, this is every atom of the scenario (primes dropped).
    /// Restricted, it keeps only atoms that occur on the old side (in `K`, or
    /// primed in `V`) *and* on the new side (in `U`, or unprimed in `V`); any
    /// other equivalence can be added to a consistent set without breaking
    /// consistency.
    pub fn candidates(&self, restricted: bool) -> BTreeSet<Atom> {
        let v_atoms = vocab(&self.v);
        let full: BTreeSet<Atom> = self
            .k
            .vocab()
            .into_iter()
            .chain(vocab(&self.u))
            .chain(v_atoms.iter().map(Atom::unprimed))
            .collect();
        if !restricted {
            return full;
        }
        let old_side: BTreeSet<Atom> = self
            .k
            .vocab()
            .into_iter()
            .chain(v_atoms.iter().filter(|a| a.is_primed()).map(Atom::unprimed))
            .collect();
        let new_side: BTreeSet<Atom> = vocab(&self.u)
            .into_iter()
            .chain(v_atoms.iter().filter(|a| !a.is_primed()).cloned())
            .collect();
        old_side.intersection(&new_side).cloned().collect()
    }

    /// Atoms whose equivalence belongs to every maximal set.
    pub fn forced(&self) -> BTreeSet<Atom> {
        let restricted = self.candidates(true);
        self.candidates(false)
            .difference(&restricted)
            .cloned()
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MaximalityMode {
    /// Maximal under set inclusion.
    #[default]
    Inclusion,
    /// Maximum size among consistent sets.
    Cardinality,
}

/// Deterministic choice among maximal sets, driven by an atom ranking.
///
/// Listed atoms come first, in the listed order; the rest follow
/// lexicographically. The greedy scan adds equivalences in this order, and
/// from a complete family the strategy picks the member whose complement is
/// smallest when compared as a membership vector in this order. The two
/// agree: a greedy scan yields exactly that member.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SelectionStrategy {
    order: Vec<Atom>,
}

impl SelectionStrategy {
    pub fn lexicographic() -> SelectionStrategy {
        SelectionStrategy::default()
    }

    pub fn with_order(order: Vec<Atom>) -> SelectionStrategy {
        SelectionStrategy { order }
    }

    pub fn order(&self) -> &[Atom] {
        &self.order
    }

    /// The given atoms, ranked.
    pub fn rank(&self, atoms: &BTreeSet<Atom>) -> Vec<Atom> {
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in &self.order {
            if atoms.contains(a) && !out.contains(a) {
                out.push(a.clone());
            }
        }
        out.extend(atoms.iter().filter(|a| !self.order.contains(a)).cloned());
        out
    }

    pub fn select<'a>(&self, family: &'a [EqSet]) -> Option<&'a EqSet> {
        let first = family.first()?;
        let ranked = self.rank(first.candidates());
        family.iter().min_by(|a, b| {
            a.complement_key(&ranked)
                .cmp(&b.complement_key(&ranked))
        })
    }
}

/// Which maximal sets to compute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extensions {
    All,
    Choice(SelectionStrategy),
}

/// The maximal equivalence sets of a scenario, in canonical order.
///
/// Canonical order compares complement membership vectors over the
/// lexicographically sorted candidates, false before true.
#[derive(Clone, Debug)]
pub struct ExtensionFamily {
    eq_sets: Vec<EqSet>,
    scenario: Scenario,
    mode: MaximalityMode,
}

impl ExtensionFamily {
    pub(crate) fn new(scenario: Scenario, mode: MaximalityMode, mut eq_sets: Vec<EqSet>) -> Self {
        eq_sets.sort_by(canonical_cmp);
        eq_sets.dedup();
        ExtensionFamily {
            eq_sets,
            scenario,
            mode,
        }
    }

    pub fn eq_sets(&self) -> &[EqSet] {
        &self.eq_sets
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn mode(&self) -> MaximalityMode {
        self.mode
    }

    pub fn is_empty(&self) -> bool {
        self.eq_sets.is_empty()
    }

    pub fn len(&self) -> usize {
        self.eq_sets.len()
    }

    /// The complements of the members, i.e. the atoms each extension gives up.
    pub fn complements(&self) -> Vec<BTreeSet<Atom>> {
        self.eq_sets.iter().map(EqSet::complement).collect()
    }

    /// Sign-flip form of the whole family, conjoined with `U`:
    /// `(⋁ᵢ ⋀_{s∈K} ⌈s⌉ᵢ) ∧ ⋀U`. Equivalent to the skeptical result when
    /// `V` is empty; `⊥` for an empty family.
    pub fn revision_rep(&self) -> Formula {
        if self.eq_sets.is_empty() {
            return Formula::False;
        }
        let k_part = Formula::disjoin(self.eq_sets.iter().map(|eq| flip_rep(&self.scenario, eq)));
        with_u(k_part, &self.scenario)
    }

    /// Truth-value enumeration form of the whole family,
    /// `⋁ᵢ ⋁_π ⋀_{s∈K} ⌊s⌋^π`, with no simplification, conjoined with `U`
    /// when `U` is nonempty.
    pub fn enumeration_rep(&self) -> Result<Formula> {
        let mut disjuncts = Vec::new();
        for eq in &self.eq_sets {
            disjuncts.extend(enumeration_terms(&self.scenario, eq)?);
        }
        Ok(with_u(Formula::disjoin(disjuncts), &self.scenario))
    }

    /// Disjunction of the forgetting-based extension representatives.
    pub fn skeptical_rep(&self) -> Result<Formula> {
        let reps = self
            .eq_sets
            .iter()
            .map(|eq| extension_formula(&self.scenario, eq))
            .collect::<Result<Vec<_>>>()?;
        Ok(Formula::disjoin(reps))
    }
}

fn with_u(k_part: Formula, b: &Scenario) -> Formula {
    if b.u.is_empty() {
        return k_part;
    }
    Formula::conjoin(std::iter::once(k_part).chain(b.u.iter().cloned()))
}

fn canonical_cmp(a: &EqSet, b: &EqSet) -> Ordering {
    let order: Vec<&Atom> = a.candidates().union(b.candidates()).collect();
    a.complement_key(order.iter().copied())
        .cmp(&b.complement_key(order.iter().copied()))
}

fn consistent(reasoner: &Reasoner, base: &[Formula], included: &BTreeSet<Atom>) -> bool {
    let mut fs = base.to_vec();
    fs.extend(
        included
            .iter()
            .map(|p| Formula::iff(Formula::var(p.clone()), Formula::var(p.primed()))),
    );
    reasoner.satisfiable(&fs)
}

/// Whether `K' ∪ EQ ∪ U ∪ V` is satisfiable.
pub fn eq_consistent(reasoner: &Reasoner, b: &Scenario, eq: &EqSet) -> Result<bool> {
    if *eq.candidates() != b.candidates(false) {
        return Err(Error::Precondition(
            "equivalence set was drawn from a different candidate pool".into(),
        ));
    }
    Ok(consistent(reasoner, &b.base_formulas(), eq.included()))
}

/// Outcome of one greedy scan over the contested atoms.
#[derive(Clone, Debug)]
pub struct GreedyPass {
    pub included: BTreeSet<Atom>,
    /// Whether some consistency check succeeded, which proves the result
    /// itself consistent. When false the caller still has to check the
    /// forced-in set on its own.
    pub witnessed: bool,
}

/// One greedy pass: starting from the forced-in equivalences, try each
/// contested atom in strategy order and keep it if consistency survives.
/// Issues exactly one satisfiability call per contested atom.
pub fn greedy_pass(reasoner: &Reasoner, b: &Scenario, strategy: &SelectionStrategy) -> GreedyPass {
    let base = b.base_formulas();
    let mut included = b.forced();
    let mut witnessed = false;
    for x in strategy.rank(&b.candidates(true)) {
        included.insert(x.clone());
        if consistent(reasoner, &base, &included) {
            witnessed = true;
        } else {
            included.remove(&x);
        }
    }
    GreedyPass {
        included,
        witnessed,
    }
}

/// The maximal consistent equivalence sets of `b`.
///
/// `All` enumerates the whole family by seed-and-grow with blocking: each
/// round asks for a model of `K' ∪ U ∪ V` plus the forced equivalences that
/// agrees on at least one contested atom outside every set found so far,
/// reads a seed off that model and grows it greedily. `Choice` under
/// inclusion runs a single greedy pass; under cardinality it picks from the
/// complete family.
pub fn max_eq(
    reasoner: &Reasoner,
    b: &Scenario,
    mode: MaximalityMode,
    which: &Extensions,
) -> ExtensionFamily {
    let full = b.candidates(false);
    if let (MaximalityMode::Inclusion, Extensions::Choice(strategy)) = (mode, which) {
        let pass = greedy_pass(reasoner, b, strategy);
        let members = if pass.witnessed || consistent(reasoner, &b.base_formulas(), &pass.included) {
            vec![EqSet::new_unchecked(pass.included, full)]
        } else {
            Vec::new()
        };
        return ExtensionFamily::new(b.clone(), mode, members);
    }

    let mut members: Vec<EqSet> = enumerate_inclusion_maximal(reasoner, b)
        .into_iter()
        .map(|inc| EqSet::new_unchecked(inc, full.clone()))
        .collect();
    if mode == MaximalityMode::Cardinality {
        let best = members.iter().map(EqSet::len).max().unwrap_or(0);
        members.retain(|eq| eq.len() == best);
    }
    let family = ExtensionFamily::new(b.clone(), mode, members);
    match which {
        Extensions::All => family,
        Extensions::Choice(strategy) => {
            let chosen: Vec<EqSet> = strategy.select(&family.eq_sets).cloned().into_iter().collect();
            ExtensionFamily::new(b.clone(), mode, chosen)
        }
    }
}

fn enumerate_inclusion_maximal(reasoner: &Reasoner, b: &Scenario) -> Vec<BTreeSet<Atom>> {
    let contested = b.candidates(true);
    let forced = b.forced();
    let mut base = b.base_formulas();
    base.extend(
        forced
            .iter()
            .map(|p| Formula::iff(Formula::var(p.clone()), Formula::var(p.primed()))),
    );
    let mut found: Vec<BTreeSet<Atom>> = Vec::new();
    loop {
        let mut query = base.clone();
        for m in &found {
            query.push(Formula::disjoin(contested.difference(m).map(|x| {
                Formula::iff(Formula::var(x.clone()), Formula::var(x.primed()))
            })));
        }
        let Some(model) = reasoner.find_model(&query) else {
            break;
        };
        // an atom the query never mentions can be set to agree with its twin
        let mut seed: BTreeSet<Atom> = contested
            .iter()
            .filter(|x| match (model.value(x), model.value(&x.primed())) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            })
            .cloned()
            .collect();
        let mut grown = forced.clone();
        grown.extend(seed.iter().cloned());
        for x in &contested {
            if seed.contains(x) {
                continue;
            }
            grown.insert(x.clone());
            if consistent(reasoner, &base, &grown) {
                seed.insert(x.clone());
            } else {
                grown.remove(x);
            }
        }
        found.push(seed);
    }
    found
        .into_iter()
        .map(|m| m.into_iter().chain(forced.iter().cloned()).collect())
        .collect()
}

/// A formula over the unprimed alphabet equivalent to the extension
/// `Th(K' ∪ EQ ∪ U) ∩ L_P`. `V` only takes part in the consistency check.
pub fn extension_rep(reasoner: &Reasoner, b: &Scenario, eq: &EqSet) -> Result<Formula> {
    if !eq_consistent(reasoner, b, eq)? {
        return Err(Error::Precondition(format!(
            "equivalence set {eq} is not consistent with the scenario"
        )));
    }
    extension_formula(b, eq)
}

/// Keeps `p` for `p ∈ EQ`, renames the other atoms of `K` to `p'`, forgets
/// those, and conjoins `U`.
pub(crate) fn extension_formula(b: &Scenario, eq: &EqSet) -> Result<Formula> {
    let k = b.k.conjunction();
    let hidden: BTreeSet<Atom> = k
        .vocab()
        .iter()
        .filter(|a| !eq.contains(a))
        .map(Atom::primed)
        .collect();
    let renamed = k.map_atoms(&mut |a| {
        Formula::var(if eq.contains(a) { a.clone() } else { a.primed() })
    });
    let k_part = renaming::forget(&renamed, &hidden)?;
    Ok(match k_part {
        Formula::True if !b.u.is_empty() => Formula::conjoin(b.u.iter().cloned()),
        k_part => with_u(k_part, b),
    })
}

/// `⋀_{s∈K} ⌈s⌉`: each member of `K` with the atoms outside `EQ` negated.
pub fn flip_rep(b: &Scenario, eq: &EqSet) -> Formula {
    let flip = eq.complement();
    Formula::conjoin(b.k.formulas().iter().map(|s| flip_subst(s, &flip)))
}

/// The disjuncts `⋀_{s∈K} ⌊s⌋^π`, one per truth assignment π to the atoms
/// of `K` outside `EQ`, in canonical assignment order and unsimplified.
pub fn enumeration_terms(b: &Scenario, eq: &EqSet) -> Result<Vec<Formula>> {
    let k = b.k.conjunction();
    let hidden: BTreeSet<Atom> = k.vocab().into_iter().filter(|a| !eq.contains(a)).collect();
    if hidden.len() > DEFAULT_ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            what: "set of forgotten atoms",
            size: hidden.len(),
            limit: DEFAULT_ENUMERATION_LIMIT,
        });
    }
    Ok(renaming::assignments(&hidden)
        .map(|pi| Formula::conjoin(b.k.formulas().iter().map(|s| truth_subst(s, &pi))))
        .collect())
}
