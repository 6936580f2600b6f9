//! Brute-force reference operators.
//!
//! Everything here works on explicit model sets enumerated by a private
//! loop over bit vectors. Nothing calls the reasoner, the renaming module
//! or the scenario search, so agreement with them is evidence.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{vocab, Atom, BeliefBase, Formula};
use crate::renaming::EqSet;
use crate::scenario::{ExtensionFamily, MaximalityMode, Scenario};

/// Joint vocabularies above this size are refused.
pub const ORACLE_ATOM_LIMIT: usize = 20;

/// Candidate pools above this size are refused by [`naive_max_eq`].
pub const ORACLE_CANDIDATE_LIMIT: usize = 16;

/// A symmetric difference `M Δ M'` between two interpretations.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DiffSet {
    pub atoms: BTreeSet<Atom>,
}

impl fmt::Display for DiffSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.atoms.iter().map(|a| a.to_string()).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

struct Space {
    atoms: Vec<Atom>,
}

impl Space {
    fn new(atoms: BTreeSet<Atom>) -> Result<Space> {
        if atoms.len() > ORACLE_ATOM_LIMIT {
            return Err(Error::EnumerationLimit {
                what: "oracle vocabulary",
                size: atoms.len(),
                limit: ORACLE_ATOM_LIMIT,
            });
        }
        Ok(Space {
            atoms: atoms.into_iter().collect(),
        })
    }

    fn index(&self, a: &Atom) -> usize {
        self.atoms.binary_search(a).expect("atom outside the oracle space")
    }

    fn holds(&self, f: &Formula, world: u64) -> bool {
        f.eval(&|a: &Atom| world >> self.index(a) & 1 == 1)
    }

    fn worlds(&self, fs: &[Formula]) -> Vec<u64> {
        (0..1u64 << self.atoms.len())
            .filter(|&w| fs.iter().all(|f| self.holds(f, w)))
            .collect()
    }

    fn atoms_of(&self, bits: u64) -> BTreeSet<Atom> {
        (0..self.atoms.len())
            .filter(|i| bits >> i & 1 == 1)
            .map(|i| self.atoms[i].clone())
            .collect()
    }

    fn base(&self, worlds: &BTreeSet<u64>) -> BeliefBase {
        let vocabulary: BTreeSet<Atom> = self.atoms.iter().cloned().collect();
        let sets: Vec<BTreeSet<Atom>> = worlds.iter().map(|&w| self.atoms_of(w)).collect();
        BeliefBase::from_formula(Formula::from_worlds(&vocabulary, &sets))
    }
}

struct Pair {
    space: Space,
    k: Vec<u64>,
    alpha: Vec<u64>,
}

fn pair(k: &BeliefBase, alpha: &Formula) -> Result<Pair> {
    let mut atoms = k.vocab();
    atoms.extend(alpha.vocab());
    if atoms.iter().any(Atom::is_primed) {
        return Err(Error::OracleDomain("oracles take unprimed inputs only".into()));
    }
    let space = Space::new(atoms)?;
    let km = space.worlds(k.formulas());
    let am = space.worlds(std::slice::from_ref(alpha));
    if km.is_empty() || am.is_empty() {
        return Err(Error::OracleDomain(
            "the base and the new formula must both be satisfiable".into(),
        ));
    }
    Ok(Pair {
        space,
        k: km,
        alpha: am,
    })
}

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

fn inclusion_minimal(ds: &BTreeSet<u64>) -> BTreeSet<u64> {
    ds.iter()
        .copied()
        .filter(|&d| !ds.iter().any(|&e| e != d && subset(e, d)))
        .collect()
}

fn min_by_count(ds: &BTreeSet<u64>) -> BTreeSet<u64> {
    let best = ds.iter().map(|d| d.count_ones()).min().unwrap_or(0);
    ds.iter().copied().filter(|d| d.count_ones() == best).collect()
}

/// `Δmin(α, K)`: the ⊆-minimal differences between models of `α` and models
/// of `K`, sorted.
pub fn delta_min(k: &BeliefBase, alpha: &Formula) -> Result<Vec<DiffSet>> {
    let p = pair(k, alpha)?;
    let all: BTreeSet<u64> = p
        .alpha
        .iter()
        .flat_map(|&m| p.k.iter().map(move |&n| m ^ n))
        .collect();
    let mut out: Vec<DiffSet> = inclusion_minimal(&all)
        .into_iter()
        .map(|d| DiffSet {
            atoms: p.space.atoms_of(d),
        })
        .collect();
    out.sort();
    Ok(out)
}

fn global_revise(k: &BeliefBase, alpha: &Formula, pick: fn(&BTreeSet<u64>) -> BTreeSet<u64>) -> Result<BeliefBase> {
    let p = pair(k, alpha)?;
    let all: BTreeSet<u64> = p
        .alpha
        .iter()
        .flat_map(|&m| p.k.iter().map(move |&n| m ^ n))
        .collect();
    let best = pick(&all);
    let kept: BTreeSet<u64> = p
        .alpha
        .iter()
        .copied()
        .filter(|&m| p.k.iter().any(|&n| best.contains(&(m ^ n))))
        .collect();
    Ok(p.space.base(&kept))
}

/// Models of `α` reachable from some model of `K` by a difference in `Δmin`.
pub fn satoh_revise(k: &BeliefBase, alpha: &Formula) -> Result<BeliefBase> {
    global_revise(k, alpha, inclusion_minimal)
}

/// Models of `α` at minimum Hamming distance from the models of `K`.
pub fn dalal_revise(k: &BeliefBase, alpha: &Formula) -> Result<BeliefBase> {
    global_revise(k, alpha, min_by_count)
}

fn pointwise_update(k: &BeliefBase, alpha: &Formula, pick: fn(&BTreeSet<u64>) -> BTreeSet<u64>) -> Result<BeliefBase> {
    let p = pair(k, alpha)?;
    let mut kept = BTreeSet::new();
    for &n in &p.k {
        let diffs: BTreeSet<u64> = p.alpha.iter().map(|&m| m ^ n).collect();
        kept.extend(pick(&diffs).into_iter().map(|d| d ^ n));
    }
    Ok(p.space.base(&kept))
}

/// Union over the models of `K` of the closest `α`-models under inclusion.
pub fn winslett_update(k: &BeliefBase, alpha: &Formula) -> Result<BeliefBase> {
    pointwise_update(k, alpha, inclusion_minimal)
}

/// Union over the models of `K` of the closest `α`-models by count.
pub fn forbus_update(k: &BeliefBase, alpha: &Formula) -> Result<BeliefBase> {
    pointwise_update(k, alpha, min_by_count)
}

/// Joint models of `K' ∪ U ∪ V` over every atom involved, together with the
/// full candidate pool and the joint space.
struct Joint {
    space: Space,
    candidates: BTreeSet<Atom>,
    worlds: Vec<u64>,
}

fn joint(b: &Scenario, with_v: bool) -> Result<Joint> {
    let primed_k: Vec<Formula> = b
        .k()
        .formulas()
        .iter()
        .map(|f| f.map_atoms(&mut |a| Formula::var(a.primed())))
        .collect();
    let mut fs = primed_k;
    fs.extend(b.u().iter().cloned());
    if with_v {
        fs.extend(b.v().iter().cloned());
    }
    let mut candidates: BTreeSet<Atom> = b.k().vocab();
    candidates.extend(vocab(b.u()));
    candidates.extend(vocab(b.v()).iter().map(Atom::unprimed));
    if candidates.len() > ORACLE_CANDIDATE_LIMIT {
        return Err(Error::EnumerationLimit {
            what: "oracle candidate pool",
            size: candidates.len(),
            limit: ORACLE_CANDIDATE_LIMIT,
        });
    }
    let all: BTreeSet<Atom> = candidates
        .iter()
        .flat_map(|a| [a.clone(), a.primed()])
        .collect();
    let space = Space::new(all)?;
    let worlds = space.worlds(&fs);
    Ok(Joint {
        space,
        candidates,
        worlds,
    })
}

impl Joint {
    fn agreement(&self, w: u64) -> BTreeSet<Atom> {
        self.candidates
            .iter()
            .filter(|a| {
                let x = w >> self.space.index(a) & 1;
                let y = w >> self.space.index(&a.primed()) & 1;
                x == y
            })
            .cloned()
            .collect()
    }
}

/// Maximal equivalence sets by definition, over the full candidate pool.
///
/// A set `S` of equivalences is consistent iff some joint model of
/// `K' ∪ U ∪ V` agrees on every atom of `S`, so the consistent sets are the
/// subsets of the agreement sets of those models, and the inclusion-maximal
/// ones are the maximal agreement sets.
pub fn naive_max_eq(b: &Scenario, mode: MaximalityMode) -> Result<ExtensionFamily> {
    let j = joint(b, true)?;
    let agreements: BTreeSet<BTreeSet<Atom>> = j.worlds.iter().map(|&w| j.agreement(w)).collect();
    let mut maximal: Vec<BTreeSet<Atom>> = agreements
        .iter()
        .filter(|s| !agreements.iter().any(|t| t != *s && s.is_subset(t)))
        .cloned()
        .collect();
    if mode == MaximalityMode::Cardinality {
        let best = maximal.iter().map(BTreeSet::len).max().unwrap_or(0);
        maximal.retain(|s| s.len() == best);
    }
    let members = maximal
        .into_iter()
        .map(|s| EqSet::new(s, j.candidates.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExtensionFamily::new(b.clone(), mode, members))
}

/// Whether `K' ∪ EQ ∪ U ∪ V` has a model, by enumeration.
pub fn naive_consistent(b: &Scenario, eq: &EqSet) -> Result<bool> {
    let j = joint(b, true)?;
    Ok(j.worlds.iter().any(|&w| eq.included().is_subset(&j.agreement(w))))
}

/// Models of the extension `Th(K' ∪ EQ ∪ U) ∩ L_P`, as sets of true atoms
/// over the full candidate pool, sorted.
pub fn extension_models(b: &Scenario, eq: &EqSet) -> Result<Vec<BTreeSet<Atom>>> {
    let j = joint(b, false)?;
    let projected: BTreeSet<BTreeSet<Atom>> = j
        .worlds
        .iter()
        .filter(|&&w| eq.included().is_subset(&j.agreement(w)))
        .map(|&w| {
            j.candidates
                .iter()
                .filter(|a| w >> j.space.index(a) & 1 == 1)
                .cloned()
                .collect()
        })
        .collect();
    Ok(projected.into_iter().collect())
}

/// Models of the skeptical result: the union of the extension models of the
/// brute-force family.
pub fn skeptical_models(b: &Scenario, mode: MaximalityMode) -> Result<Vec<BTreeSet<Atom>>> {
    let mut out = BTreeSet::new();
    for eq in naive_max_eq(b, mode)?.eq_sets() {
        out.extend(extension_models(b, eq)?);
    }
    Ok(out.into_iter().collect())
}

/// Models of `f` over `vocabulary`, as sets of true atoms, sorted.
pub fn formula_models(f: &Formula, vocabulary: &BTreeSet<Atom>) -> Result<Vec<BTreeSet<Atom>>> {
    if let Some(a) = f.vocab().difference(vocabulary).next() {
        return Err(Error::Precondition(format!(
            "atom `{a}` is not in the oracle vocabulary"
        )));
    }
    let space = Space::new(vocabulary.clone())?;
    let mut out: Vec<BTreeSet<Atom>> = space
        .worlds(std::slice::from_ref(f))
        .into_iter()
        .map(|w| space.atoms_of(w))
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{equivalent, parse};

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn kb(s: &str) -> BeliefBase {
        BeliefBase::from_formula(f(s))
    }

    fn same(b: &BeliefBase, s: &str) -> bool {
        equivalent(&b.conjunction(), &f(s))
    }

    fn diffs(k: &str, a: &str) -> Vec<String> {
        delta_min(&kb(k), &f(a)).unwrap().iter().map(|d| d.to_string()).collect()
    }

    #[test]
    fn satoh_examples() {
        assert_eq!(diffs("p & q", "~p | ~q"), ["{p}", "{q}"]);
        assert!(same(&satoh_revise(&kb("p & q"), &f("~p | ~q")).unwrap(), "p <-> ~q"));
        assert_eq!(diffs("p", "p"), ["{}"]);
        assert!(same(&satoh_revise(&kb("p"), &f("p")).unwrap(), "p"));
        assert_eq!(diffs("~p", "p"), ["{p}"]);
        assert!(same(&satoh_revise(&kb("~p"), &f("p")).unwrap(), "p"));
    }

    #[test]
    fn dalal_examples() {
        assert!(same(
            &dalal_revise(&kb("p & q & r"), &f("~p | ~q")).unwrap(),
            "(p <-> ~q) & r"
        ));
        assert!(same(&dalal_revise(&kb("p"), &f("p")).unwrap(), "p"));
        assert!(same(&dalal_revise(&kb("p & q"), &f("~p & ~q")).unwrap(), "~p & ~q"));
    }

    #[test]
    fn winslett_examples() {
        assert!(same(&winslett_update(&kb("p | q"), &f("~p")).unwrap(), "~p"));
        assert!(same(&winslett_update(&kb("p & q"), &f("~p | ~q")).unwrap(), "p <-> ~q"));
        assert!(same(&winslett_update(&kb("p"), &f("p")).unwrap(), "p"));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(satoh_revise(&kb("p & ~p"), &f("q")), Err(Error::OracleDomain(_))));
        assert!(matches!(winslett_update(&kb("p"), &f("false")), Err(Error::OracleDomain(_))));
    }

    fn family(b: &Scenario) -> Vec<String> {
        naive_max_eq(b, MaximalityMode::Inclusion)
            .unwrap()
            .eq_sets()
            .iter()
            .map(|e| e.to_string())
            .collect()
    }

    #[test]
    fn naive_max_eq_examples() {
        let b = Scenario::revision(kb("p & q"), f("~p | ~q")).unwrap();
        assert_eq!(family(&b), ["{p}", "{q}"]);
        let b = Scenario::contraction(kb("p & q & r"), f("p | q")).unwrap();
        assert_eq!(family(&b), ["{r}"]);
        let b = Scenario::new(kb("p & q"), vec![], vec![]).unwrap();
        assert_eq!(family(&b), ["{p, q}"]);
        let b = Scenario::revision(kb("p"), f("false")).unwrap();
        assert!(family(&b).is_empty());
    }

    #[test]
    fn extension_models_example() {
        let b = Scenario::revision(kb("p & q"), f("~q")).unwrap();
        let eq = EqSet::new([Atom::new("p")].into(), b.candidates(false)).unwrap();
        assert_eq!(extension_models(&b, &eq).unwrap(), vec![[Atom::new("p")].into()]);
    }
}
