//! Revision, contraction, integrity-constrained revision and queries.
//!
//! Skeptical results are the disjunction of the extension representatives
//! of the whole family; choice results are the representative of the one
//! selected extension. Revision falls back to `{⊥}` on an empty family,
//! contraction to the unchanged base.

use crate::error::{Error, Result};
use crate::formula::{BeliefBase, Formula, Reasoner};
use crate::scenario::{
    greedy_pass, max_eq, ExtensionFamily, Extensions, MaximalityMode, Scenario, SelectionStrategy,
};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Variant {
    #[default]
    Skeptical,
    Choice(SelectionStrategy),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChangeOptions {
    pub variant: Variant,
    pub mode: MaximalityMode,
}

impl ChangeOptions {
    pub fn skeptical() -> ChangeOptions {
        ChangeOptions::default()
    }

    pub fn choice(strategy: SelectionStrategy) -> ChangeOptions {
        ChangeOptions {
            variant: Variant::Choice(strategy),
            mode: MaximalityMode::Inclusion,
        }
    }

    pub fn with_mode(mut self, mode: MaximalityMode) -> ChangeOptions {
        self.mode = mode;
        self
    }

    pub fn extensions(&self) -> Extensions {
        match &self.variant {
            Variant::Skeptical => Extensions::All,
            Variant::Choice(s) => Extensions::Choice(s.clone()),
        }
    }
}

/// Constraints for [`revise_ic`]. `ic_k` must stay consistent with the
/// result, `ic_r` must follow from it, and `dynamic` relates the old state
/// (primed atoms) to the new one.
#[derive(Clone, Debug, Default)]
pub struct IntegrityConstraints {
    pub ic_k: Vec<Formula>,
    pub ic_r: Vec<Formula>,
    pub dynamic: Vec<Formula>,
}

impl IntegrityConstraints {
    /// Rejects primed atoms in `ic_k` and `ic_r`. Returns a warning for each
    /// dynamic constraint that mentions no primed atom.
    pub fn validate(&self) -> Result<Vec<String>> {
        for (fs, context) in [
            (&self.ic_k, "a consistency constraint"),
            (&self.ic_r, "an entailment constraint"),
        ] {
            for f in fs {
                if let Some(a) = f.first_primed() {
                    return Err(Error::PrimedAtom {
                        atom: a.to_string(),
                        context,
                    });
                }
            }
        }
        Ok(self
            .dynamic
            .iter()
            .filter(|f| f.first_primed().is_none())
            .map(|f| format!("dynamic constraint `{f}` mentions no primed atom"))
            .collect())
    }
}

fn unprimed(f: &Formula, context: &'static str) -> Result<()> {
    match f.first_primed() {
        Some(a) => Err(Error::PrimedAtom {
            atom: a.to_string(),
            context,
        }),
        None => Ok(()),
    }
}

/// `K ∔ α`.
pub fn revise(
    reasoner: &Reasoner,
    k: &BeliefBase,
    alpha: &Formula,
    opts: &ChangeOptions,
) -> Result<BeliefBase> {
    unprimed(alpha, "a revising formula")?;
    let b = Scenario::revision(k.clone(), alpha.clone())?;
    let family = max_eq(reasoner, &b, opts.mode, &opts.extensions());
    aggregate(&family)
}

/// Revision-style aggregation: `{⊥}` for an empty family. The flip form is
/// used when `V` is empty; otherwise forgetting.
fn aggregate(family: &ExtensionFamily) -> Result<BeliefBase> {
    if family.is_empty() {
        return Ok(BeliefBase::inconsistent());
    }
    let rep = if family.scenario().v().is_empty() {
        family.revision_rep()
    } else {
        family.skeptical_rep()?
    };
    Ok(BeliefBase::from_formula(rep))
}

/// `K ∸ α`.
pub fn contract(
    reasoner: &Reasoner,
    k: &BeliefBase,
    alpha: &Formula,
    opts: &ChangeOptions,
) -> Result<BeliefBase> {
    unprimed(alpha, "a contracted formula")?;
    let b = Scenario::contraction(k.clone(), alpha.clone())?;
    let family = max_eq(reasoner, &b, opts.mode, &opts.extensions());
    if family.is_empty() {
        return Ok(k.clone());
    }
    Ok(BeliefBase::from_formula(family.enumeration_rep()?))
}

/// Revision under integrity constraints: scenario
/// `(K, {α} ∪ IC_R, IC_K ∪ dynamic)`.
pub fn revise_ic(
    reasoner: &Reasoner,
    k: &BeliefBase,
    alpha: &Formula,
    ic: &IntegrityConstraints,
    opts: &ChangeOptions,
) -> Result<BeliefBase> {
    unprimed(alpha, "a revising formula")?;
    ic.validate()?;
    let u = std::iter::once(alpha.clone())
        .chain(ic.ic_r.iter().cloned())
        .collect();
    let v = ic.ic_k.iter().chain(&ic.dynamic).cloned().collect();
    let b = Scenario::new(k.clone(), u, v)?;
    let family = max_eq(reasoner, &b, opts.mode, &opts.extensions());
    aggregate(&family)
}

/// Whether `revise(k, α, opts)` entails `β`, decided without building the
/// result. The choice variant under inclusion makes one greedy pass and a
/// single entailment call.
pub fn query(
    reasoner: &Reasoner,
    k: &BeliefBase,
    alpha: &Formula,
    beta: &Formula,
    opts: &ChangeOptions,
) -> Result<bool> {
    unprimed(alpha, "a revising formula")?;
    unprimed(beta, "a queried formula")?;
    let b = Scenario::revision(k.clone(), alpha.clone())?;
    let base = b.base_formulas();
    let entailed = |eq: &[Formula]| {
        let mut sigma = base.clone();
        sigma.extend_from_slice(eq);
        reasoner.entails(&sigma, beta)
    };
    if let (Variant::Choice(strategy), MaximalityMode::Inclusion) = (&opts.variant, opts.mode) {
        let pass = greedy_pass(reasoner, &b, strategy);
        let eqs: Vec<Formula> = pass
            .included
            .iter()
            .map(|p| Formula::iff(Formula::var(p.clone()), Formula::var(p.primed())))
            .collect();
        return Ok(entailed(&eqs));
    }
    let family = max_eq(reasoner, &b, opts.mode, &opts.extensions());
    Ok(family.eq_sets().iter().all(|eq| entailed(&eq.as_formulas())))
}

/// `K + α`: the conjunction, or `{⊥}` when it is inconsistent.
pub fn expand(reasoner: &Reasoner, k: &BeliefBase, alpha: &Formula) -> Result<BeliefBase> {
    unprimed(alpha, "an expanding formula")?;
    let mut fs = k.formulas().to_vec();
    fs.push(alpha.clone());
    if !reasoner.satisfiable(&fs) {
        return Ok(BeliefBase::inconsistent());
    }
    BeliefBase::new(fs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{equivalent, parse, parse_with, Atom, ParseOptions};

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    fn kb(s: &str) -> BeliefBase {
        BeliefBase::from_formula(f(s))
    }

    fn same(b: &BeliefBase, s: &str) -> bool {
        equivalent(&b.conjunction(), &f(s))
    }

    #[test]
    fn revise_examples() {
        let r = Reasoner::default();
        let o = ChangeOptions::skeptical();
        assert!(same(&revise(&r, &kb("p & q"), &f("~q"), &o).unwrap(), "p & ~q"));
        assert!(same(&revise(&r, &kb("p & q"), &f("~p | ~q"), &o).unwrap(), "p <-> ~q"));
        assert!(same(&revise(&r, &kb("~p <-> q"), &f("~q"), &o).unwrap(), "p & ~q"));
    }

    #[test]
    fn revise_empty_family_is_bottom() {
        let r = Reasoner::default();
        let out = revise(&r, &kb("p"), &f("false"), &ChangeOptions::skeptical()).unwrap();
        assert!(out.is_bottom());
        let out = revise(&r, &kb("p & ~p"), &f("q"), &ChangeOptions::skeptical()).unwrap();
        assert!(out.is_bottom());
    }

    #[test]
    fn revise_rejects_primed_alpha() {
        let r = Reasoner::default();
        let alpha = parse_with("p'", ParseOptions { allow_primed: true }).unwrap();
        assert!(matches!(
            revise(&r, &kb("p"), &alpha, &ChangeOptions::skeptical()),
            Err(Error::PrimedAtom { .. })
        ));
    }

    #[test]
    fn choice_revision_follows_order() {
        let r = Reasoner::default();
        let o = ChangeOptions::choice(SelectionStrategy::lexicographic());
        assert!(same(&revise(&r, &kb("p & q"), &f("~p | ~q"), &o).unwrap(), "p & ~q"));
        let o = ChangeOptions::choice(SelectionStrategy::with_order(vec![Atom::new("q")]));
        assert!(same(&revise(&r, &kb("p & q"), &f("~p | ~q"), &o).unwrap(), "~p & q"));
    }

    #[test]
    fn contract_examples() {
        let r = Reasoner::default();
        let o = ChangeOptions::skeptical();
        assert!(same(&contract(&r, &kb("p & q"), &f("q"), &o).unwrap(), "p"));
        assert!(same(&contract(&r, &kb("p & q & r"), &f("p | q"), &o).unwrap(), "r"));
        assert!(same(&contract(&r, &kb("p & q"), &f("p & q"), &o).unwrap(), "p | q"));
    }

    #[test]
    fn contract_empty_family_keeps_k() {
        let r = Reasoner::default();
        let k = kb("p & q");
        let out = contract(&r, &k, &f("p | ~p"), &ChangeOptions::skeptical()).unwrap();
        assert_eq!(out.formulas(), k.formulas());
    }

    #[test]
    fn revise_ic_examples() {
        let r = Reasoner::default();
        let o = ChangeOptions::skeptical();
        let ic = IntegrityConstraints {
            ic_r: vec![f("r")],
            ..Default::default()
        };
        assert!(same(&revise_ic(&r, &kb("p"), &f("q"), &ic, &o).unwrap(), "p & q & r"));
        let ic = IntegrityConstraints {
            ic_k: vec![f("~(p & q)")],
            ..Default::default()
        };
        assert!(same(&revise_ic(&r, &kb("q"), &f("p"), &ic, &o).unwrap(), "p"));
        let ic = IntegrityConstraints {
            dynamic: vec![parse_with("p' -> p", ParseOptions { allow_primed: true }).unwrap()],
            ..Default::default()
        };
        assert!(revise_ic(&r, &kb("p"), &f("~p"), &ic, &o).unwrap().is_bottom());
    }

    #[test]
    fn ic_validation() {
        let ic = IntegrityConstraints {
            dynamic: vec![f("p -> q")],
            ..Default::default()
        };
        assert_eq!(ic.validate().unwrap().len(), 1);
        let ic = IntegrityConstraints {
            ic_k: vec![parse_with("p'", ParseOptions { allow_primed: true }).unwrap()],
            ..Default::default()
        };
        assert!(ic.validate().is_err());
    }

    #[test]
    fn query_examples() {
        let r = Reasoner::default();
        let o = ChangeOptions::skeptical();
        assert!(query(&r, &kb("p & q"), &f("~p | ~q"), &f("p | q"), &o).unwrap());
        assert!(!query(&r, &kb("p & q"), &f("~p | ~q"), &f("p"), &o).unwrap());
        assert!(query(&r, &kb("p & q"), &f("~p | ~q"), &f("true"), &o).unwrap());
        let c = ChangeOptions::choice(SelectionStrategy::default());
        assert!(query(&r, &kb("p & q"), &f("~p | ~q"), &f("p"), &c).unwrap());
        assert!(query(&r, &kb("p & q"), &f("~q"), &f("p"), &o).unwrap());
    }

    #[test]
    fn choice_query_call_count() {
        let r = Reasoner::default();
        let c = ChangeOptions::choice(SelectionStrategy::default());
        query(&r, &kb("p & q & s"), &f("~p | ~q"), &f("s"), &c).unwrap();
        assert_eq!(r.sat_calls(), 2 + 1);
    }

    #[test]
    fn expand_examples() {
        let r = Reasoner::default();
        assert!(same(&expand(&r, &kb("p"), &f("q")).unwrap(), "p & q"));
        assert!(expand(&r, &kb("p"), &f("~p")).unwrap().is_bottom());
    }
}
