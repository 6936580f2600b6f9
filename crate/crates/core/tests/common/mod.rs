#![allow(dead_code)]

use std::collections::BTreeSet;

use belief_core::laws::{semantic_classes, Grid};
use belief_core::oracle::formula_models;
use belief_core::{parse, Atom, BeliefBase, Formula};

pub fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

pub fn kb(s: &str) -> BeliefBase {
    BeliefBase::from_formula(f(s))
}

pub fn base(f: &Formula) -> BeliefBase {
    BeliefBase::from_formula(f.clone())
}

pub fn sat(f: &Formula) -> bool {
    !formula_models(f, &f.vocab()).unwrap().is_empty()
}

/// Exhaustive pairs over 2 atoms followed by seeded random pairs over 3.
pub fn pair_grid(random: usize, seed: u64) -> Vec<(Formula, Formula)> {
    let classes = semantic_classes(2);
    let mut out: Vec<(Formula, Formula)> = classes
        .iter()
        .flat_map(|k| classes.iter().map(move |a| (k.clone(), a.clone())))
        .collect();
    out.extend(Grid::random(3, random, seed).pairs());
    out
}

pub fn satisfiable_pairs(random: usize, seed: u64) -> Vec<(Formula, Formula)> {
    pair_grid(random, seed)
        .into_iter()
        .filter(|(k, a)| sat(k) && sat(a))
        .collect()
}

pub fn models_over(f: &Formula, vocabulary: &BTreeSet<Atom>) -> Vec<BTreeSet<Atom>> {
    formula_models(f, vocabulary).unwrap()
}
