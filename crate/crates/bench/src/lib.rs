//! Benchmark inputs shared by the criterion benches.

use belief_core::{BeliefBase, Formula};

fn atom(i: usize) -> Formula {
    Formula::atom(&format!("a{i}"))
}

/// `a0 & ... & a{n-1}` revised by `~a0 | ... | ~a{n-1}`: n maximal EQ sets.
pub fn all_but_one(n: usize) -> (BeliefBase, Formula) {
    let k = BeliefBase::from_formula(Formula::conjoin((0..n).map(atom)));
    let alpha = Formula::disjoin((0..n).map(|i| Formula::not(atom(i))));
    (k, alpha)
}

/// An implication chain `a0 -> a1 -> ...` with `a0` asserted, revised by `~a{n-1}`.
pub fn chain(n: usize) -> (BeliefBase, Formula) {
    let mut fs = vec![atom(0)];
    fs.extend((1..n).map(|i| Formula::implies(atom(i - 1), atom(i))));
    (BeliefBase::new(fs).unwrap(), Formula::not(atom(n - 1)))
}
