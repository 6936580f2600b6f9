//! Consistency-based belief change over propositional logic.
//!
//! The knowledge base is rewritten over a primed copy of the alphabet, the
//! new information stays over the original alphabet, and as many
//! equivalences `p ↔ p'` as consistently possible are assumed between the
//! two. Each maximal set of such equivalences yields one candidate result;
//! choice operators pick one, skeptical operators keep what all of them
//! agree on.
//!
//! * [`formula`]: syntax, parsing, satisfiability backends.
//! * [`renaming`]: priming, sign-flip and truth-value substitution, forgetting.
//! * [`scenario`]: change scenarios and maximal equivalence sets.
//! * [`change`]: revision, contraction, integrity constraints, queries.
//! * [`update`]: prime implicants and the pointwise update operator.
//! * [`oracle`]: brute-force model-based reference operators.
//! * [`laws`]: postulate auditing over instance grids.

pub mod change;
pub mod error;
pub mod formula;
pub mod laws;
pub mod oracle;
pub mod renaming;
pub mod scenario;
pub mod update;

pub use change::{
    contract, expand, query, revise, revise_ic, ChangeOptions, IntegrityConstraints, Variant,
};
pub use error::{Error, Result};
pub use formula::{
    entails, equivalent, parse, parse_kb, parse_with, satisfiable, Atom, BeliefBase, Formula,
    Interpretation, ParseError, ParseOptions, Reasoner,
};
pub use renaming::EqSet;
pub use scenario::{ExtensionFamily, MaximalityMode, Scenario, SelectionStrategy};
pub use update::{prime_implicates, update, LiteralSet};
